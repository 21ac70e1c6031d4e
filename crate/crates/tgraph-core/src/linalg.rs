//! Small dense linear algebra used throughout the crate: real and complex
//! matrices, LU with partial pivoting, one-sided Jacobi SVD for kernels and
//! rank decisions, symmetric eigenvalues, and least squares. Matrices here
//! are desk scale (tens of rows), so simplicity beats asymptotics.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub enum LinalgError {
    Singular,
    ShapeMismatch,
    RankDeficient,
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::Singular => write!(f, "singular matrix"),
            LinalgError::ShapeMismatch => write!(f, "matrix shape mismatch"),
            LinalgError::RankDeficient => write!(f, "unexpected rank deficiency"),
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gram-Schmidt in place; vectors with residual norm below `tol` are dropped.
pub fn orthonormalize(vs: &mut Vec<Vec<f64>>, tol: f64) {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vs.iter() {
        let mut w = v.clone();
        for u in &out {
            let d = dot(&w, u);
            for (wi, ui) in w.iter_mut().zip(u) {
                *wi -= d * ui;
            }
        }
        let n = libm::sqrt(dot(&w, &w));
        if n > tol {
            for wi in w.iter_mut() {
                *wi /= n;
            }
            out.push(w);
        }
    }
    *vs = out;
}

/// Dense real matrix, row major.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut m = Mat::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.rows];
        for i in 0..self.rows {
            y[i] = dot(&self.data[i * self.cols..(i + 1) * self.cols], x);
        }
        y
    }

    /// `x^T A x`.
    pub fn quad(&self, x: &[f64]) -> f64 {
        dot(&self.matvec(x), x)
    }

    /// `x^T A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        dot(&self.matvec(y), x)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Dense complex matrix, row major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn select_columns(&self, cols: &[usize]) -> CMat {
        let mut m = CMat::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (jj, &j) in cols.iter().enumerate() {
                m[(i, jj)] = self[(i, j)];
            }
        }
        m
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Determinant of a square complex matrix via LU with partial pivoting.
pub fn cdet(a: &CMat) -> Result<Complex64, LinalgError> {
    if a.rows != a.cols {
        return Err(LinalgError::ShapeMismatch);
    }
    let n = a.rows;
    let mut m = a.clone();
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let mut piv = k;
        let mut best = m[(k, k)].norm();
        for i in (k + 1)..n {
            let v = m[(i, k)].norm();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if piv != k {
            for j in 0..n {
                let t = m[(k, j)];
                m[(k, j)] = m[(piv, j)];
                m[(piv, j)] = t;
            }
            det = -det;
        }
        det *= m[(k, k)];
        for i in (k + 1)..n {
            let f = m[(i, k)] / m[(k, k)];
            for j in k..n {
                let v = m[(k, j)];
                m[(i, j)] -= f * v;
            }
        }
    }
    Ok(det)
}

/// Inverse of a square complex matrix (Gauss-Jordan with partial pivoting).
pub fn cinvert(a: &CMat) -> Result<CMat, LinalgError> {
    if a.rows != a.cols {
        return Err(LinalgError::ShapeMismatch);
    }
    let n = a.rows;
    let mut m = a.clone();
    let mut inv = CMat::zeros(n, n);
    for i in 0..n {
        inv[(i, i)] = Complex64::new(1.0, 0.0);
    }
    let scale: f64 = a.data.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for k in 0..n {
        let mut piv = k;
        let mut best = m[(k, k)].norm();
        for i in (k + 1)..n {
            let v = m[(i, k)].norm();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best <= 1e-14 * scale.max(1e-300) {
            return Err(LinalgError::Singular);
        }
        if piv != k {
            for j in 0..n {
                m.data.swap(k * n + j, piv * n + j);
                inv.data.swap(k * n + j, piv * n + j);
            }
        }
        let d = m[(k, k)];
        for j in 0..n {
            m[(k, j)] /= d;
            inv[(k, j)] /= d;
        }
        for i in 0..n {
            if i == k {
                continue;
            }
            let f = m[(i, k)];
            if f.norm() == 0.0 {
                continue;
            }
            for j in 0..n {
                let mv = m[(k, j)];
                let iv = inv[(k, j)];
                m[(i, j)] -= f * mv;
                inv[(i, j)] -= f * iv;
            }
        }
    }
    Ok(inv)
}

/// Solve the complex least-squares problem `min |A x - b|` via the normal
/// equations. Fine for the small well-conditioned systems used here.
pub fn clstsq(a: &CMat, b: &[Complex64]) -> Result<Vec<Complex64>, LinalgError> {
    if a.rows != b.len() {
        return Err(LinalgError::ShapeMismatch);
    }
    let n = a.cols;
    let mut ata = CMat::zeros(n, n);
    let mut atb = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        for j in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..a.rows {
                s += a[(k, i)].conj() * a[(k, j)];
            }
            ata[(i, j)] = s;
        }
        let mut s = Complex64::new(0.0, 0.0);
        for k in 0..a.rows {
            s += a[(k, i)].conj() * b[k];
        }
        atb[i] = s;
    }
    csolve(&ata, &atb)
}

/// Solve a square complex system by LU.
pub fn csolve(a: &CMat, b: &[Complex64]) -> Result<Vec<Complex64>, LinalgError> {
    let inv = cinvert(a)?;
    let n = a.rows;
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        for j in 0..n {
            x[i] += inv[(i, j)] * b[j];
        }
    }
    Ok(x)
}

/// Solve a square real system by LU.
pub fn solve(a: &Mat, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let n = a.rows;
    let mut ca = CMat::zeros(n, a.cols);
    for i in 0..n {
        for j in 0..a.cols {
            ca[(i, j)] = Complex64::new(a[(i, j)], 0.0);
        }
    }
    let cb: Vec<Complex64> = b.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    Ok(csolve(&ca, &cb)?.into_iter().map(|z| z.re).collect())
}

/// Real least squares via normal equations.
pub fn lstsq(a: &Mat, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let n = a.cols;
    let mut ata = Mat::zeros(n, n);
    let mut atb = vec![0.0; n];
    for k in 0..a.rows {
        let row = a.row(k);
        for i in 0..n {
            if row[i] == 0.0 {
                continue;
            }
            atb[i] += row[i] * b[k];
            for j in 0..n {
                ata[(i, j)] += row[i] * row[j];
            }
        }
    }
    solve(&ata, &atb)
}

/// Eigenvalues of a symmetric matrix by the cyclic Jacobi method.
pub fn symmetric_eigenvalues(a: &Mat) -> Vec<f64> {
    let n = a.rows;
    let mut m = a.clone();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[(i, j)] * m[(i, j)];
            }
        }
        if off < 1e-28 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if libm::fabs(apq) < 1e-300 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = {
                    let s = if theta >= 0.0 { 1.0 } else { -1.0 };
                    s / (libm::fabs(theta) + libm::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
            }
        }
    }
    (0..n).map(|i| m[(i, i)]).collect()
}

/// Thin SVD pieces needed here: singular values and right singular vectors,
/// by one-sided (Hestenes) Jacobi on the columns.
pub struct Svd {
    /// Singular values, unsorted (paired with the columns of `v`).
    pub sigma: Vec<f64>,
    /// Right singular vectors as columns: `v[j]` is the j-th vector.
    pub v: Vec<Vec<f64>>,
}

pub fn svd(a: &Mat) -> Svd {
    let m = a.rows;
    let n = a.cols;
    // work on columns of a copy; accumulate rotations into v
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| (0..m).map(|i| a[(i, j)]).collect()).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();
    for _sweep in 0..60 {
        let mut converged = true;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = 0.0;
                for i in 0..m {
                    alpha += cols[p][i] * cols[p][i];
                    beta += cols[q][i] * cols[q][i];
                    gamma += cols[p][i] * cols[q][i];
                }
                if libm::fabs(gamma) > 1e-15 * libm::sqrt(alpha * beta) + 1e-300 {
                    converged = false;
                    let zeta = (beta - alpha) / (2.0 * gamma);
                    let t = {
                        let s = if zeta >= 0.0 { 1.0 } else { -1.0 };
                        s / (libm::fabs(zeta) + libm::sqrt(1.0 + zeta * zeta))
                    };
                    let c = 1.0 / libm::sqrt(1.0 + t * t);
                    let s = c * t;
                    for i in 0..m {
                        let cp = cols[p][i];
                        let cq = cols[q][i];
                        cols[p][i] = c * cp - s * cq;
                        cols[q][i] = s * cp + c * cq;
                    }
                    for i in 0..n {
                        let vp = v[p][i];
                        let vq = v[q][i];
                        v[p][i] = c * vp - s * vq;
                        v[q][i] = s * vp + c * vq;
                    }
                }
            }
        }
        if converged {
            break;
        }
    }
    let sigma: Vec<f64> = cols.iter().map(|c| libm::sqrt(dot(c, c))).collect();
    Svd { sigma, v }
}

/// Null space of `a` (right kernel): right singular vectors whose singular
/// value is below `rel_tol` times the largest singular value.
pub fn nullspace(a: &Mat, rel_tol: f64) -> Vec<Vec<f64>> {
    let s = svd(a);
    let smax = s.sigma.iter().cloned().fold(0.0, f64::max);
    s.sigma
        .iter()
        .zip(s.v)
        .filter(|(sig, _)| **sig <= rel_tol * smax.max(1e-300))
        .map(|(_, v)| v)
        .collect()
}

/// Left kernel of `a`: null space of the transpose.
pub fn left_nullspace(a: &Mat, rel_tol: f64) -> Vec<Vec<f64>> {
    nullspace(&a.transpose(), rel_tol)
}

/// Solve a GF(2) linear system `A x = b` given as rows of column-index sets.
/// Returns any solution as a bit vector, or None if inconsistent.
pub fn solve_gf2(num_vars: usize, rows: &[(Vec<usize>, bool)]) -> Option<Vec<bool>> {
    // bitset rows, one u64 block per 64 vars, plus rhs
    let blocks = num_vars.div_ceil(64);
    let mut mat: Vec<(Vec<u64>, bool)> = rows
        .iter()
        .map(|(cols, rhs)| {
            let mut bits = vec![0u64; blocks];
            for &c in cols {
                bits[c / 64] ^= 1u64 << (c % 64);
            }
            (bits, *rhs)
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, var)
    let mut r = 0;
    for var in 0..num_vars {
        let (blk, bit) = (var / 64, 1u64 << (var % 64));
        let mut piv = None;
        for i in r..mat.len() {
            if mat[i].0[blk] & bit != 0 {
                piv = Some(i);
                break;
            }
        }
        let Some(p) = piv else { continue };
        mat.swap(r, p);
        for i in 0..mat.len() {
            if i != r && mat[i].0[blk] & bit != 0 {
                let (head, tail) = mat.split_at_mut(r.max(i));
                let (a, b) = if i < r {
                    (&mut head[i], &mut tail[0])
                } else {
                    (&mut head[r], &mut tail[0])
                };
                let (dst, src) = if i < r { (a, b) } else { (b, a) };
                for k in 0..blocks {
                    dst.0[k] ^= src.0[k];
                }
                dst.1 ^= src.1;
            }
        }
        pivots.push((r, var));
        r += 1;
        if r == mat.len() {
            break;
        }
    }
    // check consistency of zero rows
    for i in r..mat.len() {
        if mat[i].0.iter().all(|&b| b == 0) && mat[i].1 {
            return None;
        }
    }
    let mut x = vec![false; num_vars];
    for &(row, var) in &pivots {
        x[var] = mat[row].1;
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_inverse() {
        let mut a = CMat::zeros(2, 2);
        a[(0, 0)] = Complex64::new(1.0, 1.0);
        a[(0, 1)] = Complex64::new(2.0, 0.0);
        a[(1, 0)] = Complex64::new(0.0, -1.0);
        a[(1, 1)] = Complex64::new(3.0, 0.0);
        let d = cdet(&a).unwrap();
        // (1+i)*3 - 2*(-i) = 3 + 5i
        assert!((d - Complex64::new(3.0, 5.0)).norm() < 1e-12);
        let inv = cinvert(&a).unwrap();
        let mut prod = Complex64::new(0.0, 0.0);
        for k in 0..2 {
            prod += a[(0, k)] * inv[(k, 0)];
        }
        assert!((prod - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn svd_kernel() {
        // rank-1 matrix: kernel of dimension 1 in 2 columns
        let a = Mat::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0], vec![-1.0, -2.0]]);
        let ns = nullspace(&a, 1e-10);
        assert_eq!(ns.len(), 1);
        let v = &ns[0];
        // kernel direction is (2, -1)/sqrt(5)
        assert!((2.0 * v[0] - v[1]).abs() > 0.9);
        assert!((v[0] + 2.0 * v[1]).abs() < 1e-10);
        let r = a.matvec(v);
        assert!(r.iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn symmetric_eigs() {
        let a = Mat::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let mut ev = symmetric_eigenvalues(&a);
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ev[0] - 1.0).abs() < 1e-12);
        assert!((ev[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn gf2_solver() {
        // x0 ^ x1 = 1, x1 = 1, x0 ^ x2 = 0
        let rows = vec![
            (vec![0, 1], true),
            (vec![1], true),
            (vec![0, 2], false),
        ];
        let x = solve_gf2(3, &rows).unwrap();
        assert_eq!(x[0] ^ x[1], true);
        assert_eq!(x[1], true);
        assert_eq!(x[0] ^ x[2], false);
    }

    #[test]
    fn least_squares() {
        // overdetermined consistent system
        let a = Mat::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]);
        let b = vec![1.0, 2.0, 3.0];
        let x = lstsq(&a, &b).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-10);
        assert!((x[1] - 2.0).abs() < 1e-10);
    }
}
