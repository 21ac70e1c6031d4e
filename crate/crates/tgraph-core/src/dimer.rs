//! Kasteleyn algebra for t-graphs: the complex edge-vector matrix, the
//! brute-force matching oracle, gauge and face weights, the canonical
//! (lowest-vertex) matching, and local dimer statistics through the inverse
//! matrix.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::geom::Point;
use crate::linalg::{cdet, cinvert, CMat, LinalgError};
use crate::tiling::{TGraph, Tiling};

#[derive(Debug, Clone, PartialEq)]
pub enum DimerError {
    /// A bounded face's alternating product has the wrong sign or a too-large
    /// imaginary part (relative residue given).
    SignProperty { face: usize, residue: f64 },
    /// Enumeration requested on a graph with more whites than the cap.
    TooLarge(usize),
    /// A probability came out with imaginary part above tolerance.
    NotReal(f64),
    /// Zero weight on an edge that must be invertible.
    ZeroWeight { white: usize, black: usize },
    /// Gauge comparison between matrices of different support.
    SupportMismatch,
    /// No rotation angle produced unique lowest vertices / unique matches.
    DegenerateRotation,
    NotBoundary(usize),
    Linalg(LinalgError),
}

impl fmt::Display for DimerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DimerError::SignProperty { face, residue } => {
                write!(f, "face {} violates the sign property (residue {:e})", face, residue)
            }
            DimerError::TooLarge(n) => write!(f, "graph too large for enumeration ({} whites)", n),
            DimerError::NotReal(im) => write!(f, "probability has imaginary residue {:e}", im),
            DimerError::ZeroWeight { white, black } => {
                write!(f, "zero weight on edge ({}, {})", white, black)
            }
            DimerError::SupportMismatch => write!(f, "matrices have different support"),
            DimerError::DegenerateRotation => {
                write!(f, "no rotation with unique lowest vertices found")
            }
            DimerError::NotBoundary(b) => write!(f, "black {} is not a boundary segment", b),
            DimerError::Linalg(e) => write!(f, "linear algebra failure: {}", e),
        }
    }
}

impl From<LinalgError> for DimerError {
    fn from(e: LinalgError) -> Self {
        DimerError::Linalg(e)
    }
}

/// |W| x |B| complex matrix; entry (w, b) is the counterclockwise edge
/// vector of tile w along segment b, zero when not adjacent.
#[derive(Debug, Clone)]
pub struct KasteleynMatrix {
    pub entries: CMat,
}

impl KasteleynMatrix {
    pub fn num_whites(&self) -> usize {
        self.entries.rows
    }

    pub fn num_blacks(&self) -> usize {
        self.entries.cols
    }

    /// Square submatrix keeping the given black columns (in order).
    pub fn restricted(&self, cols: &[usize]) -> CMat {
        self.entries.select_columns(cols)
    }
}

/// Alternating product around a bounded face: entries at even positions of
/// the cycle over entries at odd positions. Faces start with a white-to-black
/// dart, so even positions pair each white with the black it precedes.
pub fn face_alternating_product(k: &KasteleynMatrix, g: &TGraph, face: usize) -> Complex64 {
    let mut num = Complex64::new(1.0, 0.0);
    let mut den = Complex64::new(1.0, 0.0);
    for (pos, &e) in g.faces[face].iter().enumerate() {
        let v = k.entries[(g.edges[e].white, g.edges[e].black)];
        if pos % 2 == 0 {
            num *= v;
        } else {
            den *= v;
        }
    }
    num / den
}

/// Relative tolerance for the sign property residue.
pub const SIGN_TOL: f64 = 1e-9;

/// Build the Kasteleyn matrix of a t-graph and verify the sign property on
/// every bounded face: a face of length 2l has a real alternating product of
/// sign (-1)^(l+1).
pub fn kasteleyn_from_tiling(g: &TGraph) -> Result<KasteleynMatrix, DimerError> {
    let mut entries = CMat::zeros(g.num_whites, g.num_blacks());
    for e in &g.edges {
        entries[(e.white, e.black)] = e.weight;
    }
    let k = KasteleynMatrix { entries };
    for f in 0..g.faces.len() {
        let p = face_alternating_product(&k, g, f);
        let l = g.faces[f].len() / 2;
        let want = if l % 2 == 1 { 1.0 } else { -1.0 };
        let residue = libm::fabs(p.im) / p.norm().max(1e-300);
        if residue > SIGN_TOL || p.re * want <= 0.0 {
            return Err(DimerError::SignProperty { face: f, residue });
        }
    }
    Ok(k)
}

/// A perfect matching on the whites against a chosen black subset.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    /// (white, black) pairs, sorted by white.
    pub edges: Vec<(usize, usize)>,
    /// Product of entry moduli.
    pub weight: f64,
}

impl Matching {
    pub fn black_of(&self, w: usize) -> Option<usize> {
        self.edges.iter().find(|&&(mw, _)| mw == w).map(|&(_, b)| b)
    }
}

#[derive(Debug, Clone)]
pub struct Enumeration {
    pub matchings: Vec<Matching>,
    /// Sum of matching weights (entry moduli).
    pub z: f64,
    /// Permutation-signed sum of complex entry products; equals det of the
    /// Kasteleyn matrix restricted to the kept columns in ascending order.
    pub signed_sum: Complex64,
}

const ENUM_CAP: usize = 20;

/// Exhaustive backtracking enumeration of perfect matchings of the whites to
/// the blacks not in `removed_blacks`.
pub fn enumerate_matchings(
    k: &KasteleynMatrix,
    g: &TGraph,
    removed_blacks: &[usize],
) -> Result<Enumeration, DimerError> {
    let nw = g.num_whites;
    if nw > ENUM_CAP {
        return Err(DimerError::TooLarge(nw));
    }
    let kept: Vec<usize> = (0..g.num_blacks()).filter(|b| !removed_blacks.contains(b)).collect();
    let mut col_of = vec![usize::MAX; g.num_blacks()];
    for (j, &b) in kept.iter().enumerate() {
        col_of[b] = j;
    }
    // adjacency restricted to kept blacks; whites in ascending-degree order
    let adj: Vec<Vec<usize>> = (0..nw)
        .map(|w| {
            g.white_rot[w]
                .iter()
                .map(|&e| g.edges[e].black)
                .filter(|&b| col_of[b] != usize::MAX)
                .collect()
        })
        .collect();
    let mut order: Vec<usize> = (0..nw).collect();
    order.sort_by_key(|&w| adj[w].len());

    let mut used = vec![false; kept.len()];
    let mut assign = vec![usize::MAX; nw];
    let mut matchings = Vec::new();
    let mut z = 0.0;
    let mut signed_sum = Complex64::new(0.0, 0.0);

    fn go(
        depth: usize,
        order: &[usize],
        adj: &[Vec<usize>],
        col_of: &[usize],
        k: &KasteleynMatrix,
        used: &mut [bool],
        assign: &mut [usize],
        matchings: &mut Vec<Matching>,
        z: &mut f64,
        signed_sum: &mut Complex64,
    ) {
        if depth == order.len() {
            let mut edges: Vec<(usize, usize)> =
                assign.iter().enumerate().map(|(w, &b)| (w, b)).collect();
            edges.sort_unstable();
            let mut weight = 1.0;
            let mut prod = Complex64::new(1.0, 0.0);
            for &(w, b) in &edges {
                let v = k.entries[(w, b)];
                weight *= v.norm();
                prod *= v;
            }
            // permutation sign of white -> column, whites ascending
            let perm: Vec<usize> = edges.iter().map(|&(_, b)| col_of[b]).collect();
            let mut inversions = 0usize;
            for i in 0..perm.len() {
                for j in (i + 1)..perm.len() {
                    if perm[i] > perm[j] {
                        inversions += 1;
                    }
                }
            }
            let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
            *z += weight;
            *signed_sum += prod * sign;
            matchings.push(Matching { edges, weight });
            return;
        }
        let w = order[depth];
        for &b in &adj[w] {
            let c = col_of[b];
            if !used[c] {
                used[c] = true;
                assign[w] = b;
                go(depth + 1, order, adj, col_of, k, used, assign, matchings, z, signed_sum);
                assign[w] = usize::MAX;
                used[c] = false;
            }
        }
    }

    go(
        0, &order, &adj, &col_of, k, &mut used, &mut assign, &mut matchings, &mut z,
        &mut signed_sum,
    );
    matchings.sort_by(|a, b| a.edges.cmp(&b.edges));
    Ok(Enumeration { matchings, z, signed_sum })
}

#[derive(Debug, Clone)]
pub struct KasteleynReport {
    pub det_modulus: f64,
    pub matching_sum: f64,
    pub rel_error: f64,
    pub num_matchings: usize,
}

/// Check |det K0| against the weighted matching count, where K0 keeps the
/// interior columns plus the boundary column `b0`.
pub fn verify_kasteleyn(
    k: &KasteleynMatrix,
    g: &TGraph,
    b0: usize,
) -> Result<KasteleynReport, DimerError> {
    if !g.is_boundary(b0) {
        return Err(DimerError::NotBoundary(b0));
    }
    let cols = g.b0_columns(b0);
    let removed: Vec<usize> = (0..g.num_blacks()).filter(|b| !cols.contains(b)).collect();
    let en = enumerate_matchings(k, g, &removed)?;
    let det = cdet(&k.restricted(&cols))?;
    let det_modulus = det.norm();
    let rel_error = libm::fabs(det_modulus - en.z) / en.z.max(1e-300);
    Ok(KasteleynReport {
        det_modulus,
        matching_sum: en.z,
        rel_error,
        num_matchings: en.matchings.len(),
    })
}

/// Maximum bipartite matching by augmenting paths; returns the matched black
/// for every left vertex, or None if no perfect matching exists.
pub(crate) fn kuhn_matching(adj: &[Vec<usize>], num_right: usize) -> Option<Vec<usize>> {
    let n = adj.len();
    let mut match_right = vec![usize::MAX; num_right];

    fn try_augment(
        w: usize,
        adj: &[Vec<usize>],
        visited: &mut [bool],
        match_right: &mut [usize],
    ) -> bool {
        for &b in &adj[w] {
            if !visited[b] {
                visited[b] = true;
                if match_right[b] == usize::MAX
                    || try_augment(match_right[b], adj, visited, match_right)
                {
                    match_right[b] = w;
                    return true;
                }
            }
        }
        false
    }

    for w in 0..n {
        let mut visited = vec![false; num_right];
        if !try_augment(w, adj, &mut visited, &mut match_right) {
            return None;
        }
    }
    let mut out = vec![usize::MAX; n];
    for (b, &w) in match_right.iter().enumerate() {
        if w != usize::MAX {
            out[w] = b;
        }
    }
    Some(out)
}

/// The lowest-vertex matching: rotate the plane so that the boundary segment
/// `b0` is horizontal with the region above, tilted by a small positive
/// angle so every tile has a unique lowest vertex; match each tile to the
/// segment whose lower endpoint that vertex is (boundary segments other than
/// `b0` are excluded).
pub fn canonical_matching(
    t: &Tiling,
    g: &TGraph,
    b0: usize,
) -> Result<Matching, DimerError> {
    let edge = g.segments[b0].boundary_edge.ok_or(DimerError::NotBoundary(b0))?;
    let p = g.region.vertices[edge];
    let q = g.region.vertices[(edge + 1) % g.region.len()];
    let base = -libm::atan2((q - p).y, (q - p).x);
    let scale = t
        .region
        .vertices
        .iter()
        .map(|v| v.norm())
        .fold(1.0, f64::max);

    'delta: for j in 0..40 {
        let delta = 1e-3 * libm::pow(2.0, -(j as f64));
        let phi = base + delta;
        let rot = |pt: Point| pt.rotate(phi);

        let mut candidates: Vec<Vec<usize>> = Vec::with_capacity(g.num_whites);
        for w in 0..g.num_whites {
            // unique lowest vertex of the rotated tile
            let ys: Vec<f64> = t.tiles[w].vertices.iter().map(|&v| rot(v).y).collect();
            let (mut i0, mut y0) = (0, f64::INFINITY);
            for (i, &y) in ys.iter().enumerate() {
                if y < y0 {
                    i0 = i;
                    y0 = y;
                }
            }
            let gap = ys
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != i0)
                .map(|(_, &y)| y - y0)
                .fold(f64::INFINITY, f64::min);
            if gap < 1e-12 * scale {
                continue 'delta;
            }
            let vw = t.tiles[w].vertices[i0];

            let mut cands = Vec::new();
            for &e in &g.white_rot[w] {
                let b = g.edges[e].black;
                if g.is_boundary(b) && b != b0 {
                    continue;
                }
                let s = &g.segments[b];
                let lower = if rot(s.p0).y < rot(s.p1).y { s.p0 } else { s.p1 };
                if lower.dist(vw) <= 1e-7 * scale {
                    cands.push(b);
                }
            }
            if cands.is_empty() {
                continue 'delta;
            }
            candidates.push(cands);
        }
        // usually each tile has a unique candidate; at a T with several legs
        // the tiles between the legs share lower endpoints, so resolve with
        // an augmenting-path matching over the candidate sets
        let Some(assign) = kuhn_matching(&candidates, g.num_blacks()) else {
            continue 'delta;
        };
        let k = kasteleyn_from_tiling(g)?;
        let mut edges: Vec<(usize, usize)> =
            assign.iter().enumerate().map(|(w, &b)| (w, b)).collect();
        let weight = edges.iter().map(|&(w, b)| k.entries[(w, b)].norm()).product();
        edges.sort_unstable();
        return Ok(Matching { edges, weight });
    }
    Err(DimerError::DegenerateRotation)
}

/// Positive weight attached to each bounded face: the modulus of the
/// alternating product of entry moduli. Gauge invariant.
#[derive(Debug, Clone)]
pub struct FaceWeights {
    pub x: Vec<f64>,
}

pub fn face_weights(k: &KasteleynMatrix, g: &TGraph) -> Result<FaceWeights, DimerError> {
    let mut x = Vec::with_capacity(g.faces.len());
    for f in 0..g.faces.len() {
        let mut num = 1.0;
        let mut den = 1.0;
        for (pos, &e) in g.faces[f].iter().enumerate() {
            let v = k.entries[(g.edges[e].white, g.edges[e].black)].norm();
            if v == 0.0 {
                return Err(DimerError::ZeroWeight {
                    white: g.edges[e].white,
                    black: g.edges[e].black,
                });
            }
            if pos % 2 == 0 {
                num *= v;
            } else {
                den *= v;
            }
        }
        x.push(num / den);
    }
    Ok(FaceWeights { x })
}

/// If `k2 = D_W k1 D_B` for diagonal complex matrices, return the diagonals
/// (found by propagating ratios over a spanning forest of the support graph
/// and verifying the remaining edges).
pub fn gauge_equivalent(
    k1: &KasteleynMatrix,
    k2: &KasteleynMatrix,
) -> Result<Option<(Vec<Complex64>, Vec<Complex64>)>, DimerError> {
    let (nw, nb) = (k1.num_whites(), k1.num_blacks());
    if nw != k2.num_whites() || nb != k2.num_blacks() {
        return Err(DimerError::SupportMismatch);
    }
    for w in 0..nw {
        for b in 0..nb {
            if (k1.entries[(w, b)].norm() == 0.0) != (k2.entries[(w, b)].norm() == 0.0) {
                return Err(DimerError::SupportMismatch);
            }
        }
    }
    let ratio = |w: usize, b: usize| k2.entries[(w, b)] / k1.entries[(w, b)];
    let mut dw: Vec<Option<Complex64>> = vec![None; nw];
    let mut db: Vec<Option<Complex64>> = vec![None; nb];
    for w0 in 0..nw {
        if dw[w0].is_some() {
            continue;
        }
        dw[w0] = Some(Complex64::new(1.0, 0.0));
        let mut stack = vec![(w0, true)];
        while let Some((v, is_white)) = stack.pop() {
            if is_white {
                for b in 0..nb {
                    if k1.entries[(v, b)].norm() != 0.0 && db[b].is_none() {
                        db[b] = Some(ratio(v, b) / dw[v].unwrap());
                        stack.push((b, false));
                    }
                }
            } else {
                for w in 0..nw {
                    if k1.entries[(w, v)].norm() != 0.0 && dw[w].is_none() {
                        dw[w] = Some(ratio(w, v) / db[v].unwrap());
                        stack.push((w, true));
                    }
                }
            }
        }
    }
    let scale = k2.entries.data.iter().map(|v| v.norm()).fold(1e-300, f64::max);
    for w in 0..nw {
        for b in 0..nb {
            if k1.entries[(w, b)].norm() == 0.0 {
                continue;
            }
            let lhs = dw[w].unwrap() * k1.entries[(w, b)] * db[b].unwrap();
            if (lhs - k2.entries[(w, b)]).norm() > 1e-10 * scale {
                return Ok(None);
            }
        }
    }
    Ok(Some((
        dw.into_iter().map(|v| v.unwrap()).collect(),
        db.into_iter().map(|v| v.unwrap_or(Complex64::new(1.0, 0.0))).collect(),
    )))
}

/// Tolerance on the imaginary part of dimer probabilities.
pub const PROB_IM_TOL: f64 = 1e-9;

/// Probability that the edge (w, b) occurs in a random matching of W against
/// B_int + b0: K(w,b) Kinv(b,w). Zero for absent edges and for boundary
/// blacks other than b0.
pub fn edge_probability(
    k: &KasteleynMatrix,
    g: &TGraph,
    b0: usize,
    w: usize,
    b: usize,
) -> Result<f64, DimerError> {
    let cols = g.b0_columns(b0);
    let Some(j) = cols.iter().position(|&c| c == b) else {
        return Ok(0.0);
    };
    if k.entries[(w, b)].norm() == 0.0 {
        return Ok(0.0);
    }
    let k0 = k.restricted(&cols);
    let inv = cinvert(&k0)?;
    let p = k0[(w, j)] * inv[(j, w)];
    if libm::fabs(p.im) > PROB_IM_TOL {
        return Err(DimerError::NotReal(p.im));
    }
    Ok(p.re)
}

/// Probability that both (w1, b1) and (w2, b2) occur:
/// K(w1,b1) K(w2,b2) det [[Kinv(b1,w1), Kinv(b2,w1)], [Kinv(b1,w2), Kinv(b2,w2)]].
pub fn pair_probability(
    k: &KasteleynMatrix,
    g: &TGraph,
    b0: usize,
    e1: (usize, usize),
    e2: (usize, usize),
) -> Result<f64, DimerError> {
    let ((w1, b1), (w2, b2)) = (e1, e2);
    if w1 == w2 || b1 == b2 {
        return Ok(0.0);
    }
    let cols = g.b0_columns(b0);
    let (Some(j1), Some(j2)) = (
        cols.iter().position(|&c| c == b1),
        cols.iter().position(|&c| c == b2),
    ) else {
        return Ok(0.0);
    };
    if k.entries[(w1, b1)].norm() == 0.0 || k.entries[(w2, b2)].norm() == 0.0 {
        return Ok(0.0);
    }
    let k0 = k.restricted(&cols);
    let inv = cinvert(&k0)?;
    let d = inv[(j1, w1)] * inv[(j2, w2)] - inv[(j2, w1)] * inv[(j1, w2)];
    let p = k0[(w1, j1)] * k0[(w2, j2)] * d;
    if libm::fabs(p.im) > PROB_IM_TOL {
        return Err(DimerError::NotReal(p.im));
    }
    Ok(p.re)
}
