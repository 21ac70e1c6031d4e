//! Planar geometry primitives: directions, lines with signed intercepts,
//! polygons, signed areas, and the quadratic area form on a tile's shape
//! space.
//!
//! Sign conventions are fixed once here and used by every other module:
//! a direction is an angle `theta` in `[0, pi)` and its unit normal is
//! `n = (-sin theta, cos theta)`. A point `p` lies on the line with
//! intercept `i` iff `p . n = i`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::{self, Mat};
use crate::EPS_GEOM;

pub const PI: f64 = core::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub enum GeomError {
    /// Fewer than 3 points in a polygonal path.
    InvalidInput,
    /// Two lines are parallel within tolerance.
    ParallelLines,
    /// Two consecutive edge directions of a tile shape are parallel.
    DegenerateDirections,
    /// `same_cone` was called on a vector with non-positive area form value.
    NotInCone,
}

impl fmt::Display for GeomError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeomError::InvalidInput => write!(f, "polygonal path needs at least 3 points"),
            GeomError::ParallelLines => write!(f, "lines are parallel within tolerance"),
            GeomError::DegenerateDirections => {
                write!(f, "two consecutive edge directions are parallel")
            }
            GeomError::NotInCone => write!(f, "vector is not in the positive-area cone"),
        }
    }
}

/// A point (or vector) in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the cross product `self x o`.
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        libm::hypot(self.x, self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    pub fn scale(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }

    /// Rotate counterclockwise by `phi` about the origin.
    pub fn rotate(self, phi: f64) -> Point {
        let (s, c) = (libm::sin(phi), libm::cos(phi));
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl core::ops::Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl core::ops::Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl core::ops::Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// An unoriented line direction: an angle in `[0, pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    theta: f64,
}

impl Direction {
    /// Reduce an arbitrary angle mod `pi` into `[0, pi)`.
    pub fn new(theta: f64) -> Self {
        let mut t = theta % PI;
        if t < 0.0 {
            t += PI;
        }
        // atan2 noise can land exactly on pi; fold it back to 0.
        if PI - t < 1e-12 {
            t = 0.0;
        }
        Direction { theta: t }
    }

    /// Direction of a (nonzero) vector, forgetting its sign.
    pub fn from_vector(v: Point) -> Self {
        Direction::new(libm::atan2(v.y, v.x))
    }

    pub fn theta(self) -> f64 {
        self.theta
    }

    /// Unit vector along the line: `(cos theta, sin theta)`.
    pub fn unit(self) -> Point {
        Point::new(libm::cos(self.theta), libm::sin(self.theta))
    }

    /// Unit normal `n = (-sin theta, cos theta)`.
    pub fn normal(self) -> Point {
        Point::new(-libm::sin(self.theta), libm::cos(self.theta))
    }

    pub fn approx_eq(self, o: Direction, tol: f64) -> bool {
        let d = libm::fabs(self.theta - o.theta);
        d < tol || libm::fabs(d - PI) < tol
    }
}

/// A line with a fixed direction and signed intercept: `{p : p . n = i}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub dir: Direction,
    pub intercept: f64,
}

impl Line {
    pub fn new(dir: Direction, intercept: f64) -> Self {
        Line { dir, intercept }
    }

    /// Line through two distinct points.
    pub fn through(p: Point, q: Point) -> Self {
        let dir = Direction::from_vector(q - p);
        Line::new(dir, p.dot(dir.normal()))
    }

    pub fn contains(&self, p: Point, tol: f64) -> bool {
        libm::fabs(p.dot(self.dir.normal()) - self.intercept) <= tol
    }

    /// Signed distance of `p` from the line (positive on the `+n` side).
    pub fn signed_distance(&self, p: Point) -> f64 {
        p.dot(self.dir.normal()) - self.intercept
    }

    /// A point on the line: `i * n`.
    pub fn base_point(&self) -> Point {
        self.dir.normal().scale(self.intercept)
    }
}

/// Intersection point of two lines, or `ParallelLines` if their directions
/// differ by less than `tol`.
pub fn intersect(l1: &Line, l2: &Line) -> Result<Point, GeomError> {
    intersect_tol(l1, l2, EPS_GEOM)
}

pub fn intersect_tol(l1: &Line, l2: &Line, tol: f64) -> Result<Point, GeomError> {
    let s = libm::sin(l2.dir.theta() - l1.dir.theta());
    if libm::fabs(s) < tol {
        return Err(GeomError::ParallelLines);
    }
    let (n1, n2) = (l1.dir.normal(), l2.dir.normal());
    let c = n1.dot(n2);
    let den = 1.0 - c * c;
    let a = (l1.intercept - c * l2.intercept) / den;
    let b = (l2.intercept - c * l1.intercept) / den;
    Ok(n1.scale(a) + n2.scale(b))
}

/// The intersection point as a linear function of the two intercepts:
/// `v(i1, i2) = i1 * u1 + i2 * u2`. Fails for near-parallel directions.
pub fn intersection_coeffs(
    d1: Direction,
    d2: Direction,
    tol: f64,
) -> Result<(Point, Point), GeomError> {
    let s = libm::sin(d2.theta() - d1.theta());
    if libm::fabs(s) < tol {
        return Err(GeomError::ParallelLines);
    }
    let (n1, n2) = (d1.normal(), d2.normal());
    let c = n1.dot(n2);
    let den = 1.0 - c * c;
    let u1 = (n1 - n2.scale(c)).scale(1.0 / den);
    let u2 = (n2 - n1.scale(c)).scale(1.0 / den);
    Ok((u1, u2))
}

/// Signed area of a closed polygonal path (the shoelace value, equal to the
/// integral of `x dy`); positive for counterclockwise convex polygons.
pub fn signed_area(path: &[Point]) -> Result<f64, GeomError> {
    if path.len() < 3 {
        return Err(GeomError::InvalidInput);
    }
    let mut a = 0.0;
    for k in 0..path.len() {
        let p = path[k];
        let q = path[(k + 1) % path.len()];
        a += p.cross(q);
    }
    Ok(0.5 * a)
}

/// Winding number of a closed polygonal path around `p`.
pub fn winding_number(path: &[Point], p: Point) -> i32 {
    let mut wn = 0i32;
    for k in 0..path.len() {
        let a = path[k];
        let b = path[(k + 1) % path.len()];
        if a.y <= p.y {
            if b.y > p.y && (b - a).cross(p - a) > 0.0 {
                wn += 1;
            }
        } else if b.y <= p.y && (b - a).cross(p - a) < 0.0 {
            wn -= 1;
        }
    }
    wn
}

/// A polygon given by its ordered vertex list (closed implicitly).
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    pub vertices: Vec<Point>,
}

impl Polygon {
    pub fn new(vertices: Vec<Point>) -> Self {
        Polygon { vertices }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn signed_area(&self) -> f64 {
        signed_area(&self.vertices).unwrap_or(0.0)
    }

    pub fn centroid(&self) -> Point {
        // area centroid; falls back to vertex mean for degenerate polygons
        let a = self.signed_area();
        if libm::fabs(a) < 1e-300 {
            let mut s = Point::default();
            for &v in &self.vertices {
                s = s + v;
            }
            return s.scale(1.0 / self.vertices.len() as f64);
        }
        let mut cx = 0.0;
        let mut cy = 0.0;
        for k in 0..self.vertices.len() {
            let p = self.vertices[k];
            let q = self.vertices[(k + 1) % self.vertices.len()];
            let w = p.cross(q);
            cx += (p.x + q.x) * w;
            cy += (p.y + q.y) * w;
        }
        Point::new(cx / (6.0 * a), cy / (6.0 * a))
    }

    /// Remove repeated and collinear vertices (keeping true corners only).
    pub fn canonicalized(&self, tol: f64) -> Polygon {
        let mut vs: Vec<Point> = Vec::new();
        for &v in &self.vertices {
            if vs.last().map_or(true, |&u| u.dist(v) > tol) {
                vs.push(v);
            }
        }
        while vs.len() > 1 && vs[0].dist(*vs.last().unwrap()) <= tol {
            vs.pop();
        }
        let mut out: Vec<Point> = Vec::new();
        let n = vs.len();
        for k in 0..n {
            let prev = vs[(k + n - 1) % n];
            let cur = vs[k];
            let next = vs[(k + 1) % n];
            let e1 = cur - prev;
            let e2 = next - cur;
            // drop vertices where the turn is degenerate (collinear edges)
            if libm::fabs(e1.cross(e2)) > tol * (e1.norm() * e2.norm()).max(tol) {
                out.push(cur);
            }
        }
        Polygon::new(out)
    }

    /// True if the polygon is convex and positively (ccw) oriented.
    pub fn is_convex_ccw(&self, tol: f64) -> bool {
        let n = self.vertices.len();
        if n < 3 {
            return false;
        }
        for k in 0..n {
            let a = self.vertices[k];
            let b = self.vertices[(k + 1) % n];
            let c = self.vertices[(k + 2) % n];
            if (b - a).cross(c - b) < -tol {
                return false;
            }
        }
        self.signed_area() > tol
    }

    pub fn contains(&self, p: Point) -> bool {
        winding_number(&self.vertices, p) != 0
    }

    pub fn translate(&self, v: Point) -> Polygon {
        Polygon::new(self.vertices.iter().map(|&p| p + v).collect())
    }

    pub fn reversed(&self) -> Polygon {
        let mut vs = self.vertices.clone();
        vs.reverse();
        Polygon::new(vs)
    }

    /// Edge list as (start, end) pairs in vertex order.
    pub fn edges(&self) -> Vec<(Point, Point)> {
        let n = self.vertices.len();
        (0..n)
            .map(|k| (self.vertices[k], self.vertices[(k + 1) % n]))
            .collect()
    }
}

/// Area of the intersection of two convex polygons (Sutherland-Hodgman
/// clipping). Both polygons must be convex and ccw.
pub fn convex_intersection_area(a: &Polygon, b: &Polygon) -> f64 {
    let mut poly: Vec<Point> = a.vertices.clone();
    let n = b.vertices.len();
    for k in 0..n {
        if poly.len() < 3 {
            return 0.0;
        }
        let p = b.vertices[k];
        let q = b.vertices[(k + 1) % n];
        let e = q - p;
        let mut out: Vec<Point> = Vec::new();
        let m = poly.len();
        for j in 0..m {
            let cur = poly[j];
            let nxt = poly[(j + 1) % m];
            let dc = e.cross(cur - p);
            let dn = e.cross(nxt - p);
            if dc >= 0.0 {
                out.push(cur);
            }
            if (dc > 0.0 && dn < 0.0) || (dc < 0.0 && dn > 0.0) {
                let t = dc / (dc - dn);
                out.push(cur + (nxt - cur).scale(t));
            }
        }
        poly = out;
    }
    if poly.len() < 3 {
        0.0
    } else {
        signed_area(&poly).unwrap_or(0.0)
    }
}

/// The shape of a tile: unit edge directions in ccw reference order plus real
/// coefficients, so the edges are `a_i z_i`. Closure `sum a_i z_i = 0` makes
/// the coefficient space an (n-2)-dimensional subspace.
#[derive(Debug, Clone)]
pub struct TileShape {
    pub edge_directions: Vec<Point>,
    pub coefficients: Vec<f64>,
}

impl TileShape {
    pub fn new(edge_directions: Vec<Point>, coefficients: Vec<f64>) -> Self {
        TileShape {
            edge_directions,
            coefficients,
        }
    }

    /// Extract the shape of a polygon: unit directions and positive lengths.
    pub fn from_polygon(poly: &Polygon) -> Self {
        let n = poly.vertices.len();
        let mut dirs = Vec::with_capacity(n);
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            let e = poly.vertices[(k + 1) % n] - poly.vertices[k];
            let len = e.norm();
            dirs.push(e.scale(1.0 / len));
            coeffs.push(len);
        }
        TileShape {
            edge_directions: dirs,
            coefficients: coeffs,
        }
    }

    pub fn n(&self) -> usize {
        self.edge_directions.len()
    }

    /// Residual of the closure condition `sum a_i z_i`.
    pub fn closure_residual(&self) -> Point {
        let mut s = Point::default();
        for (z, &a) in self.edge_directions.iter().zip(&self.coefficients) {
            s = s + z.scale(a);
        }
        s
    }

    /// Assemble the closed path with edges `a_i z_i` starting at `origin`.
    pub fn assemble(&self, origin: Point) -> Vec<Point> {
        let mut path = vec![origin];
        let mut p = origin;
        for k in 0..self.n() - 1 {
            p = p + self.edge_directions[k].scale(self.coefficients[k]);
            path.push(p);
        }
        path
    }

    pub fn edge_vectors(&self) -> Vec<Point> {
        self.edge_directions
            .iter()
            .zip(&self.coefficients)
            .map(|(z, &a)| z.scale(a))
            .collect()
    }
}

/// The quadratic area form `q_t` on the closure subspace of a tile's
/// coefficient space. For a convex n-gon's direction set its signature is
/// `(1, n-3)` and `{q > 0}` has exactly two convex components (the two tile
/// orientations).
#[derive(Debug, Clone)]
pub struct AreaForm {
    /// Full symmetric n x n matrix: `a^T Q a = signed area of the path`.
    pub full: Mat,
    /// Orthonormal basis of the closure subspace (n-2 columns of length n).
    pub basis: Vec<Vec<f64>>,
    /// Restricted symmetric form on the basis, (n-2) x (n-2).
    pub restricted: Mat,
}

impl AreaForm {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Evaluate q on a full coefficient vector (need not satisfy closure;
    /// the value is the signed area of the possibly-open path closed up).
    pub fn eval(&self, a: &[f64]) -> f64 {
        self.full.quad(a)
    }

    /// Polarization `B(x, y)` of the form.
    pub fn polarize(&self, x: &[f64], y: &[f64]) -> f64 {
        self.full.bilinear(x, y)
    }

    /// Signature `(pos, neg)` of the restricted form, with eigenvalues below
    /// `tol` relative to the largest magnitude counted as zero.
    pub fn signature(&self, tol: f64) -> (usize, usize) {
        let ev = linalg::symmetric_eigenvalues(&self.restricted);
        let scale = ev.iter().fold(0.0f64, |m, &e| m.max(libm::fabs(e)));
        let mut pos = 0;
        let mut neg = 0;
        for &e in &ev {
            if e > tol * scale {
                pos += 1;
            } else if e < -tol * scale {
                neg += 1;
            }
        }
        (pos, neg)
    }
}

/// Build the area form for a tile shape. The directions must be pairwise
/// non-parallel in consecutive cyclic positions.
pub fn area_form(shape: &TileShape) -> Result<AreaForm, GeomError> {
    let n = shape.n();
    if n < 3 {
        return Err(GeomError::InvalidInput);
    }
    for k in 0..n {
        let z1 = shape.edge_directions[k];
        let z2 = shape.edge_directions[(k + 1) % n];
        if libm::fabs(z1.cross(z2)) < EPS_GEOM {
            return Err(GeomError::DegenerateDirections);
        }
    }
    // q(a) = 1/2 sum_{i<j} (z_i x z_j) a_i a_j
    let mut full = Mat::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let c = shape.edge_directions[i].cross(shape.edge_directions[j]);
            full[(i, j)] = 0.25 * c;
            full[(j, i)] = 0.25 * c;
        }
    }
    // Deterministic orthonormal basis of {a : sum a_i z_i = 0}: Gram-Schmidt
    // over standard basis vectors in index order, after projecting out the
    // two closure constraints.
    let mut constraints: Vec<Vec<f64>> = vec![
        shape.edge_directions.iter().map(|z| z.x).collect(),
        shape.edge_directions.iter().map(|z| z.y).collect(),
    ];
    linalg::orthonormalize(&mut constraints, 1e-12);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for k in 0..n {
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        for c in constraints.iter().chain(basis.iter()) {
            let d = linalg::dot(&v, c);
            for (vi, ci) in v.iter_mut().zip(c) {
                *vi -= d * ci;
            }
        }
        let nrm = libm::sqrt(linalg::dot(&v, &v));
        if nrm > 1e-9 {
            for vi in v.iter_mut() {
                *vi /= nrm;
            }
            basis.push(v);
        }
        if basis.len() == n - 2 {
            break;
        }
    }
    let m = basis.len();
    let mut restricted = Mat::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            restricted[(i, j)] = full.bilinear(&basis[i], &basis[j]);
        }
    }
    Ok(AreaForm {
        full,
        basis,
        restricted,
    })
}

/// True iff `x` and `y` lie in the same component of `{q > 0}`, decided by
/// the sign of the polarization. Both must have `q > 0`.
pub fn same_cone(x: &[f64], y: &[f64], form: &AreaForm) -> Result<bool, GeomError> {
    if form.eval(x) <= 0.0 || form.eval(y) <= 0.0 {
        return Err(GeomError::NotInCone);
    }
    Ok(form.polarize(x, y) > 0.0)
}
