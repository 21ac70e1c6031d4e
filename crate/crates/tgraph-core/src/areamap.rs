//! The intercepts-to-areas map. Tile vertices are intersections of
//! consecutive incident segment lines, hence linear in the intercepts, so
//! every tile area is an exact quadratic polynomial. The module precomputes
//! those quadratics once per reference tiling and exposes the map, its
//! Jacobian (a real Kasteleyn matrix), Newton inversion within an
//! orientation sector, and the per-edge "blowing air" proportions.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::geom::{
    area_form, intersection_coeffs, same_cone, AreaForm, GeomError, Point, TileShape,
};
use crate::linalg::{solve, LinalgError, Mat};
use crate::tiling::{TGraph, Tiling};
use crate::EPS_GEOM;

#[derive(Debug, Clone, PartialEq)]
pub enum AreaMapError {
    /// A bounded face is not a quadrilateral; the map's Jacobian theory
    /// needs quad faces.
    NonQuadFace { face: usize, len: usize },
    /// Two consecutive lines of a tile are (near-)parallel.
    ParallelLines { white: usize },
    /// Newton did not reach tolerance.
    NotConverged { iterations: usize, residual: f64 },
    /// A Newton step could not stay inside the orientation sector.
    SectorBoundary,
    /// The starting point is not in the requested sector.
    InfeasibleStart,
    Geom(GeomError),
    Linalg(LinalgError),
}

impl fmt::Display for AreaMapError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AreaMapError::NonQuadFace { face, len } => {
                write!(f, "face {} has length {}, expected 4", face, len)
            }
            AreaMapError::ParallelLines { white } => {
                write!(f, "consecutive parallel lines at tile {}", white)
            }
            AreaMapError::NotConverged { iterations, residual } => {
                write!(f, "no convergence after {} iterations (residual {:e})", iterations, residual)
            }
            AreaMapError::SectorBoundary => write!(f, "step left the orientation sector"),
            AreaMapError::InfeasibleStart => write!(f, "starting point outside the sector"),
            AreaMapError::Geom(e) => write!(f, "{}", e),
            AreaMapError::Linalg(e) => write!(f, "{}", e),
        }
    }
}

impl From<GeomError> for AreaMapError {
    fn from(e: GeomError) -> Self {
        AreaMapError::Geom(e)
    }
}

impl From<LinalgError> for AreaMapError {
    fn from(e: LinalgError) -> Self {
        AreaMapError::Linalg(e)
    }
}

/// A point depending affinely on the intercept variables.
#[derive(Debug, Clone)]
struct AffinePoint {
    base: Point,
    terms: Vec<(usize, Point)>,
}

impl AffinePoint {
    fn eval(&self, x: &[f64]) -> Point {
        let mut p = self.base;
        for &(j, u) in &self.terms {
            p = p + u.scale(x[j]);
        }
        p
    }
}

/// One tile's area as a quadratic: `A(x) = x' H x / 2 + g' x + c`.
#[derive(Debug, Clone)]
pub struct TileQuad {
    pub h: Mat,
    pub g: Vec<f64>,
    pub c: f64,
}

impl TileQuad {
    pub fn eval(&self, x: &[f64]) -> f64 {
        0.5 * self.h.quad(x) + crate::linalg::dot(&self.g, x) + self.c
    }

    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        let mut v = self.h.matvec(x);
        for (vi, gi) in v.iter_mut().zip(&self.g) {
            *vi += gi;
        }
        v
    }
}

/// The precomputed intercepts-to-areas map for a reference tiling. The
/// variables are a chosen subset of blacks; all other segment lines are
/// frozen at their reference intercepts.
#[derive(Debug, Clone)]
pub struct AreaMap {
    /// Black ids of the variables, in column order.
    pub vars: Vec<usize>,
    /// Reference intercepts of the variables.
    pub x_ref: Vec<f64>,
    pub tiles: Vec<TileQuad>,
    vertex_exprs: Vec<Vec<AffinePoint>>,
    /// Reference unit directions of each tile's edges (ccw order).
    pub shapes: Vec<TileShape>,
    pub forms: Vec<AreaForm>,
    pub num_whites: usize,
}

impl AreaMap {
    /// Variables over B_int plus the chosen boundary segment `b0`.
    pub fn for_psi(t: &Tiling, g: &TGraph, b0: usize) -> Result<AreaMap, AreaMapError> {
        Self::build(t, g, g.b0_columns(b0), true)
    }

    /// Variables over B_int only (all boundary lines fixed).
    pub fn for_homology(t: &Tiling, g: &TGraph) -> Result<AreaMap, AreaMapError> {
        Self::build(t, g, g.interior_blacks(), true)
    }

    /// Variables over every black; the Jacobian at the reference is the
    /// full real Kasteleyn matrix.
    pub fn for_full(t: &Tiling, g: &TGraph) -> Result<AreaMap, AreaMapError> {
        Self::build(t, g, (0..g.num_blacks()).collect(), false)
    }

    fn build(
        _t: &Tiling,
        g: &TGraph,
        vars: Vec<usize>,
        require_quads: bool,
    ) -> Result<AreaMap, AreaMapError> {
        if require_quads {
            for (f, face) in g.faces.iter().enumerate() {
                if face.len() != 4 {
                    return Err(AreaMapError::NonQuadFace { face: f, len: face.len() });
                }
            }
        }
        let mut var_of = vec![usize::MAX; g.num_blacks()];
        for (j, &b) in vars.iter().enumerate() {
            var_of[b] = j;
        }
        let nv = vars.len();
        let x_ref: Vec<f64> = vars.iter().map(|&b| g.segments[b].line.intercept).collect();

        let mut tiles = Vec::with_capacity(g.num_whites);
        let mut vertex_exprs = Vec::with_capacity(g.num_whites);
        for w in 0..g.num_whites {
            let bs: Vec<usize> = g.white_rot[w].iter().map(|&e| g.edges[e].black).collect();
            let m = bs.len();
            // vertex k sits between edge k-1 and edge k
            let mut verts: Vec<AffinePoint> = Vec::with_capacity(m);
            for k in 0..m {
                let b1 = bs[(k + m - 1) % m];
                let b2 = bs[k];
                let (d1, d2) = (g.segments[b1].line.dir, g.segments[b2].line.dir);
                let (u1, u2) = intersection_coeffs(d1, d2, EPS_GEOM)
                    .map_err(|_| AreaMapError::ParallelLines { white: w })?;
                let mut base = Point::default();
                let mut terms = Vec::new();
                for (b, u) in [(b1, u1), (b2, u2)] {
                    if var_of[b] != usize::MAX {
                        terms.push((var_of[b], u));
                    } else {
                        base = base + u.scale(g.segments[b].line.intercept);
                    }
                }
                verts.push(AffinePoint { base, terms });
            }
            // expand the shoelace sum into quadratic coefficients
            let mut quad = Mat::zeros(nv, nv);
            let mut lin = vec![0.0; nv];
            let mut cst = 0.0;
            for k in 0..m {
                let p = &verts[k];
                let q = &verts[(k + 1) % m];
                cst += 0.5 * p.base.cross(q.base);
                for &(i, u) in &p.terms {
                    lin[i] += 0.5 * u.cross(q.base);
                }
                for &(j, u) in &q.terms {
                    lin[j] += 0.5 * p.base.cross(u);
                }
                for &(i, ui) in &p.terms {
                    for &(j, uj) in &q.terms {
                        quad[(i, j)] += 0.5 * ui.cross(uj);
                    }
                }
            }
            let mut h = Mat::zeros(nv, nv);
            for i in 0..nv {
                for j in 0..nv {
                    h[(i, j)] = if i == j {
                        2.0 * quad[(i, i)]
                    } else {
                        quad[(i, j)] + quad[(j, i)]
                    };
                }
            }
            tiles.push(TileQuad { h, g: lin, c: cst });
            vertex_exprs.push(verts);
        }

        let mut shapes = Vec::with_capacity(g.num_whites);
        let mut forms = Vec::with_capacity(g.num_whites);
        for w in 0..g.num_whites {
            // reference directions follow the incident segments, which agree
            // with the tile's ccw edge order up to vertex alignment
            let path: Vec<Point> = {
                let m = vertex_exprs[w].len();
                (0..m).map(|k| vertex_exprs[w][k].eval(&x_ref)).collect()
            };
            let shape = TileShape::from_polygon(&crate::geom::Polygon::new(path));
            forms.push(area_form(&shape)?);
            shapes.push(shape);
        }

        Ok(AreaMap {
            vars,
            x_ref,
            tiles,
            vertex_exprs,
            shapes,
            forms,
            num_whites: g.num_whites,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    /// Tile areas at the intercepts `x`.
    pub fn psi(&self, x: &[f64]) -> Vec<f64> {
        self.tiles.iter().map(|t| t.eval(x)).collect()
    }

    /// Analytic Jacobian: rows = whites, columns = variables. At a point
    /// where the tiles form a tiling this is a real Kasteleyn matrix with
    /// entries of modulus = edge length.
    pub fn d_psi(&self, x: &[f64]) -> Mat {
        let mut j = Mat::zeros(self.num_whites, self.num_vars());
        for (w, t) in self.tiles.iter().enumerate() {
            for (jj, v) in t.grad(x).into_iter().enumerate() {
                j[(w, jj)] = v;
            }
        }
        j
    }

    /// The closed path of tile `w` at intercepts `x`.
    pub fn tile_path(&self, w: usize, x: &[f64]) -> Vec<Point> {
        self.vertex_exprs[w].iter().map(|v| v.eval(x)).collect()
    }

    /// Edge coefficients of tile `w` against its reference directions.
    pub fn tile_coefficients(&self, w: usize, x: &[f64]) -> Vec<f64> {
        let path = self.tile_path(w, x);
        let m = path.len();
        (0..m)
            .map(|k| (path[(k + 1) % m] - path[k]).dot(self.shapes[w].edge_directions[k]))
            .collect()
    }

    /// True iff every tile's coefficient vector lies in the cone prescribed
    /// by `sigma` (the reference cone for +1, its point reflection for -1).
    pub fn in_sector(&self, x: &[f64], sigma: &[i8]) -> bool {
        for w in 0..self.num_whites {
            let a = self.tile_coefficients(w, x);
            let refc: Vec<f64> = self.shapes[w]
                .coefficients
                .iter()
                .map(|&v| v * sigma[w] as f64)
                .collect();
            match same_cone(&a, &refc, &self.forms[w]) {
                Ok(true) => {}
                _ => return false,
            }
        }
        true
    }

    /// Invert the map within the sector `sigma` by damped Newton from `x0`.
    pub fn psi_inverse(
        &self,
        target: &[f64],
        x0: &[f64],
        sigma: &[i8],
    ) -> Result<Vec<f64>, AreaMapError> {
        if !self.in_sector(x0, sigma) {
            return Err(AreaMapError::InfeasibleStart);
        }
        let mut x = x0.to_vec();
        let resid = |x: &[f64]| -> (Vec<f64>, f64, f64) {
            let mut r = self.psi(x);
            let mut sq = 0.0;
            let mut inf: f64 = 0.0;
            for (ri, ti) in r.iter_mut().zip(target) {
                *ri -= ti;
                sq += *ri * *ri;
                inf = inf.max(libm::fabs(*ri));
            }
            (r, sq, inf)
        };
        for iter in 0..200 {
            let (r, sq, inf) = resid(&x);
            if inf <= 1e-10 {
                return Ok(x);
            }
            let j = self.d_psi(&x);
            let neg_r: Vec<f64> = r.iter().map(|v| -v).collect();
            let dx = solve(&j, &neg_r)?;
            let mut step = 1.0;
            loop {
                let xt: Vec<f64> =
                    x.iter().zip(&dx).map(|(xi, di)| xi + step * di).collect();
                if self.in_sector(&xt, sigma) {
                    let (_, sq_t, _) = resid(&xt);
                    if sq_t <= (1.0 - 1e-4 * step) * sq {
                        x = xt;
                        break;
                    }
                }
                step *= 0.5;
                if step < 1e-12 {
                    return Err(AreaMapError::SectorBoundary);
                }
            }
            let _ = iter;
        }
        let (_, _, inf) = resid(&x);
        Err(AreaMapError::NotConverged { iterations: 200, residual: inf })
    }
}

/// Real matrix inverse through the complex LU path.
pub(crate) fn invert_real(a: &Mat) -> Result<Mat, LinalgError> {
    use num_complex::Complex64;
    let mut c = crate::linalg::CMat::zeros(a.rows, a.cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            c[(i, j)] = Complex64::new(a[(i, j)], 0.0);
        }
    }
    let inv = crate::linalg::cinvert(&c)?;
    let mut out = Mat::zeros(a.rows, a.cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            out[(i, j)] = inv[(i, j)].re;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct BlowAirReport {
    /// (black, dA_w/di_b * di_b/dA_w) per incident variable edge of w; the
    /// products are the dimer edge probabilities and sum to 1.
    pub products: Vec<(usize, f64)>,
    pub min_product: f64,
    pub sum: f64,
}

/// Sign agreement between dA_w/di_b and di_b/dA_w for every variable edge of
/// tile `w`: the products (K_psi)_{w,b} (K_psi^{-1})_{b,w} are nonnegative
/// and sum to 1 over b.
pub fn blow_air_check(map: &AreaMap, x: &[f64], w: usize) -> Result<BlowAirReport, AreaMapError> {
    let k = map.d_psi(x);
    if k.rows != k.cols {
        return Err(AreaMapError::Linalg(LinalgError::ShapeMismatch));
    }
    let inv = invert_real(&k)?;
    let mut products = Vec::new();
    let mut min_product = f64::INFINITY;
    let mut sum = 0.0;
    for j in 0..map.num_vars() {
        if k[(w, j)] != 0.0 {
            let p = k[(w, j)] * inv[(j, w)];
            min_product = min_product.min(p);
            sum += p;
            products.push((map.vars[j], p));
        }
    }
    Ok(BlowAirReport { products, min_product, sum })
}
