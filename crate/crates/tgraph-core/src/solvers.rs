//! The two reconstruction solvers: prescribing tile shapes within a
//! combinatorial class, and rebuilding a tiling from a weighted bipartite
//! graph plus a target polygon. Both reduce to small kernel computations
//! followed by a linear least-squares assembly over segment intercepts.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::dimer::kuhn_matching;
use crate::geom::{intersection_coeffs, Direction, GeomError, Point, Polygon, TileShape};
use crate::linalg::{clstsq, left_nullspace, lstsq, solve_gf2, LinalgError, Mat};
use crate::tiling::{build_graph, validate, BipartiteGraph, TGraph, Tiling, ValidationReport};
use crate::EPS_GEOM;

/// SVD relative threshold for kernel rank decisions.
pub const KERNEL_TOL: f64 = 1e-10;
/// Allowed inconsistency in the intercept assembly.
pub const ASSEMBLY_TOL: f64 = 1e-8;

#[derive(Debug)]
pub enum SolverError {
    /// Kernel dimension differed from 1 in a step that needs a line.
    RankDeficiency { step: &'static str, dim: usize },
    /// Assembled geometry inconsistent beyond tolerance.
    Assembly { residual: f64 },
    /// Prescribed shape directions do not match the reference tile.
    IncompatibleShapes { white: usize },
    /// Graph too large for the brute-force oracle.
    TooLarge(usize),
    /// No Kasteleyn signing exists (non-planar input data).
    NoSigning,
    /// Region edge count does not match the boundary identification.
    BoundaryMismatch { expected: usize, got: usize },
    /// Nonpositive edge weight.
    BadWeight { edge: usize },
    /// The assembled object is not a valid tiling of R.
    NotATiling(ValidationReport),
    Geom(GeomError),
    Linalg(LinalgError),
}

impl fmt::Display for SolverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverError::RankDeficiency { step, dim } => {
                write!(f, "kernel dimension {} in step {}", dim, step)
            }
            SolverError::Assembly { residual } => {
                write!(f, "assembly inconsistency {:e}", residual)
            }
            SolverError::IncompatibleShapes { white } => {
                write!(f, "shape for tile {} has mismatched directions", white)
            }
            SolverError::TooLarge(n) => write!(f, "graph too large ({} whites)", n),
            SolverError::NoSigning => write!(f, "no Kasteleyn signing found"),
            SolverError::BoundaryMismatch { expected, got } => {
                write!(f, "region has {} edges, graph expects {}", got, expected)
            }
            SolverError::BadWeight { edge } => write!(f, "nonpositive weight on edge {}", edge),
            SolverError::NotATiling(r) => {
                write!(f, "assembled object is not a tiling ({} findings)", r.findings.len())
            }
            SolverError::Geom(e) => write!(f, "{}", e),
            SolverError::Linalg(e) => write!(f, "{}", e),
        }
    }
}

impl From<GeomError> for SolverError {
    fn from(e: GeomError) -> Self {
        SolverError::Geom(e)
    }
}

impl From<LinalgError> for SolverError {
    fn from(e: LinalgError) -> Self {
        SolverError::Linalg(e)
    }
}

/// Per-white replacement shapes; directions must match the reference tiles'
/// edge directions (mod pi) in the same cyclic order.
#[derive(Debug, Clone)]
pub struct ShapeAssignment {
    pub shapes: Vec<TileShape>,
}

impl ShapeAssignment {
    pub fn identity(t: &Tiling) -> Self {
        ShapeAssignment {
            shapes: t.tiles.iter().map(TileShape::from_polygon).collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PrescribeResult {
    pub tiling: Tiling,
    /// Homothety factor per tile (may be negative or zero).
    pub a: Vec<f64>,
    /// True when some |a_w| fell below 1e-10 (a tile collapsed).
    pub degenerate: bool,
    /// Worst inconsistency of the intercept assembly.
    pub residual: f64,
}

/// The linear expression of each tile vertex in the segment intercepts:
/// vertex k of tile w is `i_{b1} u1 + i_{b2} u2` for the two incident lines.
fn vertex_coeffs(
    g: &TGraph,
    dirs: &[Direction],
) -> Result<Vec<Vec<(usize, Point, usize, Point)>>, SolverError> {
    let mut out = Vec::with_capacity(g.num_whites);
    for w in 0..g.num_whites {
        let bs: Vec<usize> = g.white_rot[w].iter().map(|&e| g.edges[e].black).collect();
        let m = bs.len();
        let mut verts = Vec::with_capacity(m);
        for k in 0..m {
            let b1 = bs[(k + m - 1) % m];
            let b2 = bs[k];
            let (u1, u2) = intersection_coeffs(dirs[b1], dirs[b2], EPS_GEOM)?;
            verts.push((b1, u1, b2, u2));
        }
        out.push(verts);
    }
    Ok(out)
}

/// Solve for all segment intercepts from prescribed tile edge vectors by
/// least squares over the vertex-difference equations, with the listed
/// intercepts pinned. Returns (intercepts, residual).
fn assemble_intercepts(
    g: &TGraph,
    dirs: &[Direction],
    edge_vectors: &[Vec<Point>],
    pinned: &[(usize, f64)],
) -> Result<(Vec<f64>, f64), SolverError> {
    let nb = g.num_blacks();
    let verts = vertex_coeffs(g, dirs)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    let mut push_eq = |coeffs: &[(usize, f64)], value: f64| {
        let mut row = vec![0.0; nb];
        for &(b, c) in coeffs {
            row[b] += c;
        }
        rows.push(row);
        rhs.push(value);
    };
    for w in 0..g.num_whites {
        let m = verts[w].len();
        for k in 0..m {
            let (a1, u1, a2, u2) = verts[w][k];
            let (b1, v1, b2, v2) = verts[w][(k + 1) % m];
            let e = edge_vectors[w][k];
            // v_{k+1} - v_k = e, componentwise
            push_eq(
                &[(b1, v1.x), (b2, v2.x), (a1, -u1.x), (a2, -u2.x)],
                e.x,
            );
            push_eq(
                &[(b1, v1.y), (b2, v2.y), (a1, -u1.y), (a2, -u2.y)],
                e.y,
            );
        }
    }
    for &(b, v) in pinned {
        push_eq(&[(b, 1.0)], v);
    }
    let a = Mat::from_rows(&rows);
    let x = lstsq(&a, &rhs)?;
    let mut residual: f64 = 0.0;
    for (row, &r) in rows.iter().zip(&rhs) {
        residual = residual.max(libm::fabs(crate::linalg::dot(row, &x) - r));
    }
    Ok((x, residual))
}

/// Rebuild the region polygon and tile paths from segment intercepts.
fn realize(
    g: &TGraph,
    dirs: &[Direction],
    x: &[f64],
) -> Result<(Polygon, Vec<Polygon>), SolverError> {
    let line = |b: usize| crate::geom::Line::new(dirs[b], x[b]);
    let n = g.boundary_blacks.len();
    let mut region = Vec::with_capacity(n);
    for i in 0..n {
        let b1 = g.boundary_blacks[(i + n - 1) % n];
        let b2 = g.boundary_blacks[i];
        region.push(crate::geom::intersect(&line(b1), &line(b2))?);
    }
    let verts = vertex_coeffs(g, dirs)?;
    let tiles = verts
        .iter()
        .map(|vs| {
            Polygon::new(
                vs.iter()
                    .map(|&(b1, u1, b2, u2)| u1.scale(x[b1]) + u2.scale(x[b2]))
                    .collect(),
            )
        })
        .collect();
    Ok((Polygon::new(region), tiles))
}

/// Replace each tile by a homothety of its prescribed shape so the result
/// still tiles a convex polygon with the same combinatorics: solve the left
/// kernel of the modified edge-vector matrix over the interior blacks for
/// the homothety factors, then assemble intercepts.
pub fn prescribe_shapes(
    t: &Tiling,
    shapes: &ShapeAssignment,
) -> Result<PrescribeResult, SolverError> {
    let g = build_graph(t).map_err(|_| SolverError::NotATiling(validate(t, EPS_GEOM)))?;
    let nw = g.num_whites;
    // check direction compatibility and build K' rows (complex edge vectors)
    let mut kp: Vec<Vec<(usize, Complex64)>> = Vec::with_capacity(nw);
    for w in 0..nw {
        let shape = &shapes.shapes[w];
        let bs: Vec<usize> = g.white_rot[w].iter().map(|&e| g.edges[e].black).collect();
        if shape.n() != bs.len() {
            return Err(SolverError::IncompatibleShapes { white: w });
        }
        let mut row = Vec::with_capacity(bs.len());
        for (k, &b) in bs.iter().enumerate() {
            let z = shape.edge_directions[k];
            if !Direction::from_vector(z).approx_eq(g.segments[b].line.dir, 1e-7) {
                return Err(SolverError::IncompatibleShapes { white: w });
            }
            let e = z.scale(shape.coefficients[k]);
            row.push((b, Complex64::new(e.x, e.y)));
        }
        kp.push(row);
    }
    // left kernel over interior blacks: sum_w a_w K'_{w,b} = 0
    let interior = g.interior_blacks();
    let mut col_of = vec![usize::MAX; g.num_blacks()];
    for (j, &b) in interior.iter().enumerate() {
        col_of[b] = j;
    }
    let mut m = Mat::zeros(2 * interior.len(), nw);
    for (w, row) in kp.iter().enumerate() {
        for &(b, v) in row {
            if col_of[b] != usize::MAX {
                m[(2 * col_of[b], w)] = v.re;
                m[(2 * col_of[b] + 1, w)] = v.im;
            }
        }
    }
    let kernel = crate::linalg::nullspace(&m, KERNEL_TOL);
    if kernel.len() != 1 {
        return Err(SolverError::RankDeficiency { step: "shape-kernel", dim: kernel.len() });
    }
    let mut a = kernel.into_iter().next().unwrap();
    if a[0] < 0.0 {
        for v in a.iter_mut() {
            *v = -*v;
        }
    }
    // scaled edge vectors s_w = a_w t'_w
    let dirs: Vec<Direction> = g.segments.iter().map(|s| s.line.dir).collect();
    let edge_vectors: Vec<Vec<Point>> = kp
        .iter()
        .enumerate()
        .map(|(w, row)| {
            row.iter()
                .map(|&(_, v)| Point::new(v.re * a[w], v.im * a[w]))
                .collect()
        })
        .collect();
    // pin two non-parallel boundary intercepts to kill the translation gauge
    let bb = &g.boundary_blacks;
    let second = bb
        .iter()
        .copied()
        .find(|&b| !dirs[b].approx_eq(dirs[bb[0]], 1e-9))
        .ok_or(SolverError::Geom(GeomError::DegenerateDirections))?;
    let pinned = [(bb[0], 0.0), (second, 0.0)];
    let (x, residual) = assemble_intercepts(&g, &dirs, &edge_vectors, &pinned)?;
    if residual > ASSEMBLY_TOL {
        return Err(SolverError::Assembly { residual });
    }
    let (region, tiles) = realize(&g, &dirs, &x)?;
    // normalize total area to the reference region's
    let total: f64 = tiles.iter().map(|p| p.signed_area()).sum();
    let target = t.region.signed_area();
    let lambda = libm::sqrt(libm::fabs(target / total));
    let scale_poly = |p: &Polygon| {
        Polygon::new(p.vertices.iter().map(|v| v.scale(lambda)).collect())
    };
    let tiling = Tiling::new(
        scale_poly(&region),
        tiles.iter().map(scale_poly).collect(),
    );
    for v in a.iter_mut() {
        *v *= lambda;
    }
    let degenerate = a.iter().any(|v| libm::fabs(*v) <= 1e-10);
    Ok(PrescribeResult { tiling, a, degenerate, residual })
}

const ORACLE_CAP: usize = 20;

/// Brute-force 2-nondegeneracy: every pair of edges with distinct endpoints,
/// at most one of them touching a boundary black, extends to a matching
/// saturating the whites that uses at most one boundary black beyond the
/// pair's own. (For a pair of interior edges the saturating count forces
/// exactly one boundary black in total, the usual dimer-cover convention.)
pub fn check_2_nondegenerate(g: &BipartiteGraph) -> Result<bool, SolverError> {
    let nw = g.num_whites;
    if nw > ORACLE_CAP {
        return Err(SolverError::TooLarge(nw));
    }
    let boundary: Vec<usize> =
        (0..g.num_blacks).filter(|&b| g.boundary[b]).collect();
    let edges: Vec<(usize, usize)> = (0..nw)
        .flat_map(|w| g.adj[w].iter().map(move |&b| (w, b)))
        .collect();
    for (i, &(w1, b1)) in edges.iter().enumerate() {
        for &(w2, b2) in &edges[i + 1..] {
            if w1 == w2 || b1 == b2 {
                continue;
            }
            if g.boundary[b1] && g.boundary[b2] {
                continue;
            }
            let mut extendable = false;
            for &beta in &boundary {
                if beta == b1 || beta == b2 {
                    continue;
                }
                let allowed = |b: usize| -> bool {
                    b != b1 && b != b2 && (!g.boundary[b] || b == beta)
                };
                let rest: Vec<usize> =
                    (0..nw).filter(|&w| w != w1 && w != w2).collect();
                let adj: Vec<Vec<usize>> = rest
                    .iter()
                    .map(|&w| g.adj[w].iter().copied().filter(|&b| allowed(b)).collect())
                    .collect();
                if kuhn_matching(&adj, g.num_blacks).is_some() {
                    extendable = true;
                    break;
                }
            }
            if !extendable {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Real +-1 Kasteleyn signs for the combinatorial graph: around every
/// bounded face of length 2l the number of negative edges is l+1 mod 2.
fn kasteleyn_signs(g: &TGraph) -> Result<Vec<f64>, SolverError> {
    let rows: Vec<(Vec<usize>, bool)> = g
        .faces
        .iter()
        .map(|face| (face.clone(), (face.len() / 2 + 1) % 2 == 1))
        .collect();
    let bits = solve_gf2(g.edges.len(), &rows).ok_or(SolverError::NoSigning)?;
    Ok(bits.into_iter().map(|b| if b { -1.0 } else { 1.0 }).collect())
}

/// Rebuild a tiling of `region` from the combinatorics of `g` and positive
/// edge weights `nu` (indexed like `g.edges`). Boundary blacks are
/// identified with the region's edges in order. Three linear steps fix the
/// gauge; intercept assembly then fixes the geometry.
pub fn reconstruct_from_graph(
    g: &TGraph,
    nu: &[f64],
    region: &Polygon,
) -> Result<Tiling, SolverError> {
    let region = region.canonicalized(EPS_GEOM);
    let n = g.boundary_blacks.len();
    if region.len() != n {
        return Err(SolverError::BoundaryMismatch { expected: n, got: region.len() });
    }
    for (e, &v) in nu.iter().enumerate() {
        if v <= 0.0 {
            return Err(SolverError::BadWeight { edge: e });
        }
    }
    let signs = kasteleyn_signs(g)?;
    let (nw, nb) = (g.num_whites, g.num_blacks());
    let mut k = Mat::zeros(nw, nb);
    for (e, edge) in g.edges.iter().enumerate() {
        k[(edge.white, edge.black)] = signs[e] * nu[e];
    }
    // step 1: left kernel on the interior columns
    let interior = g.interior_blacks();
    let mut kint = Mat::zeros(nw, interior.len());
    for (j, &b) in interior.iter().enumerate() {
        for w in 0..nw {
            kint[(w, j)] = k[(w, b)];
        }
    }
    let kernel = left_nullspace(&kint, KERNEL_TOL);
    if kernel.len() != 1 {
        return Err(SolverError::RankDeficiency { step: "left-kernel", dim: kernel.len() });
    }
    let v_w = kernel.into_iter().next().unwrap();
    // step 2: boundary column sums match the region's edge vectors
    let mut d_b = vec![Complex64::new(0.0, 0.0); nb];
    for (i, &b) in g.boundary_blacks.iter().enumerate() {
        let p = region.vertices[i];
        let q = region.vertices[(i + 1) % n];
        let qi = Complex64::new((q - p).x, (q - p).y);
        let s: f64 = (0..nw).map(|w| v_w[w] * k[(w, b)]).sum();
        if libm::fabs(s) < 1e-14 {
            return Err(SolverError::RankDeficiency { step: "boundary-sum", dim: 0 });
        }
        d_b[b] = qi / s;
    }
    // step 3: interior entries of D_B from vanishing row sums of K D_B
    {
        let mut a = crate::linalg::CMat::zeros(nw, interior.len());
        let mut rhs = vec![Complex64::new(0.0, 0.0); nw];
        for w in 0..nw {
            for (j, &b) in interior.iter().enumerate() {
                a[(w, j)] = Complex64::new(k[(w, b)], 0.0);
            }
            for &b in &g.boundary_blacks {
                rhs[w] -= k[(w, b)] * d_b[b];
            }
        }
        let sol = clstsq(&a, &rhs)?;
        for (j, &b) in interior.iter().enumerate() {
            d_b[b] = sol[j];
        }
        // the system has one redundant row; verify it was consistent
        let mut residual: f64 = 0.0;
        for w in 0..nw {
            let mut s = Complex64::new(0.0, 0.0);
            for b in 0..nb {
                s += k[(w, b)] * d_b[b];
            }
            residual = residual.max(s.norm());
        }
        if residual > ASSEMBLY_TOL {
            return Err(SolverError::Assembly { residual });
        }
    }
    // edge vectors and segment directions of the new picture
    let mut edge_vectors: Vec<Vec<Point>> = Vec::with_capacity(nw);
    let mut dirs: Vec<Option<Direction>> = vec![None; nb];
    for w in 0..nw {
        let mut row = Vec::new();
        for &e in &g.white_rot[w] {
            let b = g.edges[e].black;
            let v = Complex64::new(v_w[w], 0.0) * k[(w, b)] * d_b[b];
            let p = Point::new(v.re, v.im);
            let d = Direction::from_vector(p);
            match dirs[b] {
                None => dirs[b] = Some(d),
                Some(d0) => {
                    if !d0.approx_eq(d, 1e-7) {
                        return Err(SolverError::Assembly { residual: f64::INFINITY });
                    }
                }
            }
            row.push(p);
        }
        edge_vectors.push(row);
    }
    let dirs: Vec<Direction> = dirs
        .into_iter()
        .map(|d| d.ok_or(SolverError::RankDeficiency { step: "direction", dim: 0 }))
        .collect::<Result<_, _>>()?;
    // pin boundary intercepts to the region's edge lines
    let pinned: Vec<(usize, f64)> = g
        .boundary_blacks
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            let p = region.vertices[i];
            (b, p.dot(dirs[b].normal()))
        })
        .collect();
    let (x, residual) = assemble_intercepts(g, &dirs, &edge_vectors, &pinned)?;
    if residual > ASSEMBLY_TOL {
        return Err(SolverError::Assembly { residual });
    }
    let (_, tiles) = realize(g, &dirs, &x)?;
    let t = Tiling::new(region, tiles);
    let report = validate(&t, EPS_GEOM);
    if !report.is_clean() {
        return Err(SolverError::NotATiling(report));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimer::{face_weights, kasteleyn_from_tiling};
    use crate::fixtures;
    use crate::rng::SplitMix64;
    use crate::tiling::combinatorially_equivalent;

    fn max_vertex_error(t1: &Tiling, t2: &Tiling) -> f64 {
        // after aligning by translation of the region's first vertex
        let d = t2.region.vertices[0] - t1.region.vertices[0];
        let mut err: f64 = 0.0;
        for (a, b) in t1.tiles.iter().zip(&t2.tiles) {
            for (p, q) in a.vertices.iter().zip(&b.vertices) {
                err = err.max((*p + d).dist(*q));
            }
        }
        err
    }

    #[test]
    fn identity_shapes_round_trip() {
        for name in ["SQ2", "SQ3", "PIN5", "TRI4", "STACK3"] {
            let t = fixtures::by_name(name).unwrap();
            let r = prescribe_shapes(&t, &ShapeAssignment::identity(&t)).unwrap();
            assert!(!r.degenerate);
            let spread: f64 = {
                let m = r.a.iter().sum::<f64>() / r.a.len() as f64;
                r.a.iter().map(|v| libm::fabs(v - m)).fold(0.0, f64::max)
            };
            assert!(spread < 1e-9, "{}: a = {:?}", name, r.a);
            assert!(max_vertex_error(&t, &r.tiling) < 1e-8, "{}", name);
        }
    }

    #[test]
    fn sq2_aspect_ratios() {
        let t = fixtures::sq2();
        let mut shapes = ShapeAssignment::identity(&t);
        // keep directions, change the height/width ratios
        let scale_edges = |s: &mut TileShape, xf: f64, yf: f64| {
            for (d, c) in s.edge_directions.iter().zip(s.coefficients.iter_mut()) {
                *c *= if libm::fabs(d.x) > 0.5 { xf } else { yf };
            }
        };
        scale_edges(&mut shapes.shapes[0], 1.0, 3.0);
        scale_edges(&mut shapes.shapes[1], 2.0, 1.0);
        let r = prescribe_shapes(&t, &shapes).unwrap();
        assert!(!r.degenerate);
        let report = validate(&r.tiling, EPS_GEOM);
        assert!(report.is_clean());
        // widths equalize: a_1 * w1' = a_2 * w2'
        let w1 = shapes.shapes[0].coefficients[0] * r.a[0];
        let w2 = shapes.shapes[1].coefficients[0] * r.a[1];
        assert!((w1 - w2).abs() < 1e-9);
        let g1 = build_graph(&t).unwrap();
        let g2 = build_graph(&r.tiling).unwrap();
        assert!(combinatorially_equivalent(&g1, &g2));
    }

    #[test]
    fn pin5_random_shapes() {
        let t = fixtures::pin5();
        let mut rng = SplitMix64::new(17);
        let g1 = build_graph(&t).unwrap();
        for _ in 0..10 {
            let mut shapes = ShapeAssignment::identity(&t);
            for s in &mut shapes.shapes {
                let f = 0.5 + rng.uniform();
                // rectangles: scale one direction pair
                for (d, c) in s.edge_directions.iter().zip(s.coefficients.iter_mut()) {
                    if libm::fabs(d.x) > 0.5 {
                        *c *= f;
                    }
                }
            }
            let r = prescribe_shapes(&t, &shapes).unwrap();
            assert!(r.residual <= 1e-9);
            if !r.degenerate {
                let report = validate(&r.tiling, EPS_GEOM);
                if report.is_clean() {
                    let g2 = build_graph(&r.tiling).unwrap();
                    assert!(combinatorially_equivalent(&g1, &g2));
                }
            }
        }
    }

    #[test]
    fn two_nondegeneracy_oracle() {
        for name in ["SQ2", "SQ3", "PIN5", "TRI4", "STACK3"] {
            let t = fixtures::by_name(name).unwrap();
            let g = build_graph(&t).unwrap();
            assert!(check_2_nondegenerate(&g.bipartite()).unwrap(), "{}", name);
        }
        assert!(!check_2_nondegenerate(&fixtures::gadget_2deg()).unwrap());
        // a degree-2 white blocks the pair taking both of its neighbors
        let bad = BipartiteGraph {
            num_whites: 3,
            num_blacks: 4,
            boundary: vec![false, false, true, true],
            adj: vec![vec![0, 1], vec![0, 1, 2, 3], vec![0, 1, 2, 3]],
        };
        assert!(!check_2_nondegenerate(&bad).unwrap());
    }

    #[test]
    fn reconstruction_round_trips() {
        for name in ["SQ2", "SQ3", "PIN5", "TRI4", "STACK3"] {
            let t = fixtures::by_name(name).unwrap();
            let g = build_graph(&t).unwrap();
            let nu: Vec<f64> = g.edges.iter().map(|e| e.weight.norm()).collect();
            let r = reconstruct_from_graph(&g, &nu, &t.region).unwrap();
            assert!(max_vertex_error(&t, &r) < 1e-9, "{}", name);
        }
    }

    #[test]
    fn modified_weights_move_the_cut() {
        let t = fixtures::sq2();
        let g = build_graph(&t).unwrap();
        let bottom = if t.tiles[0].centroid().y < 0.4 { 0 } else { 1 };
        let mut nu: Vec<f64> = g.edges.iter().map(|e| e.weight.norm()).collect();
        // double the bottom tile's interior-edge weight
        let interior = g.interior_blacks()[0];
        for (i, e) in g.edges.iter().enumerate() {
            if e.white == bottom && e.black == interior {
                nu[i] *= 2.0;
            }
        }
        let r = reconstruct_from_graph(&g, &nu, &t.region).unwrap();
        assert!(validate(&r, EPS_GEOM).is_clean());
        let cut = build_graph(&r).unwrap();
        let b = cut.interior_blacks()[0];
        let y = cut.segments[b].line.intercept;
        assert!((y - 0.4).abs() > 1e-3, "cut should move, got {}", y);
        // face weights of the output equal the input's
        let k2 = kasteleyn_from_tiling(&cut).unwrap();
        let fw2 = face_weights(&k2, &cut).unwrap();
        // recompute input face weights from nu over g's faces
        for (f, face) in g.faces.iter().enumerate() {
            let mut x = 1.0;
            for (pos, &e) in face.iter().enumerate() {
                x = if pos % 2 == 0 { x * nu[e] } else { x / nu[e] };
            }
            let got = fw2.x[f];
            assert!(
                (got - x).abs() <= 1e-9 * x || (1.0 / got - x).abs() <= 1e-9 * x,
                "face {}: {} vs {}",
                f,
                got,
                x
            );
        }
    }
}
