//! Homology tilings: closed per-tile paths obtained by letting the interior
//! intercepts roam over all of R^{B_int}, the winding-number invariant that
//! characterizes them, the concave maximization that prescribes signed
//! areas within an orientation sector, and the sector explorer.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::areamap::{AreaMap, AreaMapError};
use crate::geom::{winding_number, Point, Polygon};
use crate::linalg::{dot, solve, LinalgError, Mat};
use crate::rng::SplitMix64;
use crate::tiling::{build_graph, Tiling, TilingError};
use crate::EPS_GEOM;

/// Intercept-norm threshold beyond which a solve is reported as diverging
/// (solutions "escaping to infinity" in parallel-edge instances).
pub const DIVERGENCE_LIMIT: f64 = 1e6;
/// Sector explorers larger than this are refused (2^|W| blowup).
pub const SECTOR_CAP: usize = 16;

#[derive(Debug)]
pub enum HomologyError {
    /// Areas not strictly positive or not summing to area(R).
    BadAreas,
    /// The starting intercepts are not in the requested sector.
    InfeasibleStart,
    /// Newton failed to reach the criticality tolerance.
    NotConverged { residual: f64 },
    /// Intercepts left the trust region (evidence of an empty sector).
    Diverged,
    /// The winding invariant failed at a probe point.
    WindingViolation { x: f64, y: f64 },
    /// Too many tiles for sector enumeration.
    TooLarge(usize),
    AreaMap(AreaMapError),
    Tiling(TilingError),
    Linalg(LinalgError),
}

impl fmt::Display for HomologyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HomologyError::BadAreas => write!(f, "areas must be positive and sum to area(R)"),
            HomologyError::InfeasibleStart => write!(f, "start is outside the requested sector"),
            HomologyError::NotConverged { residual } => {
                write!(f, "solver stalled at residual {:e}", residual)
            }
            HomologyError::Diverged => write!(f, "intercepts diverged"),
            HomologyError::WindingViolation { x, y } => {
                write!(f, "winding invariant failed at ({}, {})", x, y)
            }
            HomologyError::TooLarge(n) => write!(f, "too many tiles for enumeration ({})", n),
            HomologyError::AreaMap(e) => write!(f, "{}", e),
            HomologyError::Tiling(e) => write!(f, "{}", e),
            HomologyError::Linalg(e) => write!(f, "{}", e),
        }
    }
}

impl From<AreaMapError> for HomologyError {
    fn from(e: AreaMapError) -> Self {
        HomologyError::AreaMap(e)
    }
}

impl From<TilingError> for HomologyError {
    fn from(e: TilingError) -> Self {
        HomologyError::Tiling(e)
    }
}

impl From<LinalgError> for HomologyError {
    fn from(e: LinalgError) -> Self {
        HomologyError::Linalg(e)
    }
}

/// The space R^{B_int} of homology tilings over a reference tiling: the
/// boundary lines are frozen, the interior intercepts are free.
#[derive(Debug, Clone)]
pub struct HomologySpace {
    pub map: AreaMap,
    pub region: Polygon,
    /// Diameter-scale of the region, used for step sizes and thresholds.
    pub scale: f64,
}

impl HomologySpace {
    pub fn new(t: &Tiling) -> Result<HomologySpace, HomologyError> {
        let g = build_graph(t)?;
        let map = AreaMap::for_homology(t, &g)?;
        let scale = t
            .region
            .vertices
            .iter()
            .flat_map(|a| t.region.vertices.iter().map(move |b| a.dist(*b)))
            .fold(0.0, f64::max);
        Ok(HomologySpace { map, region: t.region.clone(), scale })
    }

    pub fn num_tiles(&self) -> usize {
        self.map.num_whites
    }

    pub fn num_vars(&self) -> usize {
        self.map.num_vars()
    }

    pub fn x_ref(&self) -> &[f64] {
        &self.map.x_ref
    }
}

/// A point of R^{B_int} together with its derived tile paths and signed
/// areas.
#[derive(Debug, Clone)]
pub struct HomologyTiling {
    pub intercepts: Vec<f64>,
    pub tiles: Vec<Vec<Point>>,
    pub q: Vec<f64>,
}

/// Evaluate the homology tiling at `x` and verify the winding invariant
/// (total winding 1 inside R, 0 outside) at 16 pseudo-random probe points,
/// plus the integrated form sum q_w = area(R).
pub fn homology_tiles(space: &HomologySpace, x: &[f64]) -> Result<HomologyTiling, HomologyError> {
    let tiles: Vec<Vec<Point>> = (0..space.num_tiles())
        .map(|w| space.map.tile_path(w, x))
        .collect();
    let q = space.map.psi(x);
    let total: f64 = q.iter().sum();
    if libm::fabs(total - space.region.signed_area()) > 1e-9 * (1.0 + space.scale * space.scale) {
        return Err(HomologyError::WindingViolation { x: f64::NAN, y: f64::NAN });
    }
    // probe points in an inflated bounding box of R
    let c = space.region.centroid();
    let mut rng = SplitMix64::new(0x77_17_d1);
    let mut checked = 0usize;
    while checked < 16 {
        let p = Point::new(
            c.x + (2.0 * rng.uniform() - 1.0) * space.scale,
            c.y + (2.0 * rng.uniform() - 1.0) * space.scale,
        );
        // skip points too close to any involved line (general position)
        let near_edge = tiles.iter().chain(core::iter::once(&space.region.vertices)).any(|path| {
            let m = path.len();
            (0..m).any(|k| {
                let (a, b) = (path[k], path[(k + 1) % m]);
                let e = b - a;
                let len = e.norm();
                len > EPS_GEOM && libm::fabs((p - a).cross(e)) / len < 1e-7 * space.scale
            })
        });
        if near_edge {
            continue;
        }
        let expected = if space.region.contains(p) { 1 } else { 0 };
        let got: i32 = tiles.iter().map(|t| winding_number(t, p)).sum();
        if got != expected {
            return Err(HomologyError::WindingViolation { x: p.x, y: p.y });
        }
        checked += 1;
    }
    Ok(HomologyTiling { intercepts: x.to_vec(), tiles, q })
}

fn check_areas(space: &HomologySpace, a: &[f64]) -> Result<(), HomologyError> {
    if a.len() != space.num_tiles() || a.iter().any(|&v| v <= 0.0) {
        return Err(HomologyError::BadAreas);
    }
    let sum: f64 = a.iter().sum();
    if libm::fabs(sum - space.region.signed_area()) > 1e-9 * (1.0 + space.scale * space.scale) {
        return Err(HomologyError::BadAreas);
    }
    Ok(())
}

/// One damped-Newton maximization of Q = sum A_w log q_w inside the sector.
fn newton_solve(
    space: &HomologySpace,
    a: &[f64],
    sigma: &[i8],
    x0: &[f64],
) -> Result<Vec<f64>, HomologyError> {
    let map = &space.map;
    let nv = map.num_vars();
    let nw = space.num_tiles();
    let objective = |x: &[f64]| -> f64 {
        map.psi(x)
            .iter()
            .zip(a)
            .map(|(&q, &aw)| aw * libm::log(q))
            .sum()
    };
    let gradient = |x: &[f64]| -> Vec<f64> {
        let q = map.psi(x);
        let j = map.d_psi(x);
        let mut grad = vec![0.0; nv];
        for w in 0..nw {
            let r = a[w] / q[w];
            for (gj, v) in grad.iter_mut().zip(j.row(w)) {
                *gj += r * v;
            }
        }
        grad
    };
    let mut x = x0.to_vec();
    let amax = a.iter().fold(0.0f64, |m, &v| m.max(v));
    let grad_tol = 1e-12 * (1.0 + amax) / (1.0 + space.scale);
    // Armijo progress on Q stalls below its floating noise; a stall with
    // the gradient already far below the acceptance tolerance is converged
    let stall_tol = 1e-10 * (1.0 + amax);
    for _ in 0..500 {
        if x.iter().any(|v| libm::fabs(*v) > DIVERGENCE_LIMIT) {
            return Err(HomologyError::Diverged);
        }
        let q = map.psi(&x);
        let grad = gradient(&x);
        let ginf = grad.iter().fold(0.0f64, |m, &v| m.max(libm::fabs(v)));
        if ginf <= grad_tol {
            return Ok(x);
        }
        // exact Hessian: sum (A/q) H_w - (A/q^2) g_w g_w^T
        let j = map.d_psi(&x);
        let mut hess = Mat::zeros(nv, nv);
        for w in 0..nw {
            let r1 = a[w] / q[w];
            let r2 = a[w] / (q[w] * q[w]);
            let gw = j.row(w);
            for i in 0..nv {
                for k in 0..nv {
                    hess[(i, k)] += r1 * map.tiles[w].h[(i, k)] - r2 * gw[i] * gw[k];
                }
            }
        }
        let neg_g: Vec<f64> = grad.iter().map(|v| -v).collect();
        let dx = solve(&hess, &neg_g)?;
        let q0 = objective(&x);
        let slope = dot(&grad, &dx);
        let gsq: f64 = grad.iter().map(|v| v * v).sum();
        let mut step = 1.0;
        loop {
            let xt: Vec<f64> = x.iter().zip(&dx).map(|(xi, di)| xi + step * di).collect();
            // accept on sufficient increase of Q, or, near the optimum
            // where Q improvements drown in floating noise, on sufficient
            // decrease of the gradient norm (Newton on the critical-point
            // system, quadratically convergent)
            if map.in_sector(&xt, sigma) {
                let armijo = objective(&xt) >= q0 + 1e-4 * step * slope;
                let gsq_t: f64 = gradient(&xt).iter().map(|v| v * v).sum();
                if armijo || gsq_t <= (1.0 - 1e-4 * step) * gsq {
                    x = xt;
                    break;
                }
            }
            step *= 0.5;
            if step < 1e-14 {
                if ginf <= stall_tol {
                    return Ok(x);
                }
                return Err(HomologyError::NotConverged { residual: ginf });
            }
        }
    }
    let q = map.psi(&x);
    let residual = q
        .iter()
        .zip(a)
        .map(|(&qi, &ai)| libm::fabs(qi - ai))
        .fold(0.0, f64::max);
    Err(HomologyError::NotConverged { residual })
}

/// Find the unique homology tiling with prescribed positive areas and tile
/// orientations by maximizing the strictly concave Q = sum A_w log q_w.
/// At the optimum the criticality condition sum_w (A_w/q_w) K_{w,b} = 0
/// holds and q_w = A_w (global scale 1 because the areas sum to area(R)).
pub fn solve_homology(
    space: &HomologySpace,
    a: &[f64],
    sigma: &[i8],
    x0: &[f64],
) -> Result<HomologyTiling, HomologyError> {
    check_areas(space, a)?;
    if !space.map.in_sector(x0, sigma) {
        return Err(HomologyError::InfeasibleStart);
    }
    let x = match newton_solve(space, a, sigma, x0) {
        Ok(x) => x,
        Err(HomologyError::Linalg(_)) => {
            // degenerate-kernel areas: perturb and polish from the
            // perturbed optimum (limit of solutions with generic areas)
            let mut ap = a.to_vec();
            let mut rng = SplitMix64::new(0x9e3779b9);
            let mut shift = 0.0;
            let keep = ap.len() - 1;
            for v in ap.iter_mut().take(keep) {
                let d = *v * 1e-9 * (2.0 * rng.uniform() - 1.0);
                *v += d;
                shift += d;
            }
            *ap.last_mut().unwrap() -= shift;
            let xp = newton_solve(space, &ap, sigma, x0)?;
            newton_solve(space, a, sigma, &xp)?
        }
        Err(e) => return Err(e),
    };
    homology_tiles(space, &x)
}

/// Cone-membership margin of `x` for the sector `sigma`: positive iff `x`
/// is strictly inside the sector.
fn sector_margin(space: &HomologySpace, x: &[f64], sigma: &[i8]) -> f64 {
    let map = &space.map;
    let mut margin = f64::INFINITY;
    for w in 0..map.num_whites {
        let coeffs = map.tile_coefficients(w, x);
        let refc: Vec<f64> = map.shapes[w]
            .coefficients
            .iter()
            .map(|&v| v * sigma[w] as f64)
            .collect();
        let q = map.forms[w].eval(&coeffs);
        let b = map.forms[w].polarize(&coeffs, &refc);
        margin = margin.min(q).min(b);
    }
    margin
}

/// Search for a point of the sector V_T(sigma): fixed-seed multistart
/// followed by a pattern search maximizing the cone-membership margin.
pub fn find_sector_point(space: &HomologySpace, sigma: &[i8]) -> Option<Vec<f64>> {
    let nv = space.num_vars();
    let threshold = 1e-9 * (1.0 + space.scale * space.scale);
    let x_ref = space.x_ref().to_vec();
    if sector_margin(space, &x_ref, sigma) > threshold {
        return Some(x_ref);
    }
    let mut rng = SplitMix64::new(0x5ec7_0b17);
    let improve = |x: &mut Vec<f64>, rng_step: f64| -> f64 {
        let mut best = sector_margin(space, x, sigma);
        let mut step = rng_step;
        while step > 1e-9 * space.scale {
            let mut moved = false;
            for jv in 0..nv {
                for s in [step, -step] {
                    let old = x[jv];
                    x[jv] = old + s;
                    let m = sector_margin(space, x, sigma);
                    if m > best {
                        best = m;
                        moved = true;
                    } else {
                        x[jv] = old;
                    }
                }
            }
            if !moved {
                step *= 0.5;
            }
            if best > threshold {
                return best;
            }
        }
        best
    };
    for trial in 0..400 {
        let spread = space.scale * [0.25, 0.75, 2.0, 6.0][trial % 4];
        let mut x: Vec<f64> = x_ref
            .iter()
            .map(|&v| v + spread * rng.normal())
            .collect();
        if improve(&mut x, 0.5 * spread) > threshold {
            return Some(x);
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectorStatus {
    Solved,
    Empty,
    NotConverged,
}

#[derive(Debug, Clone)]
pub struct SectorReport {
    pub sigma: Vec<i8>,
    pub status: SectorStatus,
    /// True when the solution lives in -R: it was obtained by solving the
    /// point-reflected sector -sigma and rotating the picture by pi.
    pub reflected: bool,
    pub solution: Option<Vec<f64>>,
    /// max_w |q_w - A_w| at the reported solution.
    pub residual: f64,
}

/// For every orientation vector sigma, look for the homology tiling of R or
/// of -R with areas `a` and orientations sigma. The -R solutions are exactly
/// the solutions of the reflected sector -sigma over R, rotated by pi.
pub fn enumerate_sectors(
    space: &HomologySpace,
    a: &[f64],
) -> Result<Vec<SectorReport>, HomologyError> {
    let nw = space.num_tiles();
    if nw > SECTOR_CAP {
        return Err(HomologyError::TooLarge(nw));
    }
    check_areas(space, a)?;
    let mut reports = Vec::with_capacity(1usize << nw);
    for code in 0..(1usize << nw) {
        // sigma in lexicographic order with +1 < -1 read left to right
        let sigma: Vec<i8> = (0..nw)
            .map(|w| if code & (1 << (nw - 1 - w)) == 0 { 1 } else { -1 })
            .collect();
        let neg: Vec<i8> = sigma.iter().map(|&s| -s).collect();
        let mut report = SectorReport {
            sigma: sigma.clone(),
            status: SectorStatus::Empty,
            reflected: false,
            solution: None,
            residual: f64::INFINITY,
        };
        for (try_sigma, reflected) in [(&sigma, false), (&neg, true)] {
            if let Some(x0) = find_sector_point(space, try_sigma) {
                match solve_homology(space, a, try_sigma, &x0) {
                    Ok(h) => {
                        report.residual = h
                            .q
                            .iter()
                            .zip(a)
                            .map(|(&q, &aw)| libm::fabs(q - aw))
                            .fold(0.0, f64::max);
                        report.status = SectorStatus::Solved;
                        report.reflected = reflected;
                        report.solution = Some(h.intercepts);
                    }
                    Err(HomologyError::Diverged) | Err(HomologyError::NotConverged { .. }) => {
                        report.status = SectorStatus::NotConverged;
                    }
                    Err(e) => return Err(e),
                }
            }
            if report.status == SectorStatus::Solved {
                break;
            }
        }
        reports.push(report);
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn space(name: &str) -> HomologySpace {
        HomologySpace::new(&fixtures::by_name(name).unwrap()).unwrap()
    }

    #[test]
    fn reference_point_is_a_tiling() {
        for name in ["SQ2", "SQ3", "PIN5", "TRI4", "STACK3"] {
            let sp = space(name);
            let h = homology_tiles(&sp, sp.x_ref()).unwrap();
            assert!(h.q.iter().all(|&q| q > 0.0), "{}", name);
        }
    }

    #[test]
    fn sq2_escaped_cut_has_signed_areas() {
        let sp = space("SQ2");
        let h = homology_tiles(&sp, &[1.5]).unwrap();
        let mut q = h.q.clone();
        q.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((q[0] - (-0.5)).abs() < 1e-12);
        assert!((q[1] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn winding_and_area_sum_hold_at_random_points() {
        let mut rng = SplitMix64::new(5);
        for name in ["SQ2", "SQ3", "PIN5", "TRI4", "STACK3"] {
            let sp = space(name);
            for _ in 0..20 {
                let x: Vec<f64> = sp
                    .x_ref()
                    .iter()
                    .map(|&v| v + 3.0 * sp.scale * (2.0 * rng.uniform() - 1.0))
                    .collect();
                let h = homology_tiles(&sp, &x).unwrap();
                let sum: f64 = h.q.iter().sum();
                assert!(
                    (sum - sp.region.signed_area()).abs() < 1e-9 * sp.scale * sp.scale,
                    "{}",
                    name
                );
            }
        }
    }

    #[test]
    fn sq2_closed_form_solve() {
        let sp = space("SQ2");
        let h = solve_homology(&sp, &[0.3, 0.7], &[1, 1], sp.x_ref()).unwrap();
        // areas (0.3, 0.7) put the cut at height 0.3
        assert!((h.intercepts[0] - 0.3).abs() < 1e-9);
    }

    #[test]
    fn reference_areas_are_already_critical() {
        for name in ["SQ2", "SQ3", "PIN5", "TRI4", "STACK3"] {
            let sp = space(name);
            let a = sp.map.psi(sp.x_ref());
            let sigma = vec![1i8; sp.num_tiles()];
            let h = solve_homology(&sp, &a, &sigma, sp.x_ref()).unwrap();
            for (got, want) in h.intercepts.iter().zip(sp.x_ref()) {
                assert!((got - want).abs() < 1e-8, "{}", name);
            }
        }
    }

    #[test]
    fn pin5_matches_psi_inverse() {
        let t = fixtures::pin5();
        let g = crate::tiling::build_graph(&t).unwrap();
        let sp = HomologySpace::new(&t).unwrap();
        let a = [2.2, 1.8, 2.1, 1.9, 1.0];
        let sigma = vec![1i8; 5];
        let h = solve_homology(&sp, &a, &sigma, sp.x_ref()).unwrap();
        for (q, aw) in h.q.iter().zip(&a) {
            assert!((q - aw).abs() < 1e-8);
        }
        // cross-check against the psi inverse over B_int + b0
        let b0 = g.boundary_blacks[0];
        let map = AreaMap::for_psi(&t, &g, b0).unwrap();
        let x = map
            .psi_inverse(&a, &map.x_ref.clone(), &sigma)
            .unwrap();
        let cols = g.b0_columns(b0);
        for (j, &b) in cols.iter().enumerate() {
            if let Some(k) = sp.map.vars.iter().position(|&v| v == b) {
                assert!((x[j] - h.intercepts[k]).abs() < 1e-7);
            } else {
                // the b0 column: must come back to the reference intercept
                assert!((x[j] - map.x_ref[j]).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn criticality_at_optimum() {
        let mut rng = SplitMix64::new(11);
        for name in ["SQ2", "SQ3", "PIN5", "TRI4"] {
            let sp = space(name);
            let area = sp.region.signed_area();
            let nw = sp.num_tiles();
            for _ in 0..5 {
                let raw: Vec<f64> = (0..nw).map(|_| 0.2 + rng.uniform()).collect();
                let s: f64 = raw.iter().sum();
                let a: Vec<f64> = raw.iter().map(|v| v * area / s).collect();
                let sigma = vec![1i8; nw];
                let h = solve_homology(&sp, &a, &sigma, sp.x_ref()).unwrap();
                for (q, aw) in h.q.iter().zip(&a) {
                    assert!((q - aw).abs() < 1e-8, "{}", name);
                }
                let j = sp.map.d_psi(&h.intercepts);
                for col in 0..sp.num_vars() {
                    let mut g = 0.0;
                    for w in 0..nw {
                        g += a[w] / h.q[w] * j[(w, col)];
                    }
                    assert!(g.abs() <= 1e-9, "{}: criticality {:e}", name, g);
                }
            }
        }
    }

    #[test]
    fn sq2_negative_sector_is_empty() {
        let sp = space("SQ2");
        // the horizontal tile edges are frozen, so neither tile can flip
        assert!(find_sector_point(&sp, &[1, -1]).is_none());
        assert!(find_sector_point(&sp, &[-1, 1]).is_none());
        // dense sampling of the 1-dim intercept space agrees
        for k in 0..4001 {
            let x = [-20.0 + 0.01 * k as f64];
            assert!(!sp.map.in_sector(&x, &[1, -1]));
            assert!(!sp.map.in_sector(&x, &[-1, 1]));
        }
    }

    #[test]
    fn stack3_has_few_sectors() {
        let sp = space("STACK3");
        let area = sp.region.signed_area();
        let a = [0.31 * area, 0.36 * area, 0.33 * area];
        let reports = enumerate_sectors(&sp, &a).unwrap();
        assert_eq!(reports.len(), 8);
        let solved = reports
            .iter()
            .filter(|r| r.status == SectorStatus::Solved)
            .count();
        assert!(solved < 8, "solved = {}", solved);
        assert!(solved >= 2); // all-plus directly, all-minus via -R
        let allplus = &reports[0];
        assert_eq!(allplus.status, SectorStatus::Solved);
        assert!(!allplus.reflected);
    }

    #[test]
    fn tri4_solves_all_sixteen_sectors() {
        let sp = space("TRI4");
        let area = sp.region.signed_area();
        let raw = [0.23, 0.31, 0.27, 0.19];
        let sum: f64 = raw.iter().sum();
        let a: Vec<f64> = raw.iter().map(|v| v * area / sum).collect();
        let reports = enumerate_sectors(&sp, &a).unwrap();
        assert_eq!(reports.len(), 16);
        for r in &reports {
            assert_eq!(
                r.status,
                SectorStatus::Solved,
                "sector {:?} not solved",
                r.sigma
            );
            assert!(r.residual <= 1e-8);
        }
        // pairs (sigma, -sigma) are the same picture in R and -R
        let direct = reports.iter().filter(|r| !r.reflected).count();
        assert_eq!(direct, 8);
        for r in &reports {
            let neg: Vec<i8> = r.sigma.iter().map(|&s| -s).collect();
            let partner = reports.iter().find(|p| p.sigma == neg).unwrap();
            assert_ne!(r.reflected, partner.reflected);
            if !r.reflected {
                let (xa, xb) = (
                    r.solution.as_ref().unwrap(),
                    partner.solution.as_ref().unwrap(),
                );
                for (u, v) in xa.iter().zip(xb) {
                    assert!((u - v).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn uniqueness_from_multiple_starts() {
        let sp = space("PIN5");
        let a = [2.2, 1.8, 2.1, 1.9, 1.0];
        let sigma = vec![1i8; 5];
        let base = solve_homology(&sp, &a, &sigma, sp.x_ref()).unwrap();
        let mut rng = SplitMix64::new(23);
        let mut found = 0;
        while found < 10 {
            let x0: Vec<f64> = sp
                .x_ref()
                .iter()
                .map(|&v| v + 0.8 * (2.0 * rng.uniform() - 1.0))
                .collect();
            if !sp.map.in_sector(&x0, &sigma) {
                continue;
            }
            found += 1;
            let h = solve_homology(&sp, &a, &sigma, &x0).unwrap();
            for (u, v) in h.intercepts.iter().zip(&base.intercepts) {
                assert!((u - v).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn concavity_along_segments() {
        let sp = space("PIN5");
        let a = sp.map.psi(sp.x_ref());
        let sigma = vec![1i8; 5];
        let mut rng = SplitMix64::new(31);
        let q_of = |x: &[f64]| -> f64 {
            sp.map
                .psi(x)
                .iter()
                .zip(&a)
                .map(|(&q, &aw)| aw * libm::log(q))
                .sum()
        };
        let mut done = 0;
        while done < 20 {
            let x0: Vec<f64> = sp
                .x_ref()
                .iter()
                .map(|&v| v + 0.5 * (2.0 * rng.uniform() - 1.0))
                .collect();
            let x1: Vec<f64> = sp
                .x_ref()
                .iter()
                .map(|&v| v + 0.5 * (2.0 * rng.uniform() - 1.0))
                .collect();
            let mid: Vec<f64> = x0.iter().zip(&x1).map(|(u, v)| 0.5 * (u + v)).collect();
            if !(sp.map.in_sector(&x0, &sigma)
                && sp.map.in_sector(&x1, &sigma)
                && sp.map.in_sector(&mid, &sigma))
            {
                continue;
            }
            done += 1;
            assert!(q_of(&mid) >= 0.5 * (q_of(&x0) + q_of(&x1)) - 1e-9);
        }
    }
}
