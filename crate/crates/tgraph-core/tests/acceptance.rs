//! Acceptance suite: one test per shipped guarantee, each printing a
//! pass/fail line (visible with `cargo test --test acceptance -- --nocapture`).

use std::time::Instant;

use tgraph_core::areamap::AreaMap;
use tgraph_core::dimer::{
    edge_probability, enumerate_matchings, face_alternating_product, kasteleyn_from_tiling,
    pair_probability, verify_kasteleyn,
};
use tgraph_core::fixtures;
use tgraph_core::homology::{enumerate_sectors, solve_homology, HomologySpace, SectorStatus};
use tgraph_core::rng::SplitMix64;
use tgraph_core::solvers::{
    check_2_nondegenerate, prescribe_shapes, reconstruct_from_graph, ShapeAssignment,
};
use tgraph_core::tiling::{build_graph, validate, TGraph, Tiling};
use tgraph_core::EPS_GEOM;

/// All valid tiling fixtures.
const VALID: [&str; 6] = ["SQ2", "SQ3", "PIN5", "TRI4", "STACK3", "HEX6"];
/// Valid fixtures whose graphs have quadrilateral bounded faces (the
/// intercepts-to-areas theory applies).
const QUAD: [&str; 5] = ["SQ2", "SQ3", "PIN5", "TRI4", "STACK3"];
/// Small fixtures for brute-force enumeration.
const SMALL: [&str; 3] = ["SQ2", "SQ3", "PIN5"];

fn fixture(name: &str) -> (Tiling, TGraph) {
    let t = fixtures::by_name(name).unwrap();
    let g = build_graph(&t).unwrap();
    (t, g)
}

fn finish(n: usize, desc: &str, r: Result<(), String>) {
    println!("criterion {:2} ({}): {}", n, desc, if r.is_ok() { "pass" } else { "FAIL" });
    if let Err(m) = r {
        panic!("criterion {} failed: {}", n, m);
    }
}

fn max_vertex_error(t1: &Tiling, t2: &Tiling) -> f64 {
    let d = t2.region.vertices[0] - t1.region.vertices[0];
    let mut err: f64 = 0.0;
    for (a, b) in t1.tiles.iter().zip(&t2.tiles) {
        for (p, q) in a.vertices.iter().zip(&b.vertices) {
            err = err.max((*p + d).dist(*q));
        }
    }
    err
}

/// Positive areas summing to area(R).
fn random_areas(rng: &mut SplitMix64, total: f64, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| 0.2 + rng.uniform()).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| total * v / s).collect()
}

/// A random point of the all-plus sector near the reference intercepts.
fn random_sector_point(map: &AreaMap, rng: &mut SplitMix64, spread: f64) -> Vec<f64> {
    let sigma = vec![1i8; map.num_whites];
    for _ in 0..1000 {
        let x: Vec<f64> = map.x_ref.iter().map(|&v| v + spread * rng.normal()).collect();
        if map.in_sector(&x, &sigma) {
            return x;
        }
    }
    map.x_ref.clone()
}

#[test]
fn criterion_01_determinant_counts_matchings() {
    let run = || -> Result<(), String> {
        let start = Instant::now();
        for name in SMALL {
            let (_, g) = fixture(name);
            let k = kasteleyn_from_tiling(&g).map_err(|e| format!("{}: {}", name, e))?;
            for &b0 in &g.boundary_blacks {
                let rep = verify_kasteleyn(&k, &g, b0).map_err(|e| format!("{}: {}", name, e))?;
                if rep.rel_error > 1e-10 {
                    return Err(format!("{} b0={}: rel error {:e}", name, b0, rep.rel_error));
                }
            }
        }
        let dt = start.elapsed();
        if dt.as_secs_f64() >= 1.0 {
            return Err(format!("took {:?}, budget 1s", dt));
        }
        Ok(())
    };
    finish(1, "|det K0| equals the weighted matching sum", run());
}

#[test]
fn criterion_02_face_sign_property() {
    let run = || -> Result<(), String> {
        for name in VALID {
            let (_, g) = fixture(name);
            let k = kasteleyn_from_tiling(&g).map_err(|e| format!("{}: {}", name, e))?;
            for f in 0..g.faces.len() {
                let p = face_alternating_product(&k, &g, f);
                let l = g.faces[f].len() / 2;
                let want: f64 = if l % 2 == 1 { 1.0 } else { -1.0 };
                if p.im.abs() > 1e-9 * p.norm() || p.re * want <= 0.0 {
                    return Err(format!("{} face {}: product {}", name, f, p));
                }
            }
        }
        Ok(())
    };
    finish(2, "alternating face products are real with sign (-1)^(l+1)", run());
}

#[test]
fn criterion_03_euler_count() {
    let run = || -> Result<(), String> {
        for name in VALID {
            let (t, g) = fixture(name);
            let (b, w, n) = (g.num_blacks(), g.num_whites, t.region.len());
            if b != w + n - 1 {
                return Err(format!("{}: |B|={} but |W|+n-1={}", name, b, w + n - 1));
            }
        }
        Ok(())
    };
    finish(3, "|B| = |W| + n - 1 on every valid fixture", run());
}

#[test]
fn criterion_04_jacobian_is_kasteleyn() {
    let run = || -> Result<(), String> {
        let mut rng = SplitMix64::new(4);
        for name in QUAD {
            let (t, g) = fixture(name);
            // the sign check on K_psi (= the tiling's Kasteleyn matrix)
            kasteleyn_from_tiling(&g).map_err(|e| format!("{}: {}", name, e))?;
            let map = AreaMap::for_psi(&t, &g, g.boundary_blacks[0])
                .map_err(|e| format!("{}: {}", name, e))?;
            let nv = map.num_vars();
            let h = 1e-5;
            for _ in 0..20 {
                let x: Vec<f64> =
                    map.x_ref.iter().map(|&v| v + rng.normal()).collect();
                let j = map.d_psi(&x);
                for c in 0..nv {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[c] += h;
                    xm[c] -= h;
                    let (pp, pm) = (map.psi(&xp), map.psi(&xm));
                    for r in 0..map.num_whites {
                        let fd = (pp[r] - pm[r]) / (2.0 * h);
                        if (j[(r, c)] - fd).abs() > 1e-7 {
                            return Err(format!(
                                "{}: d_psi[{},{}]={} vs central difference {}",
                                name,
                                r,
                                c,
                                j[(r, c)],
                                fd
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    };
    finish(4, "d_psi matches central differences; K_psi passes the sign check", run());
}

#[test]
fn criterion_05_probability_bridge() {
    let run = || -> Result<(), String> {
        let mut rng = SplitMix64::new(5);
        for name in SMALL {
            let (_, g) = fixture(name);
            let k = kasteleyn_from_tiling(&g).map_err(|e| format!("{}: {}", name, e))?;
            let b0 = g.boundary_blacks[0];
            let cols = g.b0_columns(b0);
            let removed: Vec<usize> =
                (0..g.num_blacks()).filter(|b| !cols.contains(b)).collect();
            let en = enumerate_matchings(&k, &g, &removed)
                .map_err(|e| format!("{}: {}", name, e))?;
            let freq = |pairs: &[(usize, usize)]| -> f64 {
                en.matchings
                    .iter()
                    .filter(|m| pairs.iter().all(|p| m.edges.contains(p)))
                    .map(|m| m.weight)
                    .sum::<f64>()
                    / en.z
            };
            for e in &g.edges {
                let p = edge_probability(&k, &g, b0, e.white, e.black)
                    .map_err(|e| format!("{}: {}", name, e))?;
                let f = freq(&[(e.white, e.black)]);
                if (p - f).abs() > 1e-10 {
                    return Err(format!(
                        "{} edge ({},{}): K Kinv gives {}, enumeration {}",
                        name, e.white, e.black, p, f
                    ));
                }
            }
            for _ in 0..20 {
                let i = (rng.next_u64() as usize) % g.edges.len();
                let j = (rng.next_u64() as usize) % g.edges.len();
                let (e1, e2) = (&g.edges[i], &g.edges[j]);
                if e1.white == e2.white || e1.black == e2.black {
                    continue;
                }
                let p = pair_probability(
                    &k,
                    &g,
                    b0,
                    (e1.white, e1.black),
                    (e2.white, e2.black),
                )
                .map_err(|e| format!("{}: {}", name, e))?;
                let f = freq(&[(e1.white, e1.black), (e2.white, e2.black)]);
                if (p - f).abs() > 1e-9 {
                    return Err(format!("{} pair: {} vs {}", name, p, f));
                }
            }
        }
        Ok(())
    };
    finish(5, "dimer edge and pair probabilities match enumeration", run());
}

#[test]
fn criterion_06_shape_prescription() {
    let run = || -> Result<(), String> {
        for name in QUAD {
            let t = fixtures::by_name(name).unwrap();
            let r = prescribe_shapes(&t, &ShapeAssignment::identity(&t))
                .map_err(|e| format!("{}: {}", name, e))?;
            let err = max_vertex_error(&t, &r.tiling);
            if r.degenerate || err > 1e-8 {
                return Err(format!("{}: identity round trip error {:e}", name, err));
            }
        }
        // 50 random rectangle rescalings on the pinwheel
        let t = fixtures::pin5();
        let g1 = build_graph(&t).unwrap();
        let mut rng = SplitMix64::new(6);
        for trial in 0..50 {
            let mut shapes = ShapeAssignment::identity(&t);
            for s in &mut shapes.shapes {
                let f = 0.5 + rng.uniform();
                for (d, c) in s.edge_directions.iter().zip(s.coefficients.iter_mut()) {
                    if d.x.abs() > 0.5 {
                        *c *= f;
                    }
                }
            }
            let r = prescribe_shapes(&t, &shapes).map_err(|e| format!("trial {}: {}", trial, e))?;
            if r.residual > 1e-9 {
                return Err(format!("trial {}: residual {:e}", trial, r.residual));
            }
            if r.a.iter().all(|&a| a.abs() > 1e-10) {
                let report = validate(&r.tiling, EPS_GEOM);
                if !report.is_clean() {
                    return Err(format!("trial {}: result fails validation", trial));
                }
                let g2 = build_graph(&r.tiling).map_err(|e| format!("trial {}: {}", trial, e))?;
                if !tgraph_core::tiling::combinatorially_equivalent(&g1, &g2) {
                    return Err(format!("trial {}: combinatorics changed", trial));
                }
            }
        }
        Ok(())
    };
    finish(6, "shape prescription: identity round trip and random rescalings", run());
}

#[test]
fn criterion_07_reconstruction() {
    let run = || -> Result<(), String> {
        for name in QUAD {
            let (t, g) = fixture(name);
            let nu: Vec<f64> = g.edges.iter().map(|e| e.weight.norm()).collect();
            let r = reconstruct_from_graph(&g, &nu, &t.region)
                .map_err(|e| format!("{}: {}", name, e))?;
            let err = max_vertex_error(&t, &r);
            if err > 1e-9 {
                return Err(format!("{}: round trip vertex error {:e}", name, err));
            }
        }
        // modified weights: prescribed face weights are realized
        let (t, g) = fixture("SQ2");
        let mut nu: Vec<f64> = g.edges.iter().map(|e| e.weight.norm()).collect();
        let interior = g.interior_blacks()[0];
        let bottom = if t.tiles[0].centroid().y < 0.4 { 0 } else { 1 };
        for (i, e) in g.edges.iter().enumerate() {
            if e.white == bottom && e.black == interior {
                nu[i] *= 2.0;
            }
        }
        let r = reconstruct_from_graph(&g, &nu, &t.region).map_err(|e| e.to_string())?;
        let g2 = build_graph(&r).map_err(|e| e.to_string())?;
        let k2 = kasteleyn_from_tiling(&g2).map_err(|e| e.to_string())?;
        let fw = tgraph_core::dimer::face_weights(&k2, &g2).map_err(|e| e.to_string())?;
        for (f, face) in g.faces.iter().enumerate() {
            let mut x = 1.0;
            for (pos, &e) in face.iter().enumerate() {
                x = if pos % 2 == 0 { x * nu[e] } else { x / nu[e] };
            }
            let got = fw.x[f];
            if (got - x).abs() > 1e-9 * x && (1.0 / got - x).abs() > 1e-9 * x {
                return Err(format!("face {}: weight {} vs prescribed {}", f, got, x));
            }
        }
        Ok(())
    };
    finish(7, "graph-to-tiling reconstruction round trips and realizes face weights", run());
}

#[test]
fn criterion_08_homology_solve_and_uniqueness() {
    let run = || -> Result<(), String> {
        let mut rng = SplitMix64::new(8);
        for name in QUAD {
            let t = fixtures::by_name(name).unwrap();
            let space = HomologySpace::new(&t).map_err(|e| format!("{}: {}", name, e))?;
            let total = space.region.signed_area();
            let sigma = vec![1i8; space.num_tiles()];
            for trial in 0..50 {
                let a = random_areas(&mut rng, total, space.num_tiles());
                let h = solve_homology(&space, &a, &sigma, space.x_ref())
                    .map_err(|e| format!("{} trial {}: {}", name, trial, e))?;
                let resid = h
                    .q
                    .iter()
                    .zip(&a)
                    .map(|(&q, &aw)| (q - aw).abs())
                    .fold(0.0, f64::max);
                if resid > 1e-8 {
                    return Err(format!("{} trial {}: area residual {:e}", name, trial, resid));
                }
                // criticality: grad of sum A_w log q_w vanishes
                let j = space.map.d_psi(&h.intercepts);
                let mut gmax: f64 = 0.0;
                for c in 0..space.num_vars() {
                    let mut gr = 0.0;
                    for w in 0..space.num_tiles() {
                        gr += a[w] / h.q[w] * j[(w, c)];
                    }
                    gmax = gmax.max(gr.abs());
                }
                if gmax > 1e-9 {
                    return Err(format!("{} trial {}: criticality {:e}", name, trial, gmax));
                }
            }
            // uniqueness: 10 multistarts agree
            let a = random_areas(&mut rng, total, space.num_tiles());
            let mut sols: Vec<Vec<f64>> = Vec::new();
            for _ in 0..10 {
                let x0 = random_sector_point(&space.map, &mut rng, 0.05 * space.scale);
                let h = solve_homology(&space, &a, &sigma, &x0)
                    .map_err(|e| format!("{} multistart: {}", name, e))?;
                sols.push(h.intercepts);
            }
            for s in &sols[1..] {
                let spread = s
                    .iter()
                    .zip(&sols[0])
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max);
                if spread > 1e-6 {
                    return Err(format!("{}: multistart spread {:e}", name, spread));
                }
            }
        }
        Ok(())
    };
    finish(8, "homology solves hit prescribed areas; optimum is unique", run());
}

#[test]
fn criterion_09_sector_counts() {
    let run = || -> Result<(), String> {
        let start = Instant::now();
        let t = fixtures::tri4();
        let space = HomologySpace::new(&t).map_err(|e| e.to_string())?;
        let total = space.region.signed_area();
        // generic areas (no symmetry): fixed, summing to area(R) = 6
        let a = {
            let w = [1.7, 1.9, 1.3, 1.1];
            let s: f64 = w.iter().sum();
            w.iter().map(|v| total * v / s).collect::<Vec<f64>>()
        };
        let reports = enumerate_sectors(&space, &a).map_err(|e| e.to_string())?;
        let solved = reports.iter().filter(|r| r.status == SectorStatus::Solved).count();
        if solved != 16 {
            return Err(format!("TRI4: {} of 16 sectors solved", solved));
        }
        let direct = reports
            .iter()
            .filter(|r| r.status == SectorStatus::Solved && !r.reflected)
            .count();
        if direct != 8 {
            return Err(format!("TRI4: {} solutions up to rotation, expected 8", direct));
        }
        let dt = start.elapsed();
        if dt.as_secs_f64() >= 60.0 {
            return Err(format!("took {:?}, budget 60s", dt));
        }
        // rectangle stack: strictly fewer than 2^|W| sectors carry solutions
        let t = fixtures::stack3();
        let space = HomologySpace::new(&t).map_err(|e| e.to_string())?;
        let total = space.region.signed_area();
        let mut rng = SplitMix64::new(9);
        let a = random_areas(&mut rng, total, space.num_tiles());
        let reports = enumerate_sectors(&space, &a).map_err(|e| e.to_string())?;
        let solved = reports.iter().filter(|r| r.status == SectorStatus::Solved).count();
        if solved >= 1 << space.num_tiles() {
            return Err(format!("STACK3: all {} sectors solved", solved));
        }
        if solved == 0 {
            return Err("STACK3: no sector solved".into());
        }
        Ok(())
    };
    finish(9, "16 solved sectors on the triangle, fewer on a rectangle stack", run());
}

#[test]
fn criterion_10_area_map_uniqueness() {
    let run = || -> Result<(), String> {
        let (t, g) = fixture("PIN5");
        let map = AreaMap::for_psi(&t, &g, g.boundary_blacks[0]).map_err(|e| e.to_string())?;
        let sigma = vec![1i8; g.num_whites];
        let mut rng = SplitMix64::new(10);
        for trial in 0..20 {
            // a target in the image: psi of a random sector point
            let xt = random_sector_point(&map, &mut rng, 0.1);
            let target = map.psi(&xt);
            let mut sols: Vec<Vec<f64>> = Vec::new();
            for _ in 0..10 {
                let x0 = random_sector_point(&map, &mut rng, 0.1);
                let x = map
                    .psi_inverse(&target, &x0, &sigma)
                    .map_err(|e| format!("trial {}: {}", trial, e))?;
                sols.push(x);
            }
            for s in &sols[1..] {
                let spread = s
                    .iter()
                    .zip(&sols[0])
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max);
                if spread > 1e-6 {
                    return Err(format!("trial {}: intercept spread {:e}", trial, spread));
                }
            }
        }
        Ok(())
    };
    finish(10, "psi_inverse lands on identical intercepts from random starts", run());
}

#[test]
fn criterion_11_two_nondegeneracy_oracle() {
    let run = || -> Result<(), String> {
        if check_2_nondegenerate(&fixtures::gadget_2deg()).map_err(|e| e.to_string())? {
            return Err("gadget reported 2-nondegenerate".into());
        }
        for name in QUAD {
            let (_, g) = fixture(name);
            if !check_2_nondegenerate(&g.bipartite()).map_err(|e| e.to_string())? {
                return Err(format!("{} reported 2-degenerate", name));
            }
        }
        // HEX6 is a valid tiling that is nonetheless 2-degenerate: its bottom
        // tile touches only one interior segment, so the interior pair
        // (top-left tile, cut) + (middle triangle, right leg) cannot extend
        // to a dimer cover.
        let (_, g) = fixture("HEX6");
        if check_2_nondegenerate(&g.bipartite()).map_err(|e| e.to_string())? {
            return Err("HEX6 reported 2-nondegenerate".into());
        }
        Ok(())
    };
    finish(11, "gadget is 2-degenerate, valid fixtures are 2-nondegenerate", run());
}
