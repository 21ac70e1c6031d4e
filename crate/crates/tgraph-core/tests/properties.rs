//! Randomized property tests for the core invariants.

use proptest::prelude::*;

use tgraph_core::areamap::AreaMap;
use tgraph_core::dimer::{gauge_equivalent, kasteleyn_from_tiling, verify_kasteleyn, KasteleynMatrix};
use tgraph_core::fixtures;
use tgraph_core::geom::Point;
use tgraph_core::tiling::{build_graph, validate};
use tgraph_core::Complex64;
use tgraph_core::EPS_GEOM;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Every horizontal cut of the unit square validates, satisfies the
    /// determinant identity for every b0, and maps its reference intercepts
    /// to the tile areas (h, 1 - h).
    #[test]
    fn cut_square_family(h in 0.05f64..0.95) {
        let t = fixtures::sq2_cut(h);
        prop_assert!(validate(&t, EPS_GEOM).is_clean());
        let g = build_graph(&t).unwrap();
        let k = kasteleyn_from_tiling(&g).unwrap();
        for &b0 in &g.boundary_blacks {
            let rep = verify_kasteleyn(&k, &g, b0).unwrap();
            prop_assert!(rep.rel_error <= 1e-10);
        }
        let map = AreaMap::for_psi(&t, &g, g.boundary_blacks[0]).unwrap();
        let q = map.psi(&map.x_ref);
        let (bottom, top) = if t.tiles[0].centroid().y < h { (0, 1) } else { (1, 0) };
        prop_assert!((q[bottom] - h).abs() <= 1e-12);
        prop_assert!((q[top] - (1.0 - h)).abs() <= 1e-12);
    }

    /// The intercepts-to-areas map is exactly quadratic: second differences
    /// along any direction do not depend on the base point.
    #[test]
    fn psi_is_quadratic(
        seed_x in proptest::collection::vec(-0.3f64..0.3, 5),
        seed_d in proptest::collection::vec(-0.3f64..0.3, 5),
        shift in proptest::collection::vec(-0.5f64..0.5, 5),
    ) {
        let t = fixtures::pin5();
        let g = build_graph(&t).unwrap();
        let map = AreaMap::for_psi(&t, &g, g.boundary_blacks[0]).unwrap();
        let nv = map.num_vars();
        let x: Vec<f64> = (0..nv).map(|i| map.x_ref[i] + seed_x[i % seed_x.len()]).collect();
        let d: Vec<f64> = (0..nv).map(|i| seed_d[i % seed_d.len()]).collect();
        let y: Vec<f64> = (0..nv).map(|i| x[i] + shift[i % shift.len()]).collect();
        let second = |base: &[f64]| -> Vec<f64> {
            let p0 = map.psi(base);
            let p1 = map.psi(&base.iter().zip(&d).map(|(a, b)| a + b).collect::<Vec<f64>>());
            let p2 = map.psi(&base.iter().zip(&d).map(|(a, b)| a + 2.0 * b).collect::<Vec<f64>>());
            p2.iter().zip(&p1).zip(&p0).map(|((c, b), a)| c - 2.0 * b + a).collect()
        };
        let (sx, sy) = (second(&x), second(&y));
        for (a, b) in sx.iter().zip(&sy) {
            prop_assert!((a - b).abs() <= 1e-9, "second difference moved: {} vs {}", a, b);
        }
    }

    /// Rescaling rows and columns by nonzero complex numbers is detected as
    /// a gauge equivalence (and face weights are gauge invariants).
    #[test]
    fn gauge_rescaling_is_detected(
        row_abs in proptest::collection::vec(0.2f64..3.0, 8),
        row_arg in proptest::collection::vec(-3.0f64..3.0, 8),
        col_abs in proptest::collection::vec(0.2f64..3.0, 8),
        col_arg in proptest::collection::vec(-3.0f64..3.0, 8),
    ) {
        let t = fixtures::pin5();
        let g = build_graph(&t).unwrap();
        let k1 = kasteleyn_from_tiling(&g).unwrap();
        let mut entries = k1.entries.clone();
        let dw: Vec<Complex64> = (0..g.num_whites)
            .map(|w| Complex64::from_polar(row_abs[w % row_abs.len()], row_arg[w % row_arg.len()]))
            .collect();
        let db: Vec<Complex64> = (0..g.num_blacks())
            .map(|b| Complex64::from_polar(col_abs[b % col_abs.len()], col_arg[b % col_arg.len()]))
            .collect();
        for w in 0..g.num_whites {
            for b in 0..g.num_blacks() {
                entries[(w, b)] = dw[w] * entries[(w, b)] * db[b];
            }
        }
        let k2 = KasteleynMatrix { entries };
        let gauge = gauge_equivalent(&k1, &k2).unwrap();
        prop_assert!(gauge.is_some());
        let fw1 = tgraph_core::dimer::face_weights(&k1, &g).unwrap();
        let fw2 = tgraph_core::dimer::face_weights(&k2, &g).unwrap();
        for (a, b) in fw1.x.iter().zip(&fw2.x) {
            prop_assert!((a - b).abs() <= 1e-9 * a.max(*b));
        }
    }

    /// Translating a tiling translates the recovered segment intercepts
    /// covariantly: i_b(T + v) = i_b(T) + v . n_b.
    #[test]
    fn intercepts_are_translation_covariant(dx in -5.0f64..5.0, dy in -5.0f64..5.0) {
        let t = fixtures::pin5();
        let g1 = build_graph(&t).unwrap();
        let t2 = t.translate(Point::new(dx, dy));
        let g2 = build_graph(&t2).unwrap();
        for b in 0..g1.num_blacks() {
            let n = g1.segments[b].line.dir.normal();
            let i1 = g1.segments[b].line.intercept;
            let i2 = g2.segments[b].line.intercept;
            prop_assert!((i2 - (i1 + n.x * dx + n.y * dy)).abs() <= 1e-9);
        }
    }
}
