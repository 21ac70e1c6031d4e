//! Named desk-scale fixtures used across the test suites and exposed by
//! name in the CLI.

use alloc::vec;

use crate::geom::{intersect, Line, Point, Polygon};
use crate::tiling::{BipartiteGraph, Tiling};

fn poly(pts: &[(f64, f64)]) -> Polygon {
    Polygon::new(pts.iter().map(|&(x, y)| Point::new(x, y)).collect())
}

/// Unit square cut by a horizontal line into two rectangles.
pub fn sq2_cut(h: f64) -> Tiling {
    Tiling::new(
        poly(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]),
        vec![
            poly(&[(0.0, 0.0), (1.0, 0.0), (1.0, h), (0.0, h)]),
            poly(&[(0.0, h), (1.0, h), (1.0, 1.0), (0.0, 1.0)]),
        ],
    )
}

/// SQ2: unit square cut at y = 0.4.
pub fn sq2() -> Tiling {
    sq2_cut(0.4)
}

/// SQ3: unit square, vertical cut at x = 0.5 full height, right half cut at
/// y = 0.5.
pub fn sq3() -> Tiling {
    Tiling::new(
        poly(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]),
        vec![
            poly(&[(0.0, 0.0), (0.5, 0.0), (0.5, 1.0), (0.0, 1.0)]),
            poly(&[(0.5, 0.0), (1.0, 0.0), (1.0, 0.5), (0.5, 0.5)]),
            poly(&[(0.5, 0.5), (1.0, 0.5), (1.0, 1.0), (0.5, 1.0)]),
        ],
    )
}

/// PIN5: 3x3 square tiled by four 2x1 rectangles pinwheeling around a unit
/// center square.
pub fn pin5() -> Tiling {
    Tiling::new(
        poly(&[(0.0, 0.0), (3.0, 0.0), (3.0, 3.0), (0.0, 3.0)]),
        vec![
            poly(&[(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (0.0, 1.0)]),
            poly(&[(2.0, 0.0), (3.0, 0.0), (3.0, 2.0), (2.0, 2.0)]),
            poly(&[(1.0, 2.0), (3.0, 2.0), (3.0, 3.0), (1.0, 3.0)]),
            poly(&[(0.0, 1.0), (1.0, 1.0), (1.0, 3.0), (0.0, 3.0)]),
            poly(&[(1.0, 1.0), (2.0, 1.0), (2.0, 2.0), (1.0, 2.0)]),
        ],
    )
}

/// STACK3: unit square cut into three stacked rectangles (parallel interior
/// segments; used for the fewer-sectors check).
pub fn stack3() -> Tiling {
    Tiling::new(
        poly(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]),
        vec![
            poly(&[(0.0, 0.0), (1.0, 0.0), (1.0, 0.3), (0.0, 0.3)]),
            poly(&[(0.0, 0.3), (1.0, 0.3), (1.0, 0.65), (0.0, 0.65)]),
            poly(&[(0.0, 0.65), (1.0, 0.65), (1.0, 1.0), (0.0, 1.0)]),
        ],
    )
}

/// DEG-PLUS: unit square cut into four equal quadrants. Degenerate: four
/// tile corners meet at (0.5, 0.5).
pub fn deg_plus() -> Tiling {
    Tiling::new(
        poly(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]),
        vec![
            poly(&[(0.0, 0.0), (0.5, 0.0), (0.5, 0.5), (0.0, 0.5)]),
            poly(&[(0.5, 0.0), (1.0, 0.0), (1.0, 0.5), (0.5, 0.5)]),
            poly(&[(0.5, 0.5), (1.0, 0.5), (1.0, 1.0), (0.5, 1.0)]),
            poly(&[(0.0, 0.5), (0.5, 0.5), (0.5, 1.0), (0.0, 1.0)]),
        ],
    )
}

/// TRI4: a triangle tiled pinwheel-style by three quadrilaterals around a
/// central triangle. All interior vertices are T's, the graph has quad
/// faces, and no two interior segments are parallel.
///
/// Construction: three interior segments s1, s2, s3, each starting on a side
/// of the triangle and ending strictly inside the next one (cyclically). The
/// T-points are computed as line intersections so collinearity is exact.
pub fn tri4() -> Tiling {
    let a = Point::new(0.0, 0.0);
    let b = Point::new(4.0, 0.0);
    let c = Point::new(1.0, 3.0);

    let p1 = Point::new(2.0, 0.0);
    let s1 = Line::through(p1, Point::new(1.4, 1.8));
    let p2 = Point::new(2.1, 1.9); // on BC: (4 - 3u, 3u) at u = 19/30
    let x2 = Point::new(0.9, 1.75);
    let s2 = Line::through(p2, x2);
    let x1 = intersect(&s1, &s2).expect("s1, s2 not parallel");
    let x3 = p1 + (x1 - p1).scale(0.5);
    let s3 = Line::through(x2, x3);
    let ca = Line::through(a, c);
    let p3 = intersect(&s3, &ca).expect("s3 not parallel to CA");

    Tiling::new(
        Polygon::new(vec![a, b, c]),
        vec![
            Polygon::new(vec![a, p1, x3, p3]),
            Polygon::new(vec![p1, b, p2, x1]),
            Polygon::new(vec![x2, p2, c, p3]),
            Polygon::new(vec![x3, x1, x2]),
        ],
    )
}

/// HEX6: unit square with a full horizontal cut and two segments rising
/// from the same point on it, so the graph has a hexagonal face (a T with
/// two legs).
pub fn hex6() -> Tiling {
    Tiling::new(
        poly(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]),
        vec![
            poly(&[(0.0, 0.0), (1.0, 0.0), (1.0, 0.5), (0.0, 0.5)]),
            poly(&[(0.0, 0.5), (0.5, 0.5), (0.25, 1.0), (0.0, 1.0)]),
            poly(&[(0.5, 0.5), (0.75, 1.0), (0.25, 1.0)]),
            poly(&[(0.5, 0.5), (1.0, 0.5), (1.0, 1.0), (0.75, 1.0)]),
        ],
    )
}

/// The 2-degenerate gadget graph: three whites hanging on three corner
/// blacks (no dimer cover uses two disjoint edges of the 6-cycle), attached
/// to the rest of the graph through a hub white with boundary blacks.
pub fn gadget_2deg() -> BipartiteGraph {
    BipartiteGraph {
        num_whites: 4,
        num_blacks: 6,
        boundary: vec![false, false, false, true, true, true],
        adj: vec![
            vec![0, 1],
            vec![1, 2],
            vec![2, 0],
            vec![0, 1, 2, 3, 4, 5],
        ],
    }
}

/// All tiling fixture names understood by `by_name`.
pub const NAMES: &[&str] = &["SQ2", "SQ3", "PIN5", "TRI4", "STACK3", "HEX6", "DEG-PLUS"];

pub fn by_name(name: &str) -> Option<Tiling> {
    match name {
        "SQ2" => Some(sq2()),
        "SQ3" => Some(sq3()),
        "PIN5" => Some(pin5()),
        "TRI4" => Some(tri4()),
        "STACK3" => Some(stack3()),
        "HEX6" => Some(hex6()),
        "DEG-PLUS" => Some(deg_plus()),
        _ => None,
    }
}
