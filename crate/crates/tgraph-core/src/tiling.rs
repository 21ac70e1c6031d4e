//! The tiling data model: validation of t-graph structure, maximal segments,
//! the associated bipartite graph with complex edge weights and boundary
//! identification, intercepts, and combinatorial equivalence.
//!
//! The bipartite graph has a white vertex per tile and a black vertex per
//! maximal segment in the union of tile boundaries. Edge (w, b) carries the
//! counterclockwise edge vector of tile w along segment b as a complex
//! number; this weighted adjacency matrix is a Kasteleyn matrix.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::geom::{Direction, GeomError, Line, Point, Polygon, convex_intersection_area};
use crate::EPS_GEOM;

#[derive(Debug, Clone)]
pub enum TilingError {
    /// Validation found problems; the report lists them.
    InvalidTiling(ValidationReport),
    /// A tile has (near) zero area.
    DegenerateTile(usize),
    /// A region edge has no matching boundary segment.
    MissingBoundarySegment(usize),
    /// The Euler count |B| = |W| + n - 1 failed.
    CountMismatch { whites: usize, blacks: usize, region_edges: usize },
    /// A weight-sum invariant failed beyond tolerance.
    WeightSum(f64),
    /// Combinatorial input (rotations, edge lists) is self-inconsistent.
    Inconsistent,
    Geom(GeomError),
}

impl fmt::Display for TilingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TilingError::InvalidTiling(r) => write!(f, "invalid tiling: {} finding(s)", r.findings.len()),
            TilingError::DegenerateTile(w) => write!(f, "tile {} has zero area", w),
            TilingError::MissingBoundarySegment(i) => {
                write!(f, "no maximal segment covers region edge {}", i)
            }
            TilingError::CountMismatch { whites, blacks, region_edges } => write!(
                f,
                "Euler count failed: |B|={} but |W|+n-1={}",
                blacks,
                whites + region_edges - 1
            ),
            TilingError::WeightSum(r) => write!(f, "weight-sum invariant failed, residual {}", r),
            TilingError::Inconsistent => write!(f, "inconsistent combinatorial graph data"),
            TilingError::Geom(e) => write!(f, "{}", e),
        }
    }
}

impl From<GeomError> for TilingError {
    fn from(e: GeomError) -> Self {
        TilingError::Geom(e)
    }
}

/// A polygonal region together with convex tiles covering it.
#[derive(Debug, Clone)]
pub struct Tiling {
    pub region: Polygon,
    pub tiles: Vec<Polygon>,
}

impl Tiling {
    /// Build a tiling, canonicalizing the region and tile vertex lists
    /// (removing repeated and collinear vertices).
    pub fn new(region: Polygon, tiles: Vec<Polygon>) -> Self {
        // start the region at its lexicographically smallest vertex so edge
        // indices do not depend on the input vertex order
        let mut region = region.canonicalized(EPS_GEOM);
        if let Some(k) = (0..region.len()).min_by(|&a, &b| {
            let (p, q) = (region.vertices[a], region.vertices[b]);
            (p.x, p.y).partial_cmp(&(q.x, q.y)).unwrap()
        }) {
            region.vertices.rotate_left(k);
        }
        let tiles = tiles.iter().map(|t| t.canonicalized(EPS_GEOM)).collect();
        Tiling { region, tiles }
    }

    pub fn translate(&self, v: Point) -> Tiling {
        Tiling {
            region: self.region.translate(v),
            tiles: self.tiles.iter().map(|t| t.translate(v)).collect(),
        }
    }

    /// Point reflection through the origin (tiles stay ccw).
    pub fn point_reflected(&self) -> Tiling {
        let flip = |p: &Polygon| Polygon::new(p.vertices.iter().map(|&v| -v).collect()).reversed();
        Tiling {
            region: flip(&self.region),
            tiles: self.tiles.iter().map(flip).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Finding {
    /// Tile is not convex or not counterclockwise.
    NonConvexTile(usize),
    /// Two tiles overlap with the given intersection area.
    Overlap(usize, usize, f64),
    /// Sum of tile areas differs from the region area by this defect.
    AreaDefect(f64),
    /// Interior vertex where segments cross or tiles meet corner-to-corner.
    DegeneratePlusVertex(Point),
    /// More than one tile has a corner at this corner of the region.
    DegenerateCornerMeeting(Point),
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.findings.is_empty()
    }
}

/// A maximal straight segment in the union of tile boundaries.
#[derive(Debug, Clone)]
pub struct Segment {
    pub line: Line,
    pub p0: Point,
    pub p1: Point,
    /// Region edge index if this segment lies on the boundary.
    pub boundary_edge: Option<usize>,
    pub incidences: Vec<SegIncidence>,
}

/// One tile edge lying on a segment.
#[derive(Debug, Clone)]
pub struct SegIncidence {
    pub white: usize,
    /// Edge index in the tile's canonical vertex list.
    pub edge_idx: usize,
    /// Parameter interval along the segment direction, t0 < t1.
    pub t0: f64,
    pub t1: f64,
    /// +1 if the tile lies on the +n side of the line, -1 otherwise.
    pub side: i8,
}

impl Segment {
    pub fn t_range(&self) -> (f64, f64) {
        let d = self.line.dir.unit();
        (self.p0.dot(d), self.p1.dot(d))
    }

    /// True if `p` lies strictly inside the segment (not near an endpoint).
    pub fn strictly_contains(&self, p: Point, tol: f64) -> bool {
        if !self.line.contains(p, tol) {
            return false;
        }
        let d = self.line.dir.unit();
        let t = p.dot(d);
        let (t0, t1) = self.t_range();
        t > t0 + tol && t < t1 - tol
    }

    pub fn endpoint_near(&self, p: Point, tol: f64) -> bool {
        self.p0.dist(p) <= tol || self.p1.dist(p) <= tol
    }
}

/// Compute the maximal segments of a tiling by merging collinear overlapping
/// tile edges (the region's own edges are included so boundary segments are
/// detected).
pub fn maximal_segments(region: &Polygon, tiles: &[Polygon], tol: f64) -> Vec<Segment> {
    struct Item {
        p: Point,
        q: Point,
        white: Option<usize>,
        edge_idx: usize,
        side: i8,
    }
    let mut items: Vec<(Line, Item)> = Vec::new();
    for (w, tile) in tiles.iter().enumerate() {
        let c = tile.centroid();
        for (k, (p, q)) in tile.edges().into_iter().enumerate() {
            let line = Line::through(p, q);
            let side = if line.signed_distance(c) >= 0.0 { 1 } else { -1 };
            items.push((line, Item { p, q, white: Some(w), edge_idx: k, side }));
        }
    }
    for (k, (p, q)) in region.edges().into_iter().enumerate() {
        let line = Line::through(p, q);
        items.push((line, Item { p, q, white: None, edge_idx: k, side: 0 }));
    }

    // group by line: rounded key first, then exact comparison within tol
    let line_tol = 1e-7_f64.max(tol);
    let mut lines: Vec<Line> = Vec::new();
    let mut groups: Vec<Vec<Item>> = Vec::new();
    for (line, item) in items {
        let mut found = None;
        for (li, l) in lines.iter().enumerate() {
            if l.dir.approx_eq(line.dir, line_tol)
                && libm::fabs(l.intercept - line.intercept) <= line_tol
            {
                found = Some(li);
                break;
            }
        }
        match found {
            Some(li) => groups[li].push(item),
            None => {
                lines.push(line);
                groups.push(vec![item]);
            }
        }
    }

    let mut segments: Vec<Segment> = Vec::new();
    for (line, group) in lines.into_iter().zip(groups) {
        let d = line.dir.unit();
        let mut intervals: Vec<(f64, f64, Item)> = group
            .into_iter()
            .map(|it| {
                let (mut t0, mut t1) = (it.p.dot(d), it.q.dot(d));
                if t0 > t1 {
                    core::mem::swap(&mut t0, &mut t1);
                }
                (t0, t1, it)
            })
            .collect();
        intervals.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut run: Vec<(f64, f64, Item)> = Vec::new();
        let mut run_max = f64::NEG_INFINITY;
        let flush = |run: &mut Vec<(f64, f64, Item)>, segments: &mut Vec<Segment>| {
            if run.is_empty() {
                return;
            }
            let t0 = run.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
            let t1 = run.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
            let base = line.base_point();
            let mut boundary_edge = None;
            let mut incidences = Vec::new();
            for (a, b, it) in run.drain(..) {
                match it.white {
                    Some(w) => incidences.push(SegIncidence {
                        white: w,
                        edge_idx: it.edge_idx,
                        t0: a,
                        t1: b,
                        side: it.side,
                    }),
                    None => boundary_edge = Some(it.edge_idx),
                }
            }
            segments.push(Segment {
                line,
                p0: base + d.scale(t0),
                p1: base + d.scale(t1),
                boundary_edge,
                incidences,
            });
        };
        for (t0, t1, it) in intervals {
            if !run.is_empty() && t0 > run_max + tol {
                flush(&mut run, &mut segments);
                run_max = f64::NEG_INFINITY;
            }
            run_max = run_max.max(t1);
            run.push((t0, t1, it));
        }
        flush(&mut run, &mut segments);
    }
    segments
}

/// Validate a tiling: convexity, overlap/gap, and degeneracy findings.
/// An empty report means a nondegenerate valid tiling (a t-graph).
pub fn validate(t: &Tiling, tol: f64) -> ValidationReport {
    let mut report = ValidationReport::default();
    let region_area = t.region.signed_area();
    let mut tile_area_sum = 0.0;
    for (w, tile) in t.tiles.iter().enumerate() {
        if !tile.is_convex_ccw(tol) {
            report.findings.push(Finding::NonConvexTile(w));
        }
        tile_area_sum += tile.signed_area();
    }
    if !report.findings.is_empty() {
        // degeneracy analysis below assumes convex ccw tiles
        return report;
    }
    for i in 0..t.tiles.len() {
        for j in (i + 1)..t.tiles.len() {
            let a = convex_intersection_area(&t.tiles[i], &t.tiles[j]);
            let min_area = t.tiles[i].signed_area().min(t.tiles[j].signed_area());
            if a > tol.max(1e-12) * min_area.max(1.0) {
                report.findings.push(Finding::Overlap(i, j, a));
            }
        }
    }
    let defect = libm::fabs(tile_area_sum - region_area);
    if defect > tol * region_area.max(1.0) * 10.0 {
        report.findings.push(Finding::AreaDefect(defect));
    }

    let segments = maximal_segments(&t.region, &t.tiles, tol);
    // classify every distinct tile-vertex point
    let point_tol = tol.max(1e-9);
    let mut points: Vec<(Point, usize)> = Vec::new(); // (point, tile count at point)
    for tile in &t.tiles {
        for &v in &tile.vertices {
            match points.iter_mut().find(|(p, _)| p.dist(v) <= point_tol) {
                Some((_, c)) => *c += 1,
                None => points.push((v, 1)),
            }
        }
    }
    for (p, tiles_here) in points {
        let corner = t.region.vertices.iter().any(|&c| c.dist(p) <= point_tol);
        if corner {
            if tiles_here > 1 {
                report.findings.push(Finding::DegenerateCornerMeeting(p));
            }
            continue;
        }
        let interior_count = segments
            .iter()
            .filter(|s| s.strictly_contains(p, point_tol))
            .count();
        if interior_count != 1 {
            // 0: tiles meet corner-to-corner; >=2: segments cross at p
            report.findings.push(Finding::DegeneratePlusVertex(p));
        }
    }
    report
}

/// One edge of the bipartite graph.
#[derive(Debug, Clone)]
pub struct GraphEdge {
    pub white: usize,
    pub black: usize,
    /// Counterclockwise edge vector of the tile along the segment.
    pub weight: Complex64,
}

/// The bipartite graph of a tiling with its planar rotation system, bounded
/// faces, and boundary identification.
#[derive(Debug, Clone)]
pub struct TGraph {
    pub num_whites: usize,
    pub segments: Vec<Segment>,
    pub edges: Vec<GraphEdge>,
    /// Edge ids in counterclockwise order around each tile.
    pub white_rot: Vec<Vec<usize>>,
    /// Edge ids in counterclockwise cyclic order around each segment.
    pub black_rot: Vec<Vec<usize>>,
    /// Bounded faces as cyclic edge-id lists; position 0 is a white-to-black
    /// dart, so even positions are the "numerator" edges of the alternating
    /// product.
    pub faces: Vec<Vec<usize>>,
    /// Black id of the boundary segment for each region edge, in order.
    pub boundary_blacks: Vec<usize>,
    pub region: Polygon,
    /// Centroid of each tile (used for embedding-dependent operations).
    pub white_pos: Vec<Point>,
}

impl TGraph {
    pub fn num_blacks(&self) -> usize {
        self.segments.len()
    }

    pub fn is_boundary(&self, b: usize) -> bool {
        self.segments[b].boundary_edge.is_some()
    }

    pub fn interior_blacks(&self) -> Vec<usize> {
        (0..self.segments.len()).filter(|&b| !self.is_boundary(b)).collect()
    }

    /// Column order B_int (ascending) followed by `b0`.
    pub fn b0_columns(&self, b0: usize) -> Vec<usize> {
        let mut cols = self.interior_blacks();
        cols.push(b0);
        cols
    }

    pub fn edge_between(&self, w: usize, b: usize) -> Option<usize> {
        self.white_rot[w]
            .iter()
            .copied()
            .find(|&e| self.edges[e].black == b)
    }

    /// Rebuild a graph from pure combinatorics: per-white (black, weight)
    /// lists in ccw rotation order, per-black edge-id rotations, and the
    /// ccw boundary identification. Segment geometry is left unset (dummy
    /// lines); only operations that ignore it (reconstruction, matchings,
    /// face bookkeeping) may be used on the result. The outer face is
    /// recognized combinatorially as the walk meeting the most distinct
    /// boundary blacks.
    pub fn from_combinatorics(
        num_whites: usize,
        white_adj: &[Vec<(usize, Complex64)>],
        black_rot: Vec<Vec<usize>>,
        boundary_blacks: Vec<usize>,
        region: Polygon,
    ) -> Result<TGraph, TilingError> {
        let num_blacks = black_rot.len();
        let mut edges = Vec::new();
        let mut white_rot = Vec::with_capacity(num_whites);
        for (w, adj) in white_adj.iter().enumerate() {
            let mut rot = Vec::with_capacity(adj.len());
            for &(b, weight) in adj {
                if b >= num_blacks {
                    return Err(TilingError::Inconsistent);
                }
                rot.push(edges.len());
                edges.push(GraphEdge { white: w, black: b, weight });
            }
            white_rot.push(rot);
        }
        for (b, rot) in black_rot.iter().enumerate() {
            for &e in rot {
                if e >= edges.len() || edges[e].black != b {
                    return Err(TilingError::Inconsistent);
                }
            }
        }
        let mut boundary_of = vec![None; num_blacks];
        for (i, &b) in boundary_blacks.iter().enumerate() {
            boundary_of[b] = Some(i);
        }
        // trace all faces of the rotation system, drop the outer one
        let mut visited = vec![[false; 2]; edges.len()];
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        let mut bb_counts: Vec<usize> = Vec::new();
        for e0 in 0..edges.len() {
            for dir0 in 0..2 {
                if visited[e0][dir0] {
                    continue;
                }
                let mut cycle: Vec<(usize, bool)> = Vec::new();
                let (mut e, mut w2b) = (e0, dir0 == 0);
                loop {
                    if visited[e][if w2b { 0 } else { 1 }] {
                        break;
                    }
                    visited[e][if w2b { 0 } else { 1 }] = true;
                    cycle.push((e, w2b));
                    let rot = if w2b {
                        &black_rot[edges[e].black]
                    } else {
                        &white_rot[edges[e].white]
                    };
                    let pos = rot.iter().position(|&x| x == e).ok_or(TilingError::Inconsistent)?;
                    let next = rot[(pos + rot.len() - 1) % rot.len()];
                    e = next;
                    w2b = !w2b;
                }
                let mut seen: Vec<usize> = cycle
                    .iter()
                    .map(|&(e, _)| edges[e].black)
                    .filter(|&b| boundary_of[b].is_some())
                    .collect();
                seen.sort_unstable();
                seen.dedup();
                bb_counts.push(seen.len());
                let start = cycle.iter().position(|&(_, w2b)| w2b).unwrap_or(0);
                cycles.push(
                    (0..cycle.len())
                        .map(|k| cycle[(start + k) % cycle.len()].0)
                        .collect(),
                );
            }
        }
        let outer = bb_counts
            .iter()
            .enumerate()
            .max_by_key(|&(_, &c)| c)
            .map(|(i, _)| i)
            .ok_or(TilingError::Inconsistent)?;
        let faces: Vec<Vec<usize>> = cycles
            .into_iter()
            .enumerate()
            .filter(|&(i, _)| i != outer)
            .map(|(_, c)| c)
            .collect();
        let segments = (0..num_blacks)
            .map(|b| Segment {
                line: Line::new(Direction::new(0.0), 0.0),
                p0: Point::default(),
                p1: Point::default(),
                boundary_edge: boundary_of[b],
                incidences: Vec::new(),
            })
            .collect();
        Ok(TGraph {
            num_whites,
            segments,
            edges,
            white_rot,
            black_rot,
            faces,
            boundary_blacks,
            region: region.canonicalized(EPS_GEOM),
            white_pos: vec![Point::default(); num_whites],
        })
    }

    /// Adjacency-only view for matching computations.
    pub fn bipartite(&self) -> BipartiteGraph {
        BipartiteGraph {
            num_whites: self.num_whites,
            num_blacks: self.num_blacks(),
            boundary: (0..self.num_blacks()).map(|b| self.is_boundary(b)).collect(),
            adj: self
                .white_rot
                .iter()
                .map(|es| es.iter().map(|&e| self.edges[e].black).collect())
                .collect(),
        }
    }
}

/// A bare bipartite graph with boundary-flagged blacks. Used for matching
/// oracles and for fixtures that are graphs rather than tilings.
#[derive(Debug, Clone)]
pub struct BipartiteGraph {
    pub num_whites: usize,
    pub num_blacks: usize,
    pub boundary: Vec<bool>,
    /// adj[w] = blacks adjacent to white w.
    pub adj: Vec<Vec<usize>>,
}

/// Build the bipartite graph of a valid tiling. Fails with the validation
/// report if the tiling is degenerate or invalid.
pub fn build_graph(t: &Tiling) -> Result<TGraph, TilingError> {
    build_graph_tol(t, EPS_GEOM)
}

pub fn build_graph_tol(t: &Tiling, tol: f64) -> Result<TGraph, TilingError> {
    let report = validate(t, tol);
    if !report.is_clean() {
        return Err(TilingError::InvalidTiling(report));
    }
    let segments = maximal_segments(&t.region, &t.tiles, tol);

    let mut edges: Vec<GraphEdge> = Vec::new();
    let mut white_edge_map: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); t.tiles.len()];
    for (b, seg) in segments.iter().enumerate() {
        for inc in &seg.incidences {
            let tile = &t.tiles[inc.white];
            let n = tile.vertices.len();
            let p = tile.vertices[inc.edge_idx];
            let q = tile.vertices[(inc.edge_idx + 1) % n];
            let v = q - p;
            let e = edges.len();
            edges.push(GraphEdge {
                white: inc.white,
                black: b,
                weight: Complex64::new(v.x, v.y),
            });
            white_edge_map[inc.white].insert(inc.edge_idx, e);
        }
    }
    // ccw order around tiles follows the canonical vertex order
    let white_rot: Vec<Vec<usize>> = white_edge_map
        .into_iter()
        .map(|m| m.into_values().collect())
        .collect();

    // rotation around each segment: -n side by increasing t, then +n side by
    // decreasing t (counterclockwise around the segment)
    let mut black_rot: Vec<Vec<usize>> = vec![Vec::new(); segments.len()];
    for (b, seg) in segments.iter().enumerate() {
        let mut below: Vec<(f64, usize)> = Vec::new();
        let mut above: Vec<(f64, usize)> = Vec::new();
        for inc in &seg.incidences {
            let mid = 0.5 * (inc.t0 + inc.t1);
            let tile = &t.tiles[inc.white];
            let n = tile.vertices.len();
            // find the edge id for this incidence
            let e = white_rot[inc.white]
                .iter()
                .copied()
                .find(|&e| edges[e].black == b && {
                    let p = tile.vertices[inc.edge_idx];
                    let q = tile.vertices[(inc.edge_idx + 1) % n];
                    let w = edges[e].weight;
                    (q - p - Point::new(w.re, w.im)).norm() < 1e-9
                })
                .expect("incidence has a graph edge");
            if inc.side < 0 {
                below.push((mid, e));
            } else {
                above.push((mid, e));
            }
        }
        below.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        above.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        black_rot[b] = below.into_iter().chain(above).map(|(_, e)| e).collect();
    }

    let white_pos: Vec<Point> = t.tiles.iter().map(|p| p.centroid()).collect();

    // boundary identification: one segment per region edge
    let mut boundary_blacks = Vec::with_capacity(t.region.len());
    for i in 0..t.region.len() {
        let b = segments
            .iter()
            .position(|s| s.boundary_edge == Some(i))
            .ok_or(TilingError::MissingBoundarySegment(i))?;
        boundary_blacks.push(b);
    }

    let faces = trace_bounded_faces(
        t.tiles.len(),
        segments.len(),
        &edges,
        &white_rot,
        &black_rot,
        &white_pos,
        &segments.iter().map(|s| (s.p0 + s.p1).scale(0.5)).collect::<Vec<_>>(),
    );

    let g = TGraph {
        num_whites: t.tiles.len(),
        segments,
        edges,
        white_rot,
        black_rot,
        faces,
        boundary_blacks,
        region: t.region.clone(),
        white_pos,
    };

    // Euler count |B| = |W| + n - 1
    if g.num_blacks() != g.num_whites + t.region.len() - 1 {
        return Err(TilingError::CountMismatch {
            whites: g.num_whites,
            blacks: g.num_blacks(),
            region_edges: t.region.len(),
        });
    }

    // weight-sum invariants
    let scale: f64 = g.edges.iter().map(|e| e.weight.norm()).fold(0.0, f64::max);
    for w in 0..g.num_whites {
        let s: Complex64 = g.white_rot[w].iter().map(|&e| g.edges[e].weight).sum();
        if s.norm() > 1e-10 * scale.max(1.0) {
            return Err(TilingError::WeightSum(s.norm()));
        }
    }
    for b in 0..g.num_blacks() {
        let s: Complex64 = g.black_rot[b].iter().map(|&e| g.edges[e].weight).sum();
        let target = match g.segments[b].boundary_edge {
            None => Complex64::new(0.0, 0.0),
            Some(i) => {
                let (p, q) = (t.region.vertices[i], t.region.vertices[(i + 1) % t.region.len()]);
                let v = q - p;
                Complex64::new(v.x, v.y)
            }
        };
        if (s - target).norm() > 1e-10 * scale.max(1.0) {
            return Err(TilingError::WeightSum((s - target).norm()));
        }
    }
    Ok(g)
}

/// Trace the faces of the planar map given the rotation system, and return
/// the bounded ones as cyclic edge-id lists starting with a white-to-black
/// dart. The outer face is identified by the signed area of its embedded
/// vertex cycle.
#[allow(clippy::too_many_arguments)]
pub fn trace_bounded_faces(
    num_whites: usize,
    num_blacks: usize,
    edges: &[GraphEdge],
    white_rot: &[Vec<usize>],
    black_rot: &[Vec<usize>],
    white_pos: &[Point],
    black_pos: &[Point],
) -> Vec<Vec<usize>> {
    let _ = (num_whites, num_blacks);
    // dart = (edge, white_to_black)
    let mut visited = vec![[false; 2]; edges.len()];
    let mut faces = Vec::new();
    let mut outer = None;
    for e0 in 0..edges.len() {
        for dir0 in 0..2 {
            if visited[e0][dir0] {
                continue;
            }
            let mut cycle: Vec<(usize, bool)> = Vec::new();
            let (mut e, mut w2b) = (e0, dir0 == 0);
            loop {
                if visited[e][if w2b { 0 } else { 1 }] {
                    break;
                }
                visited[e][if w2b { 0 } else { 1 }] = true;
                cycle.push((e, w2b));
                // move to the head vertex and take the previous edge in its
                // ccw rotation (traverses the face to the left of the dart)
                let rot = if w2b {
                    &black_rot[edges[e].black]
                } else {
                    &white_rot[edges[e].white]
                };
                let pos = rot.iter().position(|&x| x == e).expect("edge in rotation");
                let next = rot[(pos + rot.len() - 1) % rot.len()];
                e = next;
                w2b = !w2b;
            }
            // signed area of the embedded cycle: outer face is clockwise
            let pts: Vec<Point> = cycle
                .iter()
                .map(|&(e, w2b)| {
                    if w2b {
                        white_pos[edges[e].white]
                    } else {
                        black_pos[edges[e].black]
                    }
                })
                .collect();
            let area = crate::geom::signed_area(&pts).unwrap_or(0.0);
            // rotate so the cycle starts with a white-to-black dart
            let start = cycle.iter().position(|&(_, w2b)| w2b).unwrap_or(0);
            let ids: Vec<usize> = (0..cycle.len())
                .map(|k| cycle[(start + k) % cycle.len()].0)
                .collect();
            if area < 0.0 && outer.is_none() {
                outer = Some(faces.len());
                faces.push(None);
            } else {
                faces.push(Some(ids));
            }
        }
    }
    faces.into_iter().flatten().collect()
}

/// Signed intercepts of the interior segments (and optionally one boundary
/// segment `b0`), using the global normal convention. Returned in the
/// `b0_columns` order when `free_boundary` is given, otherwise ascending
/// interior black order.
pub fn intercepts(g: &TGraph, free_boundary: Option<usize>) -> Vec<(usize, f64)> {
    let mut blacks = g.interior_blacks();
    if let Some(b0) = free_boundary {
        blacks.push(b0);
    }
    blacks
        .into_iter()
        .map(|b| (b, g.segments[b].line.intercept))
        .collect()
}

/// Orientation vector of a tiling relative to itself: +1 for every tile by
/// convention; errors on zero-area tiles.
pub fn orientation_vector(t: &Tiling, tol: f64) -> Result<Vec<i8>, TilingError> {
    let mut sigma = Vec::with_capacity(t.tiles.len());
    for (w, tile) in t.tiles.iter().enumerate() {
        let a = tile.signed_area();
        if libm::fabs(a) <= tol {
            return Err(TilingError::DegenerateTile(w));
        }
        sigma.push(if a > 0.0 { 1 } else { -1 });
    }
    Ok(sigma)
}

/// Canonical code of the graph rooted at the boundary: label vertices by a
/// deterministic traversal that respects the rotation system and the
/// boundary identification. Two graphs are combinatorially equivalent iff
/// their codes are equal.
fn canonical_code(g: &TGraph) -> Vec<i64> {
    #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
    enum V {
        White(usize),
        Black(usize),
    }
    let nb = g.num_blacks();
    let vid = |v: V| match v {
        V::White(w) => w,
        V::Black(b) => g.num_whites + b,
    };
    // canonical neighbor order as darts: for boundary blacks, linear order
    // along the ccw region edge direction; otherwise rotation order starting
    // after the arrival edge.
    let boundary_order = |b: usize| -> Vec<usize> {
        let i = g.segments[b].boundary_edge.expect("boundary black");
        let p = g.region.vertices[i];
        let q = g.region.vertices[(i + 1) % g.region.len()];
        let d = q - p;
        let mut es: Vec<(f64, usize)> = g.black_rot[b]
            .iter()
            .map(|&e| {
                let w = g.edges[e].white;
                (g.white_pos[w].dot(d), e)
            })
            .collect();
        es.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        es.into_iter().map(|(_, e)| e).collect()
    };
    let neighbor_edges = |v: V, arrival: Option<usize>| -> Vec<usize> {
        match v {
            V::Black(b) if g.is_boundary(b) => boundary_order(b),
            V::Black(b) => rotate_after(&g.black_rot[b], arrival),
            V::White(w) => rotate_after(&g.white_rot[w], arrival),
        }
    };
    fn rotate_after(rot: &[usize], arrival: Option<usize>) -> Vec<usize> {
        match arrival {
            None => rot.to_vec(),
            Some(a) => {
                let pos = rot.iter().position(|&x| x == a).expect("arrival in rotation");
                (1..=rot.len()).map(|k| rot[(pos + k) % rot.len()]).collect()
            }
        }
    }

    let total = g.num_whites + nb;
    let mut label = vec![usize::MAX; total];
    let mut arrival_of = vec![None; total];
    let mut order: Vec<V> = Vec::new();
    let root = V::Black(g.boundary_blacks[0]);
    label[vid(root)] = 0;
    order.push(root);
    let mut queue = vec![root];
    while let Some(v) = queue.pop() {
        // depth-first with deterministic edge order; pop from the back but
        // push in reverse so neighbors are visited in canonical order
        let es = neighbor_edges(v, arrival_of[vid(v)]);
        let mut to_push = Vec::new();
        for e in es {
            let u = match v {
                V::White(_) => V::Black(g.edges[e].black),
                V::Black(_) => V::White(g.edges[e].white),
            };
            if label[vid(u)] == usize::MAX {
                label[vid(u)] = order.len();
                arrival_of[vid(u)] = Some(e);
                order.push(u);
                to_push.push(u);
            }
        }
        for u in to_push.into_iter().rev() {
            queue.push(u);
        }
    }
    // emit: per vertex in label order: color, boundary tag, neighbor labels
    let mut code: Vec<i64> = vec![
        g.num_whites as i64,
        nb as i64,
        g.region.len() as i64,
    ];
    for &v in &order {
        match v {
            V::White(_) => {
                code.push(-2);
            }
            V::Black(b) => {
                code.push(match g.segments[b].boundary_edge {
                    Some(i) => i as i64,
                    None => -1,
                });
            }
        }
        let es = neighbor_edges(v, arrival_of[vid(v)]);
        code.push(es.len() as i64);
        for e in es {
            let u = match v {
                V::White(_) => V::Black(g.edges[e].black),
                V::Black(_) => V::White(g.edges[e].white),
            };
            code.push(label[vid(u)] as i64);
        }
    }
    code
}

/// True iff the two graphs are isomorphic respecting colors, the planar
/// embedding, and the identification of boundary blacks with region edges.
pub fn combinatorially_equivalent(g1: &TGraph, g2: &TGraph) -> bool {
    if g1.num_whites != g2.num_whites
        || g1.num_blacks() != g2.num_blacks()
        || g1.edges.len() != g2.edges.len()
        || g1.region.len() != g2.region.len()
    {
        return false;
    }
    canonical_code(g1) == canonical_code(g2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn validate_sq2_clean() {
        let t = fixtures::sq2();
        assert!(validate(&t, EPS_GEOM).is_clean());
    }

    #[test]
    fn validate_quadrants_degenerate() {
        let t = fixtures::deg_plus();
        let r = validate(&t, EPS_GEOM);
        assert_eq!(r.findings.len(), 1);
        match &r.findings[0] {
            Finding::DegeneratePlusVertex(p) => {
                assert!(p.dist(Point::new(0.5, 0.5)) < 1e-9);
            }
            f => panic!("unexpected finding {:?}", f),
        }
    }

    #[test]
    fn validate_pin5_clean() {
        let t = fixtures::pin5();
        assert!(validate(&t, EPS_GEOM).is_clean());
        // all 8 interior tile-vertices are T's: count tile vertices not at
        // region corners
        let g = build_graph(&t).unwrap();
        let mut interior_vertices = 0;
        for tile in &t.tiles {
            for &v in &tile.vertices {
                if !t.region.vertices.iter().any(|&c| c.dist(v) < 1e-9) {
                    interior_vertices += 1;
                    let crossbars = g
                        .segments
                        .iter()
                        .filter(|s| s.strictly_contains(v, 1e-9))
                        .count();
                    assert_eq!(crossbars, 1);
                }
            }
        }
        assert_eq!(interior_vertices, 16);
    }

    #[test]
    fn build_graph_sq2() {
        let t = fixtures::sq2();
        let g = build_graph(&t).unwrap();
        assert_eq!(g.num_whites, 2);
        assert_eq!(g.num_blacks(), 5);
        assert_eq!(g.interior_blacks().len(), 1);
        let b = g.interior_blacks()[0];
        assert!((g.segments[b].line.intercept - 0.4).abs() < 1e-12);
        // both bounded faces are quads
        assert_eq!(g.faces.len(), 2);
        assert!(g.faces.iter().all(|f| f.len() == 4));
    }

    #[test]
    fn build_graph_pin5() {
        let g = build_graph(&fixtures::pin5()).unwrap();
        assert_eq!(g.num_whites, 5);
        assert_eq!(g.num_blacks(), 8);
        assert_eq!(g.interior_blacks().len(), 4);
        assert!(g.faces.iter().all(|f| f.len() == 4));
        // Euler: F_bounded = E - V + 1
        assert_eq!(g.faces.len(), g.edges.len() - (g.num_whites + g.num_blacks()) + 1);
    }

    #[test]
    fn build_graph_sq3() {
        let g = build_graph(&fixtures::sq3()).unwrap();
        assert_eq!(g.num_whites, 3);
        assert_eq!(g.num_blacks(), 6);
        assert_eq!(g.interior_blacks().len(), 2);
    }

    #[test]
    fn intercepts_examples() {
        let t = fixtures::sq2();
        let g = build_graph(&t).unwrap();
        let ints = intercepts(&g, None);
        assert_eq!(ints.len(), 1);
        assert!((ints[0].1 - 0.4).abs() < 1e-12);

        let t2 = t.translate(Point::new(5.0, 5.0));
        let g2 = build_graph(&t2).unwrap();
        let ints2 = intercepts(&g2, None);
        assert!((ints2[0].1 - 5.4).abs() < 1e-12);
    }

    #[test]
    fn pin5_intercepts_hand_check() {
        let g = build_graph(&fixtures::pin5()).unwrap();
        let mut vals: Vec<f64> = intercepts(&g, None).into_iter().map(|(_, v)| v).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // lines y=1, y=2 have intercepts 1, 2; x=1, x=2 have n=(-1,0): -1, -2
        let mut expect = vec![1.0, 2.0, -1.0, -2.0];
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (v, e) in vals.iter().zip(&expect) {
            assert!((v - e).abs() < 1e-12);
        }
    }

    #[test]
    fn combinatorial_equivalence() {
        let g1 = build_graph(&fixtures::sq2()).unwrap();
        let g2 = build_graph(&fixtures::sq2_cut(0.7)).unwrap();
        assert!(combinatorially_equivalent(&g1, &g2));
        let g3 = build_graph(&fixtures::sq3()).unwrap();
        assert!(!combinatorially_equivalent(&g1, &g3));
    }

    #[test]
    fn combinatorics_round_trip() {
        // Strip a built graph down to pure combinatorics and rebuild it;
        // faces, rotations and boundary data must survive.
        for name in ["SQ2", "SQ3", "PIN5", "TRI4", "STACK3", "HEX6"] {
            let t = fixtures::by_name(name).unwrap();
            let g = build_graph(&t).unwrap();
            let mut white_adj: Vec<Vec<(usize, crate::Complex64)>> =
                Vec::with_capacity(g.num_whites);
            let mut newid = vec![usize::MAX; g.edges.len()];
            let mut next = 0usize;
            for w in 0..g.num_whites {
                let mut adj = Vec::new();
                for &e in &g.white_rot[w] {
                    newid[e] = next;
                    next += 1;
                    adj.push((g.edges[e].black, g.edges[e].weight));
                }
                white_adj.push(adj);
            }
            let black_rot: Vec<Vec<usize>> = g
                .black_rot
                .iter()
                .map(|rot| rot.iter().map(|&e| newid[e]).collect())
                .collect();
            let g2 = TGraph::from_combinatorics(
                g.num_whites,
                &white_adj,
                black_rot,
                g.boundary_blacks.clone(),
                g.region.clone(),
            )
            .unwrap();
            assert_eq!(g2.faces.len(), g.faces.len(), "{}", name);
            assert_eq!(g2.boundary_blacks, g.boundary_blacks, "{}", name);
            // face multisets agree after the edge renumbering
            let key = |gg: &TGraph, f: &[usize]| -> Vec<(usize, usize)> {
                let mut k: Vec<(usize, usize)> =
                    f.iter().map(|&e| (gg.edges[e].white, gg.edges[e].black)).collect();
                let m = k.iter().enumerate().min_by_key(|&(_, v)| v).unwrap().0;
                k.rotate_left(m);
                k
            };
            let mut f1: Vec<_> = g.faces.iter().map(|f| key(&g, f)).collect();
            let mut f2: Vec<_> = g2.faces.iter().map(|f| key(&g2, f)).collect();
            f1.sort();
            f2.sort();
            assert_eq!(f1, f2, "{}", name);
        }
    }

    #[test]
    fn mirrored_pinwheel_is_equivalent() {
        // The anti-pinwheel's graph admits an orientation-preserving
        // isomorphism to the pinwheel's that fixes every region edge
        // (w0<->w1, w2<->w3 swapped, center fixed), so the two are
        // combinatorially equivalent even though the drawings differ.
        let t = fixtures::pin5();
        let reflect = |p: &Polygon| {
            Polygon::new(p.vertices.iter().map(|v| Point::new(3.0 - v.x, v.y)).collect())
                .reversed()
        };
        let tr = Tiling::new(reflect(&t.region), t.tiles.iter().map(reflect).collect());
        assert!(validate(&tr, EPS_GEOM).is_clean());
        let g1 = build_graph(&t).unwrap();
        let g2 = build_graph(&tr).unwrap();
        assert!(combinatorially_equivalent(&g1, &g2));
    }

    #[test]
    fn equivalence_is_reflexive_and_translation_invariant() {
        for t in [fixtures::sq2(), fixtures::sq3(), fixtures::pin5()] {
            let g = build_graph(&t).unwrap();
            assert!(combinatorially_equivalent(&g, &g));
            let g2 = build_graph(&t.translate(Point::new(-3.0, 2.0))).unwrap();
            assert!(combinatorially_equivalent(&g, &g2));
        }
    }

    #[test]
    fn orientation_vector_fresh_tiling() {
        let t = fixtures::pin5();
        let sigma = orientation_vector(&t, EPS_GEOM).unwrap();
        assert!(sigma.iter().all(|&s| s == 1));
    }
}
