//! Computing with tilings of polygons by convex tiles.
//!
//! A nondegenerate convex tiling (a "t-graph") carries a bipartite planar
//! graph: one white vertex per tile, one black vertex per maximal segment in
//! the union of tile boundaries. The complex weighted adjacency matrix of
//! that graph is a Kasteleyn matrix, and when the graph has quadrilateral
//! faces it is also the differential of the map from segment intercepts to
//! tile areas. This crate builds the graph, checks and exploits the Kasteleyn
//! structure, solves the shape-prescription and graph-to-tiling
//! reconstruction problems, and solves for homology tilings with prescribed
//! areas and orientations by concave maximization.
//!
//! The crate is `no_std` (with `alloc`); IO, file formats and the CLI live in
//! the companion `tgraph-cli` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod areamap;
pub mod dimer;
pub mod fixtures;
pub mod geom;
pub mod homology;
pub mod linalg;
pub mod rng;
pub mod solvers;
pub mod tiling;

/// Default absolute tolerance for collinearity, parallelism and point
/// coincidence. Inputs are assumed to be O(1)-scale ("desk scale").
pub const EPS_GEOM: f64 = 1e-9;

pub use num_complex::Complex64;
