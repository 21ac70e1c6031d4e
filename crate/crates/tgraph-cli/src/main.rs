//! `tgraph`: compute with tilings of polygons by convex tiles.
//!
//! Exit codes: 0 success, 2 validation failure, 3 numerical failure,
//! 64 usage error.

mod commands;
mod error;
mod json;
mod svg;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use error::EXIT_USAGE;

/// Tilings of polygons by convex tiles: bipartite graph extraction,
/// Kasteleyn matrices, shape prescription, reconstruction, intercept-to-area
/// maps and homology tilings.
///
/// Tiling arguments accept a built-in fixture name (SQ2, SQ3, PIN5, TRI4,
/// STACK3, HEX6, DEG-PLUS) or a path to a tiling JSON document. The
/// environment variable TGRAPH_TOL overrides the geometric tolerance.
#[derive(Parser)]
#[command(name = "tgraph", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check that a tiling is a valid nondegenerate convex tiling.
    Validate {
        /// Fixture name or tiling JSON path.
        tiling: String,
    },
    /// Emit the bipartite t-graph (whites = tiles, blacks = maximal
    /// segments) with rotation data and Euler counts.
    Graph {
        tiling: String,
    },
    /// Emit the complex Kasteleyn matrix; optionally verify |det K0|
    /// against the brute-force weighted matching sum.
    Kasteleyn {
        tiling: String,
        /// Compare |det K0| to the enumerated matching sum.
        #[arg(long)]
        verify: bool,
        /// Boundary segment whose column joins the interior columns in K0.
        #[arg(long, default_value_t = 0)]
        b0: usize,
    },
    /// Replace every tile by a homothety of a prescribed shape and re-tile.
    Shapes {
        tiling: String,
        /// Shapes JSON path: {"shapes": [[[x,y],...], ...]}.
        shapes: String,
    },
    /// Rebuild a tiling of a region from graph combinatorics and weights.
    Reconstruct {
        /// Graph JSON path (as produced by `graph`).
        graph: String,
        /// Region JSON path: [[x,y],...] or {"region": [...]}.
        region: String,
    },
    /// Invert the intercepts-to-areas map for prescribed tile areas.
    Areas {
        tiling: String,
        /// Target area per tile, comma-separated.
        #[arg(long, required = true, value_delimiter = ',')]
        target: Vec<f64>,
        /// Boundary segment left free (default: first boundary segment).
        #[arg(long)]
        b0: Option<usize>,
    },
    /// Solve for the homology tiling with prescribed areas and orientations.
    Homology {
        tiling: String,
        /// Areas per tile (positive, summing to area(R)), comma-separated.
        #[arg(long, required = true, value_delimiter = ',')]
        areas: Vec<f64>,
        /// Orientation per tile as a +/- string, e.g. "++-+". Default all +.
        #[arg(long)]
        sigma: Option<String>,
    },
    /// Try every orientation sector and report which ones carry a solution.
    Sectors {
        tiling: String,
        #[arg(long, required = true, value_delimiter = ',')]
        areas: Vec<f64>,
    },
    /// Render a result document (tiling, validate, homology or sectors
    /// output) as deterministic SVG.
    Render {
        /// Result JSON path or fixture name.
        result: String,
        /// Output SVG path; stdout when omitted.
        #[arg(short, long)]
        out: Option<String>,
    },
}

fn dispatch(cmd: &Cmd) -> Result<(String, i32), error::CliError> {
    match cmd {
        Cmd::Validate { tiling } => commands::cmd_validate(tiling),
        Cmd::Graph { tiling } => commands::cmd_graph(tiling),
        Cmd::Kasteleyn { tiling, verify, b0 } => commands::cmd_kasteleyn(tiling, *verify, *b0),
        Cmd::Shapes { tiling, shapes } => commands::cmd_shapes(tiling, shapes),
        Cmd::Reconstruct { graph, region } => commands::cmd_reconstruct(graph, region),
        Cmd::Areas { tiling, target, b0 } => commands::cmd_areas(tiling, target, *b0),
        Cmd::Homology { tiling, areas, sigma } => {
            commands::cmd_homology(tiling, areas, sigma.as_deref())
        }
        Cmd::Sectors { tiling, areas } => commands::cmd_sectors(tiling, areas),
        Cmd::Render { result, out } => commands::cmd_render(result, out.as_deref()),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match dispatch(&cli.cmd) {
        Ok((stdout, code)) => {
            print!("{}", stdout);
            std::process::exit(code);
        }
        Err(e) => {
            eprintln!("{}", e);
            std::process::exit(e.code());
        }
    }
}
