//! CLI error taxonomy mapped to process exit codes.

use std::fmt;

use tgraph_core::areamap::AreaMapError;
use tgraph_core::dimer::DimerError;
use tgraph_core::homology::HomologyError;
use tgraph_core::solvers::SolverError;
use tgraph_core::tiling::TilingError;

/// Exit code 2: the input data failed validation.
pub const EXIT_VALIDATION: i32 = 2;
/// Exit code 3: a numerical procedure failed to produce a trustworthy result.
pub const EXIT_NUMERICAL: i32 = 3;
/// Exit code 64: the command line itself was malformed.
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable arguments, unusable paths.
    Usage(String),
    /// Input data parsed but is not a valid instance.
    Data(String),
    /// Computation could not reach the required accuracy.
    Numerical(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_VALIDATION,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {}", m),
            CliError::Data(m) => write!(f, "validation failure: {}", m),
            CliError::Numerical(m) => write!(f, "numerical failure: {}", m),
        }
    }
}

impl From<TilingError> for CliError {
    fn from(e: TilingError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<DimerError> for CliError {
    fn from(e: DimerError) -> Self {
        match e {
            DimerError::NotBoundary(_) => CliError::Usage(e.to_string()),
            DimerError::TooLarge(_) | DimerError::ZeroWeight { .. } | DimerError::SupportMismatch => {
                CliError::Data(e.to_string())
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::NotATiling(_)
            | SolverError::IncompatibleShapes { .. }
            | SolverError::BoundaryMismatch { .. }
            | SolverError::BadWeight { .. }
            | SolverError::TooLarge(_) => CliError::Data(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<HomologyError> for CliError {
    fn from(e: HomologyError) -> Self {
        match e {
            HomologyError::BadAreas | HomologyError::TooLarge(_) => CliError::Data(e.to_string()),
            HomologyError::Tiling(t) => CliError::Data(t.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<AreaMapError> for CliError {
    fn from(e: AreaMapError) -> Self {
        match e {
            AreaMapError::NonQuadFace { .. } | AreaMapError::ParallelLines { .. } => {
                CliError::Data(e.to_string())
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}
