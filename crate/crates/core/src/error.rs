use num_complex::Complex64;
use thiserror::Error;

use crate::lattice::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("lattice spacing must be positive, got {0}")]
    InvalidSpacing(f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid lattice specification: {}", join_violations(.0))]
    InvalidSpec(Vec<Violation>),

    #[error("constrained zero-wavenumber operator is singular (disconnected lattice?)")]
    SingularSolve,

    #[error("slow manifold did not converge after {iterations} sweeps (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("interior steady block is singular")]
    SingularInterior,

    #[error(
        "cell map spectrum does not split as (s-1, 2, s-1): found ({stable}, {centre}, {unstable}); eigenvalues {eigenvalues:?}"
    )]
    UnexpectedSpectrum {
        stable: usize,
        centre: usize,
        unstable: usize,
        eigenvalues: Vec<Complex64>,
    },

    #[error("eigenvalue one is not defective (geometric multiplicity > 1)")]
    NoJordanChain,

    #[error("boundary kind {kind} is only available for two strands (got s = {s})")]
    KindUnsupported { kind: &'static str, s: usize },

    #[error("left null space has dimension {found}, expected {expected}")]
    NullSpaceDimension { expected: usize, found: usize },

    #[error("closed form not available: {0}")]
    OutOfScope(String),

    #[error("eigen solver failure: {0}")]
    Eigen(String),

    #[error("no eigenvalue root in bracket (0, {upper})")]
    NoRootInBracket { upper: f64 },

    #[error("boundary data: {0}")]
    BoundaryData(String),

    #[error("config {path}: {message}")]
    Parse { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable machine-readable code, one token, used by the command line front end.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidSpacing(_) => "INVALID_SPACING",
            Error::DimensionMismatch { .. } => "DIMENSION_MISMATCH",
            Error::InvalidSpec(_) => "VALIDATION_ERROR",
            Error::SingularSolve => "SINGULAR_SOLVE",
            Error::NotConverged { .. } => "NOT_CONVERGED",
            Error::SingularInterior => "SINGULAR_INTERIOR",
            Error::UnexpectedSpectrum { .. } => "UNEXPECTED_SPECTRUM",
            Error::NoJordanChain => "NO_JORDAN_CHAIN",
            Error::KindUnsupported { .. } => "KIND_UNSUPPORTED",
            Error::NullSpaceDimension { .. } => "NULL_SPACE_DIMENSION",
            Error::OutOfScope(_) => "OUT_OF_SCOPE",
            Error::Eigen(_) => "EIGEN_FAILURE",
            Error::NoRootInBracket { .. } => "NO_ROOT_IN_BRACKET",
            Error::BoundaryData(_) => "BOUNDARY_DATA",
            Error::Parse { .. } => "PARSE_ERROR",
            Error::Io(_) => "IO_ERROR",
            Error::Csv(_) => "IO_ERROR",
        }
    }
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
