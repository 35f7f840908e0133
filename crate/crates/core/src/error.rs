//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Adaptive quadrature could not reach the requested tolerance within its
    /// subdivision budget.
    #[error("quadrature did not converge: {0}")]
    QuadratureNotConverged(String),

    /// A structural identity that must hold for consistent inputs failed,
    /// e.g. kappa4 - 3*kappa22 != 0 for a radial kernel.
    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    /// Inputs refer to different ambient dimensions.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A rectangle needs at least one side.
    #[error("rectangle requires a non-empty side list")]
    EmptySideList,

    /// Operation defined only for a restricted set of ambient dimensions.
    #[error("unsupported dimension N={0}")]
    UnsupportedDimension(usize),

    /// Scale or eigenvalue band has zero (or negative) width.
    #[error("degenerate range: {0}")]
    DegenerateRange(String),

    /// Requested exceedance level lies outside the monotone tail of the
    /// expected-Euler-characteristic curve.
    #[error("level {alpha} not attainable on the monotone tail (max {max})")]
    LevelNotAttainable { alpha: f64, max: f64 },

    /// Eigenvalues must be sorted ascending.
    #[error("input vector must be ordered ascending")]
    UnorderedInput,

    /// Grid spacing exceeds the resolution rule spacing <= sigma_min/4.
    #[error("grid spacing {spacing} too coarse, need <= {max}")]
    ResolutionTooCoarse { spacing: f64, max: f64 },

    /// Padding margin below the 5*sigma_max rule.
    #[error("padding {pad} sigma_max too small, need >= {min}")]
    PaddingTooSmall { pad: f64, min: f64 },

    /// Monte-Carlo tube volumes need a sampleable shape (rectangle or ball).
    #[error("operation requires a rectangle or ball shape")]
    UnsupportedShape,

    /// Bad run configuration (CLI / config file level).
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
}

impl Error {
    /// Stable process exit code for each error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ConfigInvalid(_) => 2,
            Error::QuadratureNotConverged(_) => 3,
            Error::InvariantViolation(_) => 4,
            Error::DimensionMismatch { .. } => 5,
            Error::UnsupportedDimension(_) => 6,
            Error::DegenerateRange(_) | Error::EmptySideList => 7,
            Error::LevelNotAttainable { .. } => 8,
            Error::UnorderedInput => 9,
            Error::ResolutionTooCoarse { .. } | Error::PaddingTooSmall { .. } => 10,
            Error::UnsupportedShape => 11,
        }
    }

    /// Short machine-readable tag for structured error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::QuadratureNotConverged(_) => "QuadratureNotConverged",
            Error::InvariantViolation(_) => "InvariantViolation",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::EmptySideList => "EmptySideList",
            Error::UnsupportedDimension(_) => "UnsupportedDimension",
            Error::DegenerateRange(_) => "DegenerateRange",
            Error::LevelNotAttainable { .. } => "LevelNotAttainable",
            Error::UnorderedInput => "UnorderedInput",
            Error::ResolutionTooCoarse { .. } => "ResolutionTooCoarse",
            Error::PaddingTooSmall { .. } => "PaddingTooSmall",
            Error::UnsupportedShape => "UnsupportedShape",
            Error::ConfigInvalid(_) => "ConfigInvalid",
        }
    }
}
