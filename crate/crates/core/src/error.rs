use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// Each variant maps to a stable reason code (see [`Error::code`]) used by
/// the CLI diagnostics and the C ABI.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("potential is singular at x = {at}")]
    Singularity { at: f64 },

    #[error("hard node at x = {at} is not a grid point")]
    Alignment { at: f64 },

    #[error("recursion denominator vanishes at j = {j}")]
    DegenerateRecursion { j: usize },

    #[error("cut-off {epsilon} is not resolved by grid spacing {spacing}")]
    Resolution { epsilon: f64, spacing: f64 },

    #[error("convergence failure: {0}")]
    Convergence(String),

    #[error("integration failure: {0}")]
    Integration(String),

    #[error("bracket error: {0}")]
    Bracket(String),

    #[error("extrapolation error: {0}")]
    Extrapolation(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: &'static str, right: &'static str },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Short machine-readable reason code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Singularity { .. } => "singularity",
            Error::Alignment { .. } => "alignment",
            Error::DegenerateRecursion { .. } => "degenerate_recursion",
            Error::Resolution { .. } => "resolution",
            Error::Convergence(_) => "convergence",
            Error::Integration(_) => "integration",
            Error::Bracket(_) => "bracket",
            Error::Extrapolation(_) => "extrapolation",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::Parse(_) => "parse",
        }
    }

    /// True for failures of a numerical procedure, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Convergence(_) | Error::Integration(_) | Error::Extrapolation(_) | Error::DegenerateRecursion { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
