use thiserror::Error;

/// Errors raised by the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("negative time t = {0}")]
    NegativeTime(f64),
    #[error("time must be strictly positive, got t = {0}")]
    NonpositiveTime(f64),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("derivative is singular at t = {t}")]
    SingularPoint { t: f64 },
    #[error("finite-difference step {step} underflows at t = {t}")]
    StepUnderflow { step: f64, t: f64 },
    #[error("grid has {0} points, at least 3 are required")]
    GridTooCoarse(usize),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("t = {t} lies outside the domain [{min}, {max}]")]
    Domain { t: f64, min: f64, max: f64 },
    #[error("cannot invert discount function at level {target}")]
    InversionFailure { target: f64 },
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("invalid mixture weights: {0}")]
    WeightError(String),
    #[error("mixture has no components")]
    EmptyMixture,
    #[error("degenerate mixture: {0}")]
    DegenerateMixture(String),
    #[error("components are not a decreasing-impatience chain: {0}")]
    NotComparable(String),
    #[error("invalid bundle: {0}")]
    InvalidBundle(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema error: {0}")]
    Schema(String),
}

impl Error {
    /// Stable machine-readable name of the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NegativeTime(_) => "negative_time",
            Error::NonpositiveTime(_) => "nonpositive_time",
            Error::InvalidParameters(_) => "invalid_parameters",
            Error::SingularPoint { .. } => "singular_point",
            Error::StepUnderflow { .. } => "step_underflow",
            Error::GridTooCoarse(_) => "grid_too_coarse",
            Error::InvalidGrid(_) => "grid_error",
            Error::Domain { .. } => "domain_error",
            Error::InversionFailure { .. } => "inversion_failure",
            Error::DegenerateInput(_) => "degenerate_input",
            Error::WeightError(_) => "weight_error",
            Error::EmptyMixture => "empty_mixture",
            Error::DegenerateMixture(_) => "degenerate_mixture",
            Error::NotComparable(_) => "not_comparable",
            Error::InvalidBundle(_) => "invalid_bundle",
            Error::Parse(_) => "parse_error",
            Error::Schema(_) => "schema_error",
        }
    }

    /// True for errors caused by malformed input text rather than by the mathematics.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse(_) | Error::Schema(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
