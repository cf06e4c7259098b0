//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point {t} is not a member of the scale")]
    QueryOutsideScale { t: f64 },

    #[error("point {t} is the scale maximum; no forward jump exists")]
    UnboundedQuery { t: f64 },

    #[error("point {t} lies outside the window [{a}, {b}]")]
    QueryOutsideWindow { t: f64, a: f64, b: f64 },

    #[error("window [{a}, {b}] is degenerate for this scale")]
    DegenerateWindow { a: f64, b: f64 },

    #[error("scale is not a subset of the superscale; witness point {witness}")]
    NotSubset { witness: f64 },

    #[error("integrand is not differentiable at right-dense point {t}")]
    NotDifferentiable { t: f64 },

    #[error("integrand is not non-decreasing; violation sampled at {t}")]
    NotMonotone { t: f64 },

    #[error("Riemann sums did not stabilize after {halvings} halvings (last difference {last_diff:e})")]
    NoConvergence { halvings: u32, last_diff: f64 },

    #[error("chain is not ascending: scale {index} is not contained in scale {}; witness point {witness}", index + 1)]
    ChainNotAscending { index: usize, witness: f64 },

    #[error("chain hypothesis violated: {reason}")]
    HypothesisViolated { reason: String },

    #[error("sequence lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("syntax error at byte {position}: expected {expected}")]
    Syntax { position: usize, expected: String },

    #[error("domain error: {reason} at s = {s}")]
    Domain { reason: &'static str, s: f64 },

    #[error("invalid scale: {0}")]
    InvalidScale(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Short machine-parsable code, used as the reason prefix on CLI stderr.
    pub fn code(&self) -> &'static str {
        match self {
            Error::QueryOutsideScale { .. } => "query-outside-scale",
            Error::UnboundedQuery { .. } => "unbounded-query",
            Error::QueryOutsideWindow { .. } => "query-outside-window",
            Error::DegenerateWindow { .. } => "degenerate-window",
            Error::NotSubset { .. } => "not-subset",
            Error::NotDifferentiable { .. } => "not-differentiable",
            Error::NotMonotone { .. } => "not-monotone",
            Error::NoConvergence { .. } => "no-convergence",
            Error::ChainNotAscending { .. } => "chain-not-ascending",
            Error::HypothesisViolated { .. } => "hypothesis-violated",
            Error::LengthMismatch { .. } => "length-mismatch",
            Error::Syntax { .. } => "syntax-error",
            Error::Domain { .. } => "domain-error",
            Error::InvalidScale(_) => "invalid-scale",
            Error::InvalidArgument(_) => "invalid-argument",
        }
    }

    /// Process exit code the CLI maps this error to.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NoConvergence { .. } => 3,
            Error::ChainNotAscending { .. } | Error::HypothesisViolated { .. } => 4,
            _ => 2,
        }
    }
}
