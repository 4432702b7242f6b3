use thiserror::Error;

/// Errors raised by the numerical kernels.
///
/// Variants split into two families: argument validation (bad input, unmet
/// preconditions) and numerical guards (singular evaluation points, exhausted
/// precision, cost limits). [`Error::is_numerical_guard`] tells them apart so
/// front-ends can map them to distinct exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("series flagged real-valued is not Hermitian (n = {n}, mismatch {mismatch:e})")]
    NonHermitian { n: i64, mismatch: f64 },

    #[error("operation requires a real-valued series")]
    NotReal,

    #[error("evaluation point {x} coincides with a breakpoint")]
    SingularPoint { x: f64 },

    #[error("p = {p} and q = {q} are not coprime")]
    NotCoprime { p: u64, q: u64 },

    #[error("q = {q} exceeds the cost guard {limit}")]
    CostGuard { q: u64, limit: u64 },

    #[error("floating-point precision exhausted after {reached} partial quotients (requested {requested})")]
    PrecisionExhausted { reached: usize, requested: usize },

    #[error("expansion too shallow: {0}")]
    DepthInsufficient(String),

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("phase reduction out of range: |n| = {n} exceeds {limit}")]
    PhaseRange { n: u64, limit: u64 },

    #[error("scale j = {j} needs truncation order >= {needed}, series has N = {have}")]
    ScaleExceedsTruncation { j: u32, needed: usize, have: usize },

    #[error("need at least {needed} usable scales, have {have}")]
    InsufficientScales { needed: usize, have: usize },

    #[error("box size {eps} is below the two-points-per-tower limit {min}")]
    EpsTooSmall { eps: f64, min: f64 },

    #[error("degenerate fit: {0}")]
    FitDegenerate(String),

    #[error("numerical check failed: {0}")]
    NumericalCheck(String),
}

impl Error {
    /// `true` for guards tripped by the numerics rather than by the caller's
    /// arguments.
    pub fn is_numerical_guard(&self) -> bool {
        matches!(
            self,
            Error::SingularPoint { .. }
                | Error::CostGuard { .. }
                | Error::PrecisionExhausted { .. }
                | Error::DepthInsufficient(_)
                | Error::Overflow(_)
                | Error::PhaseRange { .. }
                | Error::EpsTooSmall { .. }
                | Error::FitDegenerate(_)
                | Error::NumericalCheck(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
