//! Error type shared by the whole crate.

use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A physical parameter is out of range (negative damping, zero mass, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An iterative routine failed to reach its tolerance.
    #[error("no convergence in {context}: {detail}")]
    NoConvergence { context: String, detail: String },

    /// A polished root stopped satisfying the equation it came from.
    #[error("root lost consistency with its defining equation: {0}")]
    InconsistentRoot(String),

    /// The requested operation needs a bistable parameter set and there is none.
    #[error("parameters do not admit bistability: {0}")]
    NotBistable(String),

    /// A response slope diverges (fold point) where a finite value was required.
    #[error("response slope diverges: {0}")]
    DivergentSlope(String),

    /// A computation that needs a stable branch was given an unstable one.
    #[error("operation requires a stable branch: {0}")]
    UnstableBranch(String),

    /// Fluctuation statistics diverge because the working point sits on a fold.
    #[error("critical slowing down: {0}")]
    SlowingDownDivergence(String),

    /// An adaptive integrator shrank its step below the useful minimum.
    #[error("step size underflow in {0}")]
    StepSizeUnderflow(String),

    /// A time series is too short for the requested estimate.
    #[error("segment too short: {0}")]
    SegmentTooShort(String),

    /// Malformed user input (bad grid, empty list, inconsistent lengths, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
