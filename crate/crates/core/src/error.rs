use thiserror::Error;

use crate::resolution::FValue;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is singular")]
    SingularMatrix,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid moduli point: {0}")]
    InvalidModuliPoint(String),

    #[error("arrangement is not in general position")]
    NotGeneralPosition,

    #[error("invalid arrangement: {0}")]
    InvalidArrangement(String),

    #[error("invalid tuple (n={n}, m={m}, r={r}): {reason}")]
    InvalidTuple {
        n: usize,
        m: usize,
        r: u32,
        reason: String,
    },

    #[error("n must be odd ≥ 3 (got {0})")]
    InvalidN(usize),

    #[error("stratum {0} is not alive")]
    DeadStratum(u32),

    #[error("already resolved: max f is (0,0,0)")]
    AlreadyResolved,

    #[error("invalid blow-up center: {0}")]
    InvalidCenter(String),

    #[error("max f did not decrease at step {step}: {before} -> {after}")]
    NonDecreasingMeasure {
        step: u32,
        before: FValue,
        after: FValue,
    },

    #[error("step limit {0} exceeded")]
    StepLimitExceeded(u64),

    #[error("chart oracle mismatch at step {step}: {detail}")]
    OracleMismatch { step: u32, detail: String },

    #[error("yukawa length indeterminate: unknown block {from_p}->{to_p} in summand {summand}")]
    Indeterminate {
        summand: u32,
        from_p: u32,
        to_p: u32,
    },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("arithmetic overflow: {0}")]
    Overflow(String),
}

impl Error {
    /// Errors caused by bad input rather than by a broken invariant.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidN(_)
                | Error::InvalidTuple { .. }
                | Error::InvalidModuliPoint(_)
                | Error::InvalidArrangement(_)
                | Error::NotGeneralPosition
                | Error::ShapeMismatch(_)
                | Error::Parse(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
