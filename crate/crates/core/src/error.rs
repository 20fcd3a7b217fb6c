use thiserror::Error;

/// Errors produced by algebra, channel, and recovery-map operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("algebra mismatch: expected blocks {expected:?}, got {got:?}")]
    AlgebraMismatch {
        expected: Vec<usize>,
        got: Vec<usize>,
    },

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("block {block} has shape {rows}x{cols}, expected {dim}x{dim}")]
    BlockShape {
        block: usize,
        rows: usize,
        cols: usize,
        dim: usize,
    },

    #[error("element is not Hermitian (deviation {deviation:.3e}, tolerance {tol:.3e})")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("element does not have unit trace (trace {trace}, tolerance {tol:.3e})")]
    NotUnitTrace { trace: f64, tol: f64 },

    #[error("state is not faithful: min eigenvalue {min_eig:.3e} below floor {floor:.3e}")]
    NotFaithful { min_eig: f64, floor: f64 },

    #[error("channel matrix has shape {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    ChannelShape {
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },

    #[error("channel is not CPTP: {0}")]
    NotCptp(String),

    #[error("prediction e(alpha) is not a faithful state: {0}")]
    PredictionNotFaithful(String),

    #[error("channel is not a *-isomorphism: {0}")]
    NotStarIsomorphism(String),

    #[error("operation requires a commutative algebra, got blocks {0:?}")]
    NotCommutative(Vec<usize>),

    #[error("channel is not stochastic: {0}")]
    NotStochastic(String),

    #[error("unitary does not leave the state invariant (deviation {deviation:.3e})")]
    UnitaryStateMismatch { deviation: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("infeasible instance: {0}")]
    Infeasible(String),

    #[error("strategy {strategy} is not applicable here: {reason}")]
    InapplicableStrategy { strategy: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
