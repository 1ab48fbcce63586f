use std::fmt;

/// Sign of a quantity that was required to be strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sign::Negative => f.write_str("negative"),
            Sign::Zero => f.write_str("zero"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch at step {step}: {detail}")]
    Dimension { step: usize, detail: String },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("threshold condition fails: left-hand side {lhs:e} is {sign}")]
    ThresholdInfeasible { lhs: f64, sign: Sign },

    #[error("unstable discretization: dt*f = {value} >= {limit} at node {node}; use a finer grid")]
    Stability { node: usize, value: f64, limit: f64 },

    #[error("CFL mismatch: the grid needs dt = {required}, got dt = {actual}")]
    Cfl { required: f64, actual: f64 },

    #[error("not exactly controllable at step {target_index}: rank {rank} < {needed}, singular values {sigma:?}")]
    NotControllable {
        target_index: usize,
        rank: usize,
        needed: usize,
        sigma: Vec<f64>,
    },

    #[error("nodal profile not controllable: rank {rank} < {needed}, smallest singular values {sigma:?}")]
    NodalNotControllable {
        rank: usize,
        needed: usize,
        sigma: Vec<f64>,
    },

    #[error("desired pair is not holdable: max deviation |A x_d + B u_d - x_d| = {max_deviation:e} at step {step}")]
    NotHoldable { max_deviation: f64, step: usize },

    #[error("solver configuration: {0}")]
    Config(String),

    #[error("solver diverged at iteration {iteration}")]
    Divergence { iteration: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("scenario: {0}")]
    Scenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
