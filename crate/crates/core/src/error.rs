use thiserror::Error;

#[derive(Debug, Error)]
pub enum ArwError {
    #[error("invalid seed `{0}` (expected decimal or 0x-prefixed hex)")]
    InvalidSeed(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("site {site} outside the interval 1..={n}")]
    SiteOutOfRange { site: i64, n: usize },

    #[error("toppling budget of {budget} instructions exceeded")]
    BudgetExceeded { budget: u64 },

    #[error("inconclusive estimate: votes split {absorbing}/{trials} at density {rho}")]
    Inconclusive { rho: f64, absorbing: usize, trials: usize },

    #[error("point-source window of {window} sites per side too small: a particle reached the edge")]
    WindowTooSmall { window: usize },

    #[error("no index within {limit} of the origin at site {site} reaches left-count {target}")]
    SearchWindowExhausted { site: i64, target: i64, limit: i64 },

    #[error("infeasible boundary data: no admissible odometer value at step {step}")]
    InfeasibleBoundary { step: usize },

    #[error("not an extended stable odometer: {0}")]
    NotAMember(String),

    #[error("malformed snapshot, line {line}: {msg}")]
    Snapshot { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = ArwError> = std::result::Result<T, E>;
