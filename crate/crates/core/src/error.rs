use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    /// An operation was called outside of its documented domain.
    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("singular symbol at mode (k={k}, eta={eta}, l={l})")]
    SingularMode { k: i64, eta: f64, l: i64 },

    #[error("integrator failure: {0}")]
    Integrator(String),

    /// NaN or overflow detected while time stepping.
    #[error("simulation blew up at t = {time}: {reason}")]
    Blowup { time: f64, reason: String },

    #[error("fit failure: {0}")]
    Fit(String),

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
