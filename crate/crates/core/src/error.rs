use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("inadmissible state ({context}): rho = {rho}, p = {pressure}")]
    InadmissibleState {
        rho: f64,
        pressure: f64,
        context: String,
    },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("invalid shock configuration: {0}")]
    InvalidShock(String),

    #[error("{0}: input is too short")]
    EmptyInput(&'static str),

    #[error(
        "shock window of {width} cells does not fit: {upstream} cells upstream, {downstream} downstream"
    )]
    Window {
        width: usize,
        upstream: usize,
        downstream: usize,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical failure at iteration {iteration}: {detail}")]
    Numerical { iteration: usize, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
