use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no event times")]
    NoEventTimes,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("classifier is not fitted")]
    NotFitted,

    #[error("classifier output {0} is outside [0, 1]")]
    ProbabilityOutOfRange(f64),

    /// A failure of the external classifier process, tagged with the protocol
    /// stage at which it happened (spawn, fit, predict, shutdown).
    #[error("external classifier protocol error during {stage}: {message}")]
    Protocol { stage: &'static str, message: String },

    #[error("no horizons remain after origin {0}")]
    NoHorizons(usize),

    #[error("no comparable pairs")]
    NoComparablePairs,

    #[error("no censoring support at t = {0}")]
    NoCensoringSupport(f64),

    #[error("undefined: {0}")]
    Undefined(String),

    #[error("cannot integrate over fewer than two time points")]
    CannotIntegrate,

    #[error("data error at row {row}: {message}")]
    Data { row: usize, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn data(row: usize, message: impl Into<String>) -> Self {
        Error::Data {
            row,
            message: message.into(),
        }
    }

    pub(crate) fn protocol(stage: &'static str, message: impl Into<String>) -> Self {
        Error::Protocol {
            stage,
            message: message.into(),
        }
    }

    /// Process exit code used by the command-line tool: 1 usage, 2 data,
    /// 3 model or protocol failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::NotFitted
            | Error::ProbabilityOutOfRange(_)
            | Error::Protocol { .. } => 3,
            _ => 2,
        }
    }
}
