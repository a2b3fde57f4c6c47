use thiserror::Error;

/// Every failure the library reports. Budget and cap failures are kept apart
/// from input failures because the command line maps them to different exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("malformed tree: {0}")]
    Malformed(String),
    #[error("search budget exhausted: {0}")]
    Budget(String),
    #[error("expert cap exceeded: {0}")]
    Cap(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("degenerate data: the labeled points admit no consistent halfspace")]
    DataDegenerate,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    /// Process exit code for the command line: 2 for budget or cap failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Budget(_) | Error::Cap(_) => 2,
            _ => 1,
        }
    }
}
