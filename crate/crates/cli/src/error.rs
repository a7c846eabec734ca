use thiserror::Error;

/// Failures mapped onto the process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed input or flags (exit 2).
    #[error("input error: {0}")]
    Input(String),
    /// A solver failed to meet its contract (exit 3).
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// One or more invariants failed (exit 1).
    #[error("{0} invariant check(s) failed")]
    CheckFailed(usize),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::CheckFailed(_) => 1,
            CliError::Input(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<stokes_mle::Error> for CliError {
    fn from(err: stokes_mle::Error) -> Self {
        match err {
            stokes_mle::Error::Numerical(_) => CliError::Numerical(err.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}
