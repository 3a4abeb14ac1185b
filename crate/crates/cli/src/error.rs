use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] hhp_core::Error),

    #[error("{0}: {1}")]
    Io(String, std::io::Error),

    #[error("{0}")]
    Usage(String),

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),

    /// The suite ran but some criteria failed.
    #[error("{0} of {1} criteria failed")]
    SuiteFailed(usize, usize),
}

impl CliError {
    /// 1 for rejected input, 2 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numerical() => 2,
            CliError::SuiteFailed(..) => 2,
            _ => 1,
        }
    }
}
