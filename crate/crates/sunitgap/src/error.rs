use sunitgap_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error(transparent)]
    Core(#[from] Error),

    #[error("{source_name}:{line}: {msg}")]
    Parse { source_name: String, line: usize, msg: String },

    #[error("{0}")]
    Usage(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type AppResult<T> = Result<T, AppError>;

impl AppError {
    pub fn parse(source_name: impl Into<String>, line: usize, msg: impl Into<String>) -> Self {
        AppError::Parse { source_name: source_name.into(), line, msg: msg.into() }
    }

    /// 0 success, 2 domain, 3 budget, 4 incomplete factorization,
    /// 5 parse failure, 1 for IO.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Core(Error::Budget { .. }) => 3,
            AppError::Core(Error::IncompleteFactorization { .. }) => 4,
            AppError::Core(_) | AppError::Usage(_) => 2,
            AppError::Parse { .. } => 5,
            AppError::Io(_) => 1,
        }
    }
}
