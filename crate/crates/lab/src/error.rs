use sievelab_core::Error as CoreError;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error(transparent)]
    Core(CoreError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type LabResult<T> = std::result::Result<T, LabError>;

impl LabError {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        LabError::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config { .. } => EXIT_CONFIG,
            LabError::Infeasible(_) => EXIT_INFEASIBLE,
            LabError::Invariant(_) => EXIT_INVARIANT,
            LabError::Core(CoreError::Overflow(_)) => EXIT_INFEASIBLE,
            LabError::Core(_) => EXIT_CONFIG,
            LabError::Io(_) => EXIT_IO,
        }
    }

    /// Short machine-readable label used in failure reports.
    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            EXIT_CONFIG => "config_error",
            EXIT_INFEASIBLE => "infeasible",
            EXIT_INVARIANT => "invariant_violation",
            _ => "io_error",
        }
    }
}

impl From<CoreError> for LabError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Infeasible(m) => LabError::Infeasible(m),
            CoreError::InvariantViolation(m) => LabError::Invariant(m),
            other => LabError::Core(other),
        }
    }
}
