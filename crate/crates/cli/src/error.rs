use gauss_factor::Error as CoreError;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_COMPUTATION: i32 = 3;
pub const EXIT_CONTRADICTION: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid value for `{field}`: {reason}")]
    Invalid { field: String, reason: String },

    #[error("{0}")]
    Core(#[from] CoreError),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid { .. } => EXIT_VALIDATION,
            CliError::Io { .. } => EXIT_COMPUTATION,
            CliError::Core(e) => core_exit_code(e),
        }
    }
}

fn core_exit_code(e: &CoreError) -> i32 {
    match e {
        CoreError::Encoding(_) | CoreError::InvalidParameter { .. } | CoreError::InconsistentInput(_) => {
            EXIT_VALIDATION
        }
        CoreError::Contradiction { .. } => EXIT_CONTRADICTION,
        CoreError::Evaluation { source, .. } => core_exit_code(source).max(EXIT_COMPUTATION),
        CoreError::Domain(_) | CoreError::Range(_) | CoreError::Accuracy { .. } | CoreError::NoFit(_) => EXIT_COMPUTATION,
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
