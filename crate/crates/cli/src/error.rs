use thiserror::Error;

/// Failures of a command, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),

    #[error("stopping rule not met within k_max = {k_max} steps")]
    BudgetExhausted { k_max: usize },

    #[error(transparent)]
    Core(#[from] krylov_sqrt::Error),

    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use krylov_sqrt::Error as E;
        match self {
            CliError::Validation(_) | CliError::Io { .. } => EXIT_VALIDATION,
            CliError::BudgetExhausted { .. } => EXIT_BUDGET,
            CliError::Core(e) => match e {
                E::InvalidInput(_)
                | E::DimensionMismatch { .. }
                | E::UnsupportedContext(_)
                | E::Parse { .. }
                | E::Io(_)
                | E::TooLarge { .. } => EXIT_VALIDATION,
                E::BudgetExhausted { .. } => EXIT_BUDGET,
                _ => EXIT_NUMERICAL,
            },
        }
    }

    pub fn io(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> CliError {
        let context = context.into();
        move |source| CliError::Io { context, source }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub(crate) fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}
