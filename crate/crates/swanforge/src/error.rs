use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("resource error: {0}")]
    Resource(String),
    #[error("validation error ({axiom}): {detail}")]
    Validation { axiom: String, detail: String },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("precision error: {0}")]
    Precision(String),
    #[error("theorem check failed: {0}")]
    Theorem(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn validation(axiom: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Validation { axiom: axiom.into(), detail: detail.into() }
    }

    /// Process exit code used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Theorem(_) => 2,
            _ => 3,
        }
    }
}
