//! Crate-wide error type.

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A domain-type invariant was violated (bad parameter vector, bad spec).
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// Malformed configuration (config file, CLI wiring, incompatible options).
    #[error("configuration error: {0}")]
    Config(String),

    /// A numerical procedure failed (filter underflow, non-finite likelihood,
    /// systematic simulator failure).
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// CLI exit code: 1 for configuration/usage problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerical(_) => 2,
            _ => 1,
        }
    }
}
