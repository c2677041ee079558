use thiserror::Error;

/// Errors raised by the library.
///
/// Every variant maps to one of the CLI exit classes through [`Error::class`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unsupported parameters: {0}")]
    Range(String),
    #[error("parameter mismatch: {0}")]
    Mismatch(String),
    #[error("size cap exceeded: {0}")]
    Cap(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("invalid input: {0}")]
    Input(String),
}

/// Coarse classification used for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Invariant,
    Usage,
    Cap,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Cap(_) => ErrorClass::Cap,
            Error::Invariant(_) => ErrorClass::Invariant,
            Error::Range(_) | Error::Mismatch(_) | Error::Input(_) => ErrorClass::Usage,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! ensure {
    ($cond:expr, $variant:ident, $($arg:tt)+) => {
        if !$cond {
            return Err($crate::error::Error::$variant(format!($($arg)+)));
        }
    };
}
pub(crate) use ensure;
