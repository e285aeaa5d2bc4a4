use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("integration failure: {0}")]
    Integration(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("breakpoint error: {0}")]
    Breakpoint(String),
    #[error("resolution error: need at least {needed} samples, got {got}")]
    Resolution { needed: usize, got: usize },
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("truncation error: {0}")]
    Truncation(String),
    #[error("block too small: {0}")]
    BlockTooSmall(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("unsupported order {order} (maximum {max})")]
    UnsupportedOrder { order: usize, max: usize },
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("invalid element: {0}")]
    InvalidElement(String),
    #[error("smoothness error: {0}")]
    Smoothness(String),
    #[error("internal consistency error: {0}")]
    Consistency(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors caused by malformed or inadmissible input rather than
    /// by a numerical procedure failing.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse(_)
                | Error::Domain(_)
                | Error::OutOfRange(_)
                | Error::Precondition(_)
                | Error::InvalidMap(_)
                | Error::InvalidElement(_)
                | Error::UnsupportedOrder { .. }
                | Error::Truncation(_)
                | Error::BlockTooSmall(_)
                | Error::Resolution { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
