use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The call itself is malformed (empty input, inconsistent word, ...).
    #[error("usage error: {0}")]
    Usage(String),
    /// A resource budget would be exceeded.
    #[error("resource limit: {what} needs {requested}, budget is {budget}")]
    Resource {
        what: String,
        requested: u128,
        budget: u128,
        /// Best accuracy reachable inside the budget, when meaningful.
        best_error: Option<f64>,
    },
    /// The input is valid but has a shape this implementation does not handle.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}
