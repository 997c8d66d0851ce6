use alloc::string::String;

/// Errors raised by the decoding toolkit.
///
/// The variants follow the failure classes of the operations: a bad
/// configuration (rejected at construction time), a violated call
/// contract (shapes, indices), a resource budget that would be exceeded,
/// and arithmetic domain errors.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("{what} requires {required} but the budget allows {allowed}")]
    Budget {
        what: &'static str,
        required: u128,
        allowed: u128,
    },

    #[error("domain error: {0}")]
    Domain(&'static str),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}
