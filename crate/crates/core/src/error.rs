use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    NotPrime(u32),

    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),

    #[error("division by zero")]
    DivisionByZero,

    #[error("usage error: {0}")]
    Usage(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("protocol violation in round {round}: {reason}")]
    ProtocolViolation { round: usize, reason: String },

    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),

    #[error("enumeration too large: {0}")]
    Guard(String),

    #[error("malformed input: {0}")]
    Malformed(String),
}

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}
