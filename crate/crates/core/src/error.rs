use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty range: {0}")]
    EmptyRange(String),

    #[error("curve has bad reduction at p = {0}")]
    BadReduction(u64),

    #[error("p = {0} is a bad prime of the table")]
    BadPrime(u64),

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("invalid eta product: {0}")]
    InvalidSpec(String),

    /// Fixed-width series arithmetic overflowed. Public entry points promote
    /// to arbitrary precision instead of surfacing this.
    #[error("coefficient exceeds fixed integer width")]
    WidthExceeded,

    #[error("index {index} outside 1..={max}")]
    OutOfRange { index: u64, max: u64 },

    #[error("coefficient bound violated at p = {prime}: a_p = {a_p}")]
    BoundViolation { prime: u64, a_p: String },

    #[error("{what} = {value} outside its domain")]
    Domain { what: &'static str, value: f64 },

    #[error("empty series")]
    EmptySeries,

    #[error("insufficient sample: need at least {needed}, have {have}")]
    InsufficientSample { needed: usize, have: usize },

    #[error("histogram under-sampled: fewer than two bins with expected count >= 5")]
    UnderSampled,

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(
        "cross-check mismatch at p = {prime}: eta product gives {eta}, point count gives {curve}"
    )]
    CrossCheck { prime: u64, eta: String, curve: i64 },

    #[error("coefficient cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
