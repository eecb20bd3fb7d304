use alloc::vec::Vec;

use crate::config::ConfigViolation;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{what} must be finite, got {value}")]
    NonFinite { what: &'static str, value: f64 },

    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },

    #[error("{what} = {value} outside valid range [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("invalid configuration: {} violation(s)", .0.len())]
    InvalidConfig(Vec<ConfigViolation>),

    #[error("{what}: expected length {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("active and passive partitions must serve different users")]
    SameUser,

    #[error(
        "Gil-Pelaez inversion did not reach tolerance {requested:e} \
         (estimated error {achieved:e}, omega reached {omega:e})"
    )]
    Accuracy {
        requested: f64,
        achieved: f64,
        omega: f64,
    },

    #[error("objective evaluated to a non-finite value at {at} dBm")]
    NonFiniteObjective { at: f64 },

    #[error("{0}")]
    Unsupported(&'static str),
}
