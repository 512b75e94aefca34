use thiserror::Error;

/// Errors raised by the simulation and readout layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A physical parameter set does not encode an integer, or encodes it
    /// with the wrong parity.
    #[error("encoding error: {0}")]
    Encoding(String),

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    /// Argument outside the mathematical domain of an operation (a pole).
    #[error("domain error: {0}")]
    Domain(String),

    /// Result not representable in double precision.
    #[error("range error: {0}")]
    Range(String),

    /// A numerical oracle did not reach its tolerance.
    #[error("accuracy error: {what} (achieved error estimate {achieved:e})")]
    Accuracy { what: String, achieved: f64 },

    #[error("no fit: {0}")]
    NoFit(String),

    #[error("inconsistent input: {0}")]
    InconsistentInput(String),

    /// A readout rule reported a factor that integer arithmetic refutes.
    #[error("divisibility contradiction from the {rule} rule: {value} reported for N = {n}")]
    Contradiction { rule: String, value: u64, n: u64 },

    /// Model evaluation failed at a particular scan point.
    #[error("evaluation failed at xi = {xi}: {source}")]
    Evaluation {
        xi: f64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        field,
        reason: reason.into(),
    }
}
