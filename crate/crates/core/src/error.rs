use alloc::boxed::Box;
use alloc::string::String;
use thiserror::Error;

use crate::protocol::BatchRunStats;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("operation is only defined for the Bell-pair encoding")]
    UnsupportedEncoding,

    /// A brute-force construction was requested beyond the dense-vector cap.
    #[error("resource limit: {what} = {got} exceeds {max}")]
    Resource {
        what: &'static str,
        got: usize,
        max: usize,
    },

    #[error("n = {n} with p = {p} does not give an integer k = n*p")]
    NonIntegerK { n: usize, p: f64 },

    #[error("least-squares fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),

    /// The batching loop hit `max_batches` before the stopping rule fired.
    #[error("batching truncated after {} batches", .0.m_batches)]
    Truncated(Box<BatchRunStats>),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
