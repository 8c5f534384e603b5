use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("root ({m}, {mu}) does not satisfy the parity condition for the maximal order")]
    OrderMismatch { m: u64, mu: u64 },
    #[error("no auxiliary ideal found with norm below {bound}")]
    SearchExhausted { bound: u64 },
    #[error("root sequence is empty for this filter")]
    SequenceExhausted,
    #[error("conjugated stabilizer is not integral: {0}")]
    IntegralityFailure(String),
    #[error("geodesic half-width is not of the form sqrt(D)/m")]
    NotRootGeodesic,
    #[error("image geodesic is negatively oriented (m = {m})")]
    NegativeOrientation { m: i128 },
    #[error("geodesics share an endpoint")]
    SharedEndpoint,
    #[error("node budget of {budget} exceeded")]
    BudgetExceeded { budget: usize },
    #[error("H is undefined on the boundary locus at q = {q}, v = {v}")]
    DomainError { q: f64, v: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
