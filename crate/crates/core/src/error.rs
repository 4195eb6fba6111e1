use thiserror::Error;

use crate::renewal::RenewalEstimate;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("configuration has {got} children, the cap is {cap}")]
    CapExceeded { got: usize, cap: usize },

    #[error("model is not canonical: m(1) = {value}")]
    NotCanonical { value: f64 },

    #[error("cannot canonicalize at gamma = {gamma}: m(gamma) = {value}")]
    NotCanonicalizable { gamma: f64, value: f64 },

    #[error("no closed-form transform available for this model")]
    TransformUnavailable,

    #[error("argument {theta} lies outside the finiteness domain")]
    OutsideDomain { theta: f64 },

    #[error("no root: {0}")]
    NoRoot(String),

    #[error("minimum not attained: {0}")]
    NotAttained(String),

    #[error("degenerate law: {0}")]
    Degenerate(String),

    #[error("arithmetic span of the walk is unknown")]
    SpanRequired,

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("exponential renewal function is infinite: {0}")]
    InfiniteRenewal(String),

    #[error("horizon exceeded the hard cap of {cap} steps")]
    HorizonExceeded {
        cap: usize,
        partial: Box<RenewalEstimate>,
    },

    #[error("distribution table of W_1 required: {0}")]
    FTableRequired(String),

    #[error("step law has no sampler")]
    NoSampler,

    #[error("undecided within numerical tolerance: {0}")]
    Undecided(String),

    #[error("rejection sampler gave up after {0} attempts")]
    RejectionExhausted(u64),
}
