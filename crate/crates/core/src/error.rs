use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("value is not invertible modulo {p}")]
    NotInvertible { p: u64 },

    #[error("c must be nonzero modulo p (got c = {c} for p = {p})")]
    DegenerateHyperbola { p: u64, c: u64 },

    #[error("offsets h and k must be nonzero modulo p")]
    ZeroOffset,

    #[error("box side {side} must be smaller than p = {p}")]
    SideTooLarge { side: u64, p: u64 },

    #[error("p = {0} is not congruent to 1 mod 4")]
    NotOneModFour(u64),

    #[error("L = {l} must be smaller than p/2 (p = {p})")]
    RunTooLong { l: u64, p: u64 },

    #[error("invalid distance set: {0}")]
    InvalidSet(String),

    #[error("range [{lo}, {hi}] is invalid")]
    InvalidRange { lo: u64, hi: u64 },

    #[error("sieving [{lo}, {hi}] needs {needed} bytes, over the {budget}-byte budget")]
    MemoryBudget {
        lo: u64,
        hi: u64,
        needed: u64,
        budget: u64,
    },

    #[error("search bounds must satisfy 1 <= bound < p (h_max = {h_max}, k_max = {k_max}, p = {p})")]
    InvalidConstraint { h_max: u64, k_max: u64, p: u64 },

    #[error("not a witness: {0}")]
    InvalidWitness(String),

    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),

    #[error("invalid exponent parameters: {0}")]
    InvalidExponent(String),
}
