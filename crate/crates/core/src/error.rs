use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("a group needs at least one cyclic factor")]
    EmptyFactors,
    #[error("cyclic factor {0} is smaller than 2")]
    FactorTooSmall(usize),
    #[error("group order exceeds the configured maximum of {max}")]
    OrderTooLarge { max: usize },
    #[error("operands live in different groups ({left:?} vs {right:?})")]
    GroupMismatch { left: Vec<usize>, right: Vec<usize> },
    #[error("operation requires a nonempty set")]
    EmptySet,
    #[error("vector of length {got} does not match group order {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("element code {code} is outside a group of order {order}")]
    ElementOutOfRange { code: usize, order: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("approximation mode mismatch")]
    ModeMismatch,
    #[error("all {attempts} attempts failed; best achieved measure {best}")]
    RetriesExhausted { attempts: usize, best: f64 },
    #[error("no level l <= log2 K satisfies the size condition at c = {c}; level sizes {profile:?}")]
    NoFeasibleLevel { c: f64, profile: Vec<usize> },
    #[error("large-doubling regime inapplicable: sampling rate q = {q} exceeds 1")]
    RegimeInapplicable { q: f64 },
    #[error("group order {order} exceeds the cap {cap} for this operation")]
    CapExceeded { order: usize, cap: usize },
    #[error("search budget exhausted after {draws} draws ({candidates} candidate sets enumerated)")]
    BudgetExhausted { candidates: usize, draws: usize },
    #[error("{0} is not prime")]
    NotPrime(usize),
    #[error("malformed subset encoding: {0}")]
    Decode(String),
}
