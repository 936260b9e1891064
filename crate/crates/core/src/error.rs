use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus must lie in [2, 2^32], got {0}")]
    InvalidModulus(u64),

    #[error("tuple length must be at least 1")]
    EmptyTuple,

    #[error("component {value} at index {index} is not a residue modulo {modulus}")]
    ComponentOutOfRange { index: usize, value: u64, modulus: u64 },

    #[error("tuples live in different spaces: Z_{0}^{1} vs Z_{2}^{3}")]
    ShapeMismatch(u64, usize, u64, usize),

    #[error("block size {block} does not divide tuple length {len}")]
    BlockSizeMismatch { block: usize, len: usize },

    #[error("cannot parse tuple {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("{0} must be at least 2")]
    TooSmall(u64),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("p-adic valuation of zero is undefined")]
    ZeroValuation,

    #[error("{a} is not invertible modulo {modulus}")]
    NotCoprime { a: u64, modulus: u64 },

    #[error("Wieferich test requires an odd prime, got {0}")]
    NotOddPrime(u64),

    #[error("binomial C({n}, {k}) requested with k > n")]
    BinomialRange { n: u64, k: u64 },

    #[error("size guard exceeded: {what} = {value} > {limit}")]
    GuardExceeded { what: &'static str, value: u128, limit: u128 },

    #[error("step budget of {budget} steps exhausted")]
    StepBudgetExceeded { budget: u64 },

    #[error("{multiple} is not a period multiple of the given tuple")]
    NotAPeriodMultiple { multiple: u64 },

    #[error("arithmetic overflow while computing {0}")]
    Overflow(&'static str),

    #[error("characterization inapplicable for p = {p}, n = {n}: {reason}")]
    CharacterizationInapplicable { p: u64, n: usize, reason: &'static str },

    #[error("period routes disagree for m = {m}, n = {n}: brute force {brute}, structural {structural}")]
    Disagreement { m: u64, n: usize, brute: u64, structural: u64 },

    #[error("could not place the basic tuple of Z_{m}^{n} on its cycle")]
    CycleEntryNotFound { m: u64, n: usize },
}

impl Error {
    /// Errors caused by a finite resource limit rather than bad input.
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            Error::StepBudgetExceeded { .. } | Error::GuardExceeded { .. } | Error::Overflow(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
