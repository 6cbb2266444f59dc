use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Variants fall into three families which the command-line front end maps
/// onto distinct exit codes: invalid input, exceeded resource caps, and
/// violated internal invariants (which indicate a bug or a counterexample to
/// a proven statement).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invariant factors {0:?} do not form a divisibility chain n_(i+1) | n_i")]
    NonDivisibleChain(Vec<u64>),
    #[error("invariant factor {0} is smaller than 2")]
    FactorTooSmall(u64),
    #[error("element {element:?} does not belong to the group with factors {factors:?}")]
    ElementNotInGroup { element: Vec<u64>, factors: Vec<u64> },
    #[error("the given member set is not a subgroup")]
    NotASubgroup,
    #[error("group of order {order} exceeds the configured cap {cap}")]
    GroupTooLarge { order: u64, cap: u64 },
    #[error("group of rank {rank} exceeds the configured rank cap {cap}")]
    RankTooLarge { rank: usize, cap: usize },
    #[error("vector {0:?} lies outside the lattice")]
    VectorOutsideLattice(Vec<String>),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("element is not in the span of the sequence")]
    NotInSpan,
    #[error("vector {0:?} is not a zero-sum vector for the sequence")]
    NotZeroSum(Vec<u64>),
    #[error("vector {0:?} is not in the kernel lattice of the sequence")]
    NotInKernel(Vec<i64>),
    #[error("unsupported decomposition bound {bound}; expected d* = {dstar} or d* + 1")]
    UnsupportedBound { bound: u64, dstar: u64 },
    #[error("no bounded relation found for the remaining coordinates {remaining:?} at bound {bound}")]
    DecompositionFailed { remaining: Vec<usize>, bound: u64 },
    #[error("invalid subset: {0}")]
    InvalidSubset(String),
    #[error("separating bound exceeded the hard cap d*+1 = {cap} for subset {subset:?}")]
    BoundExceeded { cap: u64, subset: Vec<Vec<u64>> },
    #[error("group {0:?} has the wrong shape for the extremal construction")]
    WrongShape(Vec<u64>),
    #[error("divisibility conditions violated for n = {n:?}, m = {m:?}")]
    DivisibilityViolated { n: Vec<u64>, m: Vec<u64> },
    #[error("{q} is not an admissible prime for exponent {exponent}")]
    BadPrime { q: u64, exponent: u64 },
    #[error("state space of {points} points exceeds the cap {cap}")]
    StateSpaceTooLarge { points: u64, cap: u64 },
    #[error("monomial {0:?} is not invariant under the action")]
    NotInvariantMonomial(Vec<u64>),
    #[error("criterion and field oracle disagree: {0}")]
    OracleDisagreement(String),
}

/// How the front end should treat an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Input,
    Cap,
    Internal,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            GroupTooLarge { .. } | RankTooLarge { .. } | StateSpaceTooLarge { .. } => ErrorClass::Cap,
            BoundExceeded { .. } | OracleDisagreement(_) | VectorOutsideLattice(_) => ErrorClass::Internal,
            _ => ErrorClass::Input,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
