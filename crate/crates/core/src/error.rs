use subregular_symbolic::SymbolicError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("the pattern 1 is not allowed (every permutation contains it)")]
    ForbiddenPatternOne,
    #[error("invalid pattern set: {0}")]
    InvalidPatternSet(String),
    #[error("{0} already contains a forbidden pattern")]
    ContainsPattern(String),
    #[error("node budget of {budget} exceeded")]
    NodeBudgetExceeded { budget: u64 },
    #[error("rule set has {frontier} frontier classes; transition matrix needs a closed rule set")]
    NotClosed { frontier: usize },
    #[error("no certified rule set found up to depth {max_depth}")]
    DepthExhausted { max_depth: usize },
    #[error("no parameterized family fits the rule set: {0}")]
    NoFamilyFound(String),
    #[error("general rule check failed: {0}")]
    RuleMismatch(String),
    #[error("verification mismatch: {0}")]
    VerificationMismatch(String),
    #[error("unclassified: {0}")]
    Unclassified(String),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
