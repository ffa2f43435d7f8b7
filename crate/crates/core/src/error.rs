use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("transition matrix is not square or has entries outside {{0,1}}: {0}")]
    BadMatrix(String),
    #[error("alphabet size must be at least 2, got {0}")]
    AlphabetTooSmall(usize),
    #[error("symbol {0} has an empty row or column in the transition matrix")]
    DeadSymbol(usize),
    #[error("no power A^d with d <= {0} is strictly positive")]
    NotPrimitive(usize),
    #[error("theta must lie in (0,1), got {0}")]
    BadTheta(f64),

    #[error("symbol {symbol} outside alphabet 1..={alphabet}")]
    BadSymbol { symbol: usize, alphabet: usize },
    #[error("word {0} is not admissible")]
    Inadmissible(String),
    #[error("cannot parse word {0:?}")]
    WordParse(String),
    #[error("word too short: need {needed} symbols, have {have}")]
    WordTooShort { needed: usize, have: usize },
    #[error("words have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("words agree on all {0} symbols; distance undecidable at this truncation")]
    TruncationTooShort(usize),

    #[error("function depth must be at least 1")]
    ZeroDepth,
    #[error("table entry for word {0} is missing")]
    MissingWord(String),
    #[error("table entry for word {0} has the wrong length or is not admissible")]
    UnexpectedWord(String),
    #[error("table value for word {0} is not finite")]
    NonFinite(String),

    #[error("dominant eigenpair did not converge (residual {residual:e} after {iterations} iterations)")]
    EigenFailure { residual: f64, iterations: usize },

    #[error("roof function must be >= 1 everywhere, minimum is {0}")]
    RoofBelowOne(f64),
    #[error("polynomial degree {0} exceeds the maximum of 8")]
    DegreeTooHigh(usize),
    #[error("invalid time {0}")]
    BadTime(f64),

    #[error("{0}")]
    InvalidArgument(String),
    #[error("seminorm of {0} vanishes; large-deviation constants are undefined")]
    DegenerateSeminorm(&'static str),
    #[error("time {t} is below the threshold T0 = {t0}")]
    BelowThreshold { t: f64, t0: f64 },
    #[error("enumeration of {count} words exceeds the budget of {budget}")]
    BudgetExceeded { count: u128, budget: u128 },

    #[error("z does not have period {0} on its available truncation")]
    NotActuallyPeriodic(usize),
    #[error("declared period {period} is not prime: {smaller} is also a period")]
    PeriodNotPrime { period: usize, smaller: usize },
    #[error("the hole covers the whole space")]
    HoleIsEverything,
    #[error("hole is empty")]
    EmptyHole,
}
