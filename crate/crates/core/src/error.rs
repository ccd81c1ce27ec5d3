use thiserror::Error;

/// Errors raised by the library. Each variant corresponds to one violated
/// precondition; none of them is recoverable by retrying.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("start value {0} is a power of two; its trace is empty")]
    PowerOfTwoStart(String),

    #[error("no power of two reached from {start} within {guard} iterations")]
    GuardExceeded { start: String, guard: u64 },

    #[error("start value must be positive")]
    NonPositiveStart,

    #[error("trace elements are not distinct")]
    DuplicateElements,

    #[error("not a permutation of 1..{0}")]
    NotAPermutation(usize),

    #[error("two consecutive rises at position {0}")]
    NotCollatzPattern(usize),

    #[error("type contains two consecutive u's at position {0}")]
    ConsecutiveUps(usize),

    #[error("nonempty type must end in d")]
    DoesNotEndInD,

    #[error("invalid letter {0:?} in type (expected 'u' or 'd')")]
    InvalidLetter(char),

    #[error("cannot prepend {letter} to {sigma:?}")]
    InvalidExtension { letter: char, sigma: String },

    #[error("{0} is divisible by 3 and has no discrete logarithm base 2")]
    NotAUnit(String),

    #[error("2^{a} is not a witness for type {sigma:?}")]
    NotAWitness { sigma: String, a: u64 },

    #[error("witness 2^{a} for type {sigma:?} is degenerate: {reason}")]
    DegenerateWitness {
        sigma: String,
        a: u64,
        reason: String,
    },

    #[error("no valid witness for type {sigma:?} within {cap} schedule entries")]
    NoValidWitnessWithinCap { sigma: String, cap: u32 },

    #[error("lines have the same slope")]
    SameSlope,

    #[error("line family has fewer than two lines")]
    FamilyTooSmall,

    #[error("length range {min}..={max} is invalid")]
    InvalidRange { min: usize, max: usize },

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
