use thiserror::Error;

use crate::decision::Stats;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("malformed token {0:?}")]
    MalformedToken(String),
    #[error("duplicate generator name {0:?}")]
    DuplicateGenerator(String),
    #[error("{0:?} is not a permutation")]
    InvalidPermutation(Vec<usize>),
    #[error("degree must be at least 2, got {0}")]
    BadDegree(usize),
    #[error("generator {name:?} does not match degree {degree}")]
    DegreeMismatch { name: String, degree: usize },
    #[error("degree {0} is not prime")]
    DegreeNotPrime(usize),
    #[error("letter refers to generator #{0}, which this presentation does not have")]
    ForeignWord(u32),
    #[error("vertex {0:?} is not a valid vertex of this tree")]
    InvalidVertex(String),
    #[error(
        "generator {name:?} was annotated with order {order}, but {name}^{order} is {verdict}"
    )]
    InvalidOrderAnnotation {
        name: String,
        order: u32,
        verdict: String,
    },
    #[error("budget exceeded ({0})")]
    BudgetExceeded(Stats),
    #[error("saturation exceeded {0} states")]
    SaturationExceeded(usize),
    #[error("both arguments must lie in the first level stabilizer")]
    StabilizerRequired,
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("invalid group file: {0}")]
    Format(String),
    #[error("operation needs a matrix over the integers (modulus 0)")]
    ModulusUnsupported,
    #[error("matrix modulus must be positive for this operation")]
    ModulusRequired,
    #[error("claimed order {0} is wrong: M^{0} is not the identity")]
    OrderMismatch(u64),
    #[error("(M - I)^2 is not zero")]
    HypothesisViolated,
    #[error("integer overflow in matrix arithmetic")]
    Overflow,
    #[error("invalid matrix: {0}")]
    BadMatrix(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
