use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid group spec: {0}")]
    InvalidSpec(String),
    #[error("too large: {0}")]
    TooLarge(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("partition does not cover the group exactly once: {0}")]
    InvalidPartition(String),
    #[error("missing identity class: the class containing e is {0:?}")]
    MissingIdentityClass(Vec<usize>),
    #[error("class {class} ({members:?}) is not mapped onto a class by inversion")]
    NotInverseClosed { class: usize, members: Vec<usize> },
    #[error(
        "product of classes {x} and {y} is not constant on class {z}: \
         element {first} has coefficient {first_coeff}, element {second} has {second_coeff}"
    )]
    NotMultiplicativelyClosed {
        x: usize,
        y: usize,
        z: usize,
        first: usize,
        first_coeff: u32,
        second: usize,
        second_coeff: u32,
    },
    #[error("multiplier {m} is not coprime to the group order {order}")]
    InvalidMultiplier { m: i64, order: usize },
    #[error("not an A-section: {0}")]
    NotASection(String),
    #[error("internal invariant failure: {0}")]
    InternalInvariant(String),
    #[error("quotient mismatch: {0}")]
    QuotientMismatch(String),
    #[error("incompatible section: {0}")]
    IncompatibleSection(String),
    #[error("not an automorphism: {0}")]
    NotAutomorphism(String),
    #[error("not well defined: {0}")]
    NotWellDefined(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("no witness set found: {0}")]
    NoWitnessFound(String),
    #[error("undefined radical: {0}")]
    UndefinedRadical(String),
    #[error("search budget of {budget} nodes exhausted ({progress})")]
    BudgetExceeded { budget: u64, progress: String },
    #[error("invalid connection set: {0}")]
    InvalidConnectionSet(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("malformed json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
