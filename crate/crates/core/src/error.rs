use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("found {found} distinct labels but only {expected} classes were declared")]
    LabelCardinality { found: usize, expected: usize },

    #[error("at least 3 classes are required, got {0}")]
    TooFewClasses(usize),

    #[error("instance {row} has a zero feature vector")]
    DegenerateInstance { row: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("class {class} out of range for {num_classes} classes")]
    ClassOutOfRange { class: usize, num_classes: usize },

    #[error("feature vector has zero norm")]
    ZeroVector,

    #[error("kernel support set is empty")]
    EmptySupportSet,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: {outcomes} outcomes for {instances} instances")]
    LengthMismatch { outcomes: usize, instances: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
