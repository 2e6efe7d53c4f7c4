//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("sample space must have at least one outcome")]
    EmptySampleSpace,

    #[error("expected {expected} outcome labels, got {got}")]
    LabelCount { expected: usize, got: usize },

    #[error("outcome label {0:?} appears more than once")]
    DuplicateLabel(String),

    #[error("mass vector has {got} entries but the sample space has {expected} outcomes")]
    MassLength { expected: usize, got: usize },

    #[error("mass at outcome {index} is {value}, which is negative or not finite")]
    InvalidMass { index: usize, value: f64 },

    #[error("mass sums to {sum}, outside the 1e-9 normalization tolerance")]
    MassSum { sum: f64 },

    #[error("weights sum to {sum}, which cannot be normalized")]
    WeightSum { sum: f64 },

    #[error("weight at index {index} is {value}, which is negative or not finite")]
    InvalidWeight { index: usize, value: f64 },

    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },

    #[error("distributions are defined over different sample spaces")]
    SpaceMismatch,

    #[error("mixture requires at least one component")]
    EmptyComponents,

    #[error("population must contain at least one student")]
    EmptyPopulation,

    #[error("student id {0:?} appears more than once")]
    DuplicateStudentId(String),

    #[error("unknown subgroup {0:?}")]
    UnknownSubgroup(String),

    #[error("subgroup {0:?} has zero total weight")]
    ZeroSubgroupMass(String),

    #[error("outcome index {index} is out of bounds for a space of size {size}")]
    OutcomeOutOfBounds { index: usize, size: usize },

    #[error("{name} is {value}, outside the valid range [{low}, {high}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        low: f64,
        high: f64,
    },

    #[error("acceptance probability at outcome {index} is {value}, outside [0, 1]")]
    InvalidAcceptProbability { index: usize, value: f64 },

    #[error("score at outcome {index} is not finite")]
    InvalidScore { index: usize },

    #[error("exhaustive enumeration supports at most {max} outcomes, got {got}")]
    EnumerationTooLarge { max: usize, got: usize },

    #[error("simulation requires at least one student and one document per student")]
    EmptySimulation,

    #[error("sample list for class {class:?} is empty")]
    EmptySamples { class: &'static str },

    #[error("split {split} leaves class {class:?} without both train and test samples")]
    DegenerateSplit { split: f64, class: &'static str },

    #[error("stratum ({subgroup:?}, {task:?}) has no records")]
    EmptyStratum { subgroup: String, task: String },

    #[error("input file {0:?} is empty")]
    EmptyInput(String),

    #[error("missing required column {0:?}")]
    MissingColumn(&'static str),

    #[error("scenario is invalid: {0}")]
    Scenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
