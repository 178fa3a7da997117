//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A group names an object index outside `[0, num_objects)`.
    #[error("test {test}: member index {index} out of range for {num_objects} objects")]
    IndexOutOfRange {
        test: usize,
        index: usize,
        num_objects: usize,
    },

    /// A group lists the same object twice.
    #[error("test {test}: duplicate member {index}")]
    DuplicateMember { test: usize, index: usize },

    /// A group has no members.
    #[error("test {test}: empty group")]
    EmptyGroup { test: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Two inputs that must agree in length do not.
    #[error("length mismatch for {context}: expected {expected}, got {actual}")]
    LengthMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    /// A positive test whose members are all forced negative by other
    /// tests. Impossible under the noiseless OR model, so the input is
    /// corrupt and we fail fast rather than emit NaNs.
    #[error(
        "inconsistent observation: test {test} is positive but every member is forced negative"
    )]
    InconsistentObservation { test: usize },

    /// The instance exceeds the configured enumeration cap.
    #[error("problem too large: {0}")]
    ProblemTooLarge(String),

    /// The observation has probability zero under the model. Unreachable
    /// after a successful reduction; kept as a guard.
    #[error("zero evidence: observation has probability zero under the model")]
    ZeroEvidence,

    #[error("empty input")]
    EmptyInput,
}

pub type Result<T> = std::result::Result<T, Error>;
