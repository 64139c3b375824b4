use thiserror::Error;

/// Errors across the pipeline. Domain errors name the violated mathematical
/// hypothesis; resource errors report exhausted budgets without guessing at a
/// partial answer.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("graph is not a forest: it contains a cycle")]
    NotAForest,

    #[error("vertex index {0} is out of range for a graph on {1} vertices")]
    VertexOutOfRange(usize, usize),

    #[error("intersection form is not negative definite{0}")]
    NotNegativeDefinite(String),

    #[error("intersection form is degenerate (det Q = 0)")]
    DegenerateForm,

    #[error("vector ({0}) is not characteristic: requires k_i = m(v_i) mod 2 at every vertex")]
    NotCharacteristic(String),

    #[error("Spin^c index {0} is out of range: this graph has {1} classes")]
    SpinCOutOfRange(usize, usize),

    #[error("{0}")]
    HypothesisViolation(String),

    #[error("state cap of {0} states exceeded while closing equivalence classes; no partial result is returned")]
    StateCapExceeded(usize),

    #[error("requested U-power {requested} exceeds the sound level budget {budget} of this class table")]
    UnsoundRequest { requested: i64, budget: i64 },

    #[error("U-shift image lies outside the explored region")]
    ShiftOutsideRegion,

    #[error("class census did not stabilize within level budget {0}; raise --max-level")]
    StabilizationFailed(i64),

    #[error("class census changed between region margins {0} and {1}; the result is not certified sound")]
    MarginInstability(i64, i64),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code taxonomy: 1 domain, 2 resource, 3 input.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_)
            | Error::NotAForest
            | Error::VertexOutOfRange(..)
            | Error::NotCharacteristic(_)
            | Error::SpinCOutOfRange(..) => 3,
            Error::StateCapExceeded(_)
            | Error::StabilizationFailed(_)
            | Error::MarginInstability(..)
            | Error::Internal(_) => 2,
            _ => 1,
        }
    }
}
