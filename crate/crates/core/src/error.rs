use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("composition error: {0}")]
    Composition(String),

    #[error("codomain error: {0}")]
    Codomain(String),

    #[error("degenerate side: the map is constant on the {0} side")]
    DegenerateSide(&'static str),

    #[error("not liftable: {0}")]
    NotLiftable(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("hypothesis failed: {0}")]
    Hypothesis(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("thread error at level {level}: {msg}")]
    Thread { level: usize, msg: String },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("format error: {0}")]
    Format(String),

    #[error("schedule budget exhausted at stage {stage}: {census}")]
    Budget { stage: usize, census: String },
}

pub type Result<T> = std::result::Result<T, Error>;
