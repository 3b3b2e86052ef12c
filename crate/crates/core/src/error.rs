use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("metric violation: {0}")]
    MetricViolation(String),

    #[error("invalid space description: {0}")]
    InvalidSpec(String),

    #[error("degree {degree} exceeds the configured cap {cap}")]
    DegreeCap { degree: usize, cap: usize },

    #[error("window too small: {0}")]
    WindowTooSmall(String),

    #[error("point {0} is not in the window")]
    UnknownPoint(String),

    #[error("incompatible operands: {0}")]
    Incompatible(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("not a cocycle: {0}")]
    NotCocycle(String),

    #[error("combinatorial budget exceeded: {count} simplices > {budget}")]
    Budget { count: usize, budget: usize },

    #[error("map is not controlled: {0}")]
    NotControlled(String),

    #[error("flasqueness condition ({condition}) failed: {detail}")]
    NotFlasque { condition: &'static str, detail: String },

    #[error("convexity failure: {0}")]
    NotConvex(String),

    #[error("scale too small: {0}")]
    ScaleTooSmall(String),

    #[error("tower not stabilized: {0}")]
    Unstabilized(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
