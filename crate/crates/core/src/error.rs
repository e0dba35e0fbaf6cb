use thiserror::Error;

#[derive(Debug, Error)]
pub enum HomflowError {
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("invalid subalgebra: {0}")]
    InvalidSubalgebra(String),

    #[error("parity violation: dim g^λ − ind g = {0} is odd (non-generic λ or rank tolerance failure)")]
    ParityViolation(i64),

    #[error("chart domain error: {0}")]
    ChartDomain(String),

    #[error("degenerate radius: {0}")]
    DegenerateRadius(String),

    #[error("angle continuity violated: consecutive samples differ by {0:.4} rad (reduce dt)")]
    AngleContinuity(f64),

    #[error("integration aborted at t = {0}: nonfinite state")]
    NonfiniteState(f64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
