use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("frame matrix numerically singular at {point:?} (condition number {cond:.3e})")]
    FrameSingular { point: [f64; 3], cond: f64 },
    #[error("contact condition gamma/r > 0 violated at r = {r}")]
    ContactViolation { r: f64 },
    #[error("step size underflow at r = {r}")]
    StepFailure { r: f64 },
    #[error("trajectory left the domain at r = {r}")]
    DomainExit { r: f64 },
    #[error("homogeneous coordinate not immersed at r = {r}")]
    ImmersionFailure { r: f64 },
    #[error("radicand of b is negative ({radicand})")]
    ComplexB { radicand: f64 },
    #[error("no first singular radius within horizon {horizon} for theta = {theta}")]
    NotOvertwistedWithinHorizon { theta: f64, horizon: f64 },
    #[error("point {0:?} outside the declared domain")]
    OutsideDomain([f64; 3]),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
