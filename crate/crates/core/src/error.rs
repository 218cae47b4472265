use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure modes shared by all solver layers.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("state outside the model domain: {0}")]
    Domain(String),
    #[error("non-hyperbolic point: {0}")]
    Degenerate(String),
    #[error("wave curve left the admissible region: {0}")]
    Range(String),
    #[error("states are not Rankine-Hugoniot compatible (residual {residual:e})")]
    Inconsistent { residual: f64 },
    #[error("invalid coupling condition: {0}")]
    InvalidCondition(String),
    #[error("junction problem not solvable: {0}")]
    JunctionSolvability(String),
    #[error("Riemann data too far apart: {0}")]
    LargeData(String),
    #[error("stationary profile became sonic: {0}")]
    SonicTransition(String),
    #[error("small-BV budget exceeded: {0}")]
    SmallBv(String),
    #[error("interaction cap of {0} events exceeded")]
    InteractionCap(usize),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("requested time {t} outside trajectory [0, {end}]")]
    OutsideTrajectory { t: f64, end: f64 },
    #[error("finite-volume setup: {0}")]
    FiniteVolume(String),
    #[error("configuration: {0}")]
    Config(String),
}

impl Error {
    /// Broad class used for process exit codes.
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Config(_) | Error::Geometry(_) | Error::InvalidCondition(_) => ErrorClass::Config,
            Error::SmallBv(_) => ErrorClass::SmallBv,
            Error::InteractionCap(_) => ErrorClass::Cap,
            _ => ErrorClass::Solver,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    SmallBv,
    Solver,
    Cap,
}
