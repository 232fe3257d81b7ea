use alloc::string::String;

/// Failure modes shared by every module of the core crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("parameter `{name}` = {value} is out of range")]
    OutOfRange { name: &'static str, value: f64 },

    #[error("operation requires dimension {expected}, got {found}")]
    Dimension { expected: usize, found: usize },

    #[error("CFL violation: dt = {dt} exceeds advective bound {bound}")]
    Cfl { dt: f64, bound: f64 },

    #[error("non-finite value encountered at t = {t}")]
    BlowUp { t: f64 },

    #[error("quadrature did not converge (error estimate {estimate:e})")]
    Quadrature { estimate: f64 },

    #[error("no snapshot at t = {0}")]
    MissingSnapshot(f64),

    #[error("degenerate fit window: {0}")]
    DegenerateWindow(String),

    #[error("extrapolation diverged (spread {spread:e})")]
    Extrapolation { spread: f64 },

    #[error("weighted energy tail unresolved: tail bound {bound:e} relative to total")]
    UnresolvedTail { bound: f64 },

    #[error("empty node set: {0}")]
    EmptySet(String),

    #[error("field does not cover the cylinder: {0}")]
    Coverage(String),

    #[error("inadmissible constants: {0}")]
    Inadmissible(String),
}

pub type Result<T> = core::result::Result<T, Error>;
