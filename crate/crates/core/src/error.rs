use thiserror::Error;

/// Errors raised by the numerical core.
///
/// Scalar payloads are stored as `f64` regardless of the working precision.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what}: value {value} outside of the admissible domain")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid branch polynomial: {0}")]
    InvalidPolynomial(String),

    #[error("invalid reaction term: {0}")]
    InvalidReaction(String),

    #[error("slope bound {bound} = {value} is not negative")]
    NonNegativeSlope { bound: &'static str, value: f64 },

    #[error("no positive matching speed for {speed} (Phi(0) = {phi0})")]
    NoPositiveRoot { speed: &'static str, phi0: f64 },

    #[error("phase path collapsed at u = {u} (w = {w})")]
    PathCollapse { u: f64, w: f64 },

    #[error("no sign change of the speed mismatch up to c = {c_max}")]
    BracketFailure { c_max: f64 },

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("simulation diverged at t = {t} (u = {u} at x = {x})")]
    Divergence { t: f64, x: f64, u: f64 },

    #[error("no front: u - level has constant sign")]
    NoFront,

    #[error("insufficient data: need at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("non-positive distance {value} at t = {t}")]
    NonPositiveDistance { t: f64, value: f64 },

    #[error("degenerate profile: {0}")]
    DegenerateProfile(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
