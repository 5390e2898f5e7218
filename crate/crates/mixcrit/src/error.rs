use thiserror::Error;

/// Errors produced by the mixture, EM, census, many-hills and toy-model routines.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("non-finite input: {0}")]
    NonFinite(String),

    /// The mixture density underflowed to zero at a data point, so its log
    /// is not representable even in log space.
    #[error("density underflow to zero at data index {index}")]
    DegenerateEval { index: usize },

    #[error("exponent spectrum enumeration capped at N = {max}, got N = {n}")]
    SizeLimit { n: usize, max: usize },

    /// The gradient is one-sided at alpha in {0, 1} and is not provided there.
    #[error("gradient undefined at mixture-weight boundary alpha = {alpha}")]
    BoundaryGradient { alpha: f64 },

    #[error("component emptied during M-step (n1 = {n1:e}, n2 = {n2:e})")]
    EmptyComponent { n1: f64, n2: f64 },

    #[error("standard deviation {sigma:e} fell below floor {floor:e}")]
    DegenerateSigma { sigma: f64, floor: f64 },

    #[error("insufficient data: need at least {need} points, got {got}")]
    InsufficientData { need: usize, got: usize },

    /// Newton polishing did not reach the certification residual.
    #[error("polish failed to certify after {steps} steps; best gradient norm {best_residual:e}")]
    NoCertification { best_residual: f64, steps: usize },

    /// A Newton step left the valid region (sigma <= 0 or alpha outside (0,1))
    /// and damping could not recover.
    #[error("polish step left the valid parameter region at step {step}")]
    RegionExit { step: usize },

    /// The polish starting point is not close enough to a critical point.
    #[error("polish start has gradient norm {grad_norm:e}, above the {limit:e} admission limit")]
    NotNearCritical { grad_norm: f64, limit: f64 },

    #[error("no interior root of the critical equation in (0, {x}]")]
    NoInteriorRoot { x: f64 },

    /// The alpha recovered from the stationarity condition lies outside (0,1),
    /// so the given abscissa is not a valid interior critical point.
    #[error("recovered mixture weight {alpha:e} lies outside (0,1)")]
    InconsistentAlpha { alpha: f64 },

    #[error("x = {x} exceeds the exp range guard (max {max})")]
    RangeExceeded { x: f64, max: f64 },

    #[error("io error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
