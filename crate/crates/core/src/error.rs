use thiserror::Error;

/// Errors raised while designing pulses or integrating trajectories.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("wrong basis family: {0}")]
    WrongFamily(String),

    #[error("invalid interval: need tf > t0, got t0 = {t0}, tf = {tf}")]
    InvalidInterval { t0: f64, tf: f64 },

    #[error("time {t} lies outside [{t0}, {tf}]")]
    Domain { t: f64, t0: f64, tf: f64 },

    #[error("amplitudes are not normalized: |norm^2 - 1| = {residual:e}")]
    Unnormalized { residual: f64 },

    #[error("protocol mismatch: {0}")]
    ProtocolMismatch(String),

    #[error("unsupported branch: {0}")]
    UnsupportedBranch(String),

    #[error(
        "integration accuracy lost: norm drift {drift:e} at t = {time} with {steps} steps; \
         increase the step count"
    )]
    IntegrationAccuracy { drift: f64, time: f64, steps: usize },

    #[error("two-state regime violated: {0}")]
    Regime(String),

    #[error("mapping unsupported: {0}")]
    MappingUnsupported(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}

pub type Result<T> = std::result::Result<T, Error>;
