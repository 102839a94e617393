use crate::hilbert::InternalLevel;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("cannot normalize a state with squared norm {norm_sq:e}")]
    ZeroNorm { norm_sq: f64 },

    #[error("state is not normalized: |norm_sq - 1| = {deviation:e}")]
    NotNormalized { deviation: f64 },

    #[error("the minus cat at phi = 0 (mod pi) is the zero vector and has no normalized form")]
    DegenerateCat,

    #[error("measurement outcome {outcome:?} has vanishing probability")]
    DegenerateMeasurement { outcome: InternalLevel },

    #[error(
        "projection onto {outcome:?} leaves both cavity sectors occupied; \
         the reduced motional state is not pure"
    )]
    EntangledCavity { outcome: InternalLevel },

    #[error("no photon amplitude to detect at tau = {tau}")]
    NoPhotonToDetect { tau: f64 },

    #[error("integration requires {steps} steps, over the limit of {limit}")]
    StepOverflow { steps: f64, limit: u64 },

    #[error("non-finite amplitude during integration at m = {m}, tau = {tau}")]
    NonFinite { m: usize, tau: f64 },

    #[error("initial state has unsupported weight {mass:e} in the (n=1, e) sector")]
    UnsupportedSector { mass: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("verification failed: max deviation {max_deviation:e} exceeds {threshold:e}")]
    Verification { max_deviation: f64, threshold: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
