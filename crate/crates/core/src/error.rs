use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("position {position} outside domain [{lo}, {hi}]")]
    OutOfDomain { position: f64, lo: f64, hi: f64 },

    #[error("operator has a zero mode (determinant readout {readout:.3e} below {threshold:.3e}); use the regularized determinant")]
    ZeroMode { readout: f64, threshold: f64 },

    #[error("eigenvalue ratio series not converged after {terms} terms (last increment {last_increment:.3e})")]
    RatioSeriesNotConverged { terms: usize, last_increment: f64 },

    #[error("inverse iteration did not converge: {0}")]
    NoConvergence(String),

    #[error("spectral gap {gap:.3e} below 1e-6; project small eigenvalues out first")]
    GapTooSmall { gap: f64 },

    #[error("non-monotone grid convergence: values {0:?}")]
    NonMonotone([f64; 3]),

    #[error("threshold {delta:.6e} falls inside an eigenvalue cluster (nearest eigenvalue {nearest:.6e})")]
    ThresholdInCluster { delta: f64, nearest: f64 },

    #[error("not a complex: ||d.d|| = {0:.3e} exceeds tolerance")]
    NotAComplex(f64),

    #[error("comparison map is rank deficient (rank {rank}, expected {expected})")]
    RankDeficient { rank: usize, expected: usize },

    #[error("config error at {path}: {message}")]
    Config { path: String, message: String },

    #[error("unknown scenario '{0}'")]
    UnknownScenario(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
