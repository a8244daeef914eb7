use thiserror::Error;

/// Errors produced by the simulator and the estimator.
#[derive(Debug, Error)]
pub enum Error {
    /// The path-loss model is only defined at or beyond its reference floor.
    #[error("distance {distance_km} km is below the path-loss model floor of {floor_km} km")]
    DistanceBelowModelFloor { distance_km: f64, floor_km: f64 },

    /// The shadowing-difference density does not exist for a zero spread.
    #[error("shadowing spread is zero; the shadowing-difference density is undefined")]
    DegenerateShadowing,

    #[error("adaptive quadrature did not reach tolerance {tolerance:e} (estimated error {estimated_error:e})")]
    QuadratureNonConvergence { tolerance: f64, estimated_error: f64 },

    #[error("no SNR samples")]
    EmptySample,

    /// Order-statistic bounds need at least three samples.
    #[error("order-statistic bounds need at least 3 samples, got {count}")]
    InsufficientSamples { count: usize },

    #[error("unknown sweep variable `{0}` (expected one of I, J, d0, d1, M, sigma_s)")]
    InvalidSweepVariable(String),

    #[error("invalid sweep value `{value}` for `{variable}`")]
    InvalidSweepValue { variable: String, value: String },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("scenario file: {0}")]
    ScenarioFormat(#[from] serde_json::Error),

    #[error("I/O failure: {0}")]
    IoFailure(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
