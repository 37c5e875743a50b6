use thiserror::Error;

use crate::phase::GammaDistances;

/// Errors raised by the tadpole library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid does not align with the edges: {0}")]
    MisalignedGrid(String),

    #[error("function does not conform to the grid: {0}")]
    GridMismatch(String),

    #[error("modulus k = {k} outside the admissible range of the {family} family")]
    ModulusOutOfRange { k: f64, family: &'static str },

    #[error("energy level {0} lies below the center value -omega^2/2")]
    EnergyBelowCenter(f64),

    #[error("phase point (p = {p}) lies above the upper turning point {p_plus}")]
    AboveTurningPoint { p: f64, p_plus: f64 },

    #[error("p = {0} outside (0, sqrt(2 omega)]")]
    OutOfPhaseRange(f64),

    #[error("the zero function has no Nehari projection")]
    ZeroFunction,

    #[error("singular linear system (zero pivot at row {0})")]
    SingularSystem(usize),

    #[error("phase point off the Gamma-curve: {0}")]
    OffCurve(GammaDistances),

    #[error("period quantization violated (residual {0:e})")]
    QuantizationViolated(f64),

    #[error("no discrete spectrum for gamma >= 0")]
    NoDiscreteSpectrum,

    #[error("lambda = {0} is the pole of the resolvent")]
    ResolventPole(f64),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
