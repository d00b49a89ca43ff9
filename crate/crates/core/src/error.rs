use thiserror::Error;

/// Errors reported by the quadrature algebra and the protocol layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A numeric parameter fell outside its valid domain.
    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    /// Quadrature forms from different simulation contexts were mixed.
    #[error("quadrature forms belong to different simulation contexts")]
    ContextMismatch,

    /// Input-referred noise is undefined at zero gain.
    #[error("equivalent input noise is undefined at zero gain")]
    ZeroGain,

    /// Conditioning on a deterministic (zero-variance) measurement.
    #[error("cannot condition on a zero-variance measurement")]
    DegenerateMeasurement,

    /// A bracketing root search found no sign change over the interval.
    #[error("no sign change over [{lo}, {hi}]; root search cannot proceed")]
    NoSignChange { lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
