use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectraError {
    #[error("parameter `{name}` invalid: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("background fit under-determined: {0}")]
    UnderDetermined(String),

    #[error("fit did not converge after {iterations} iterations (cost {cost:.3e})")]
    NonConvergence { iterations: usize, cost: f64 },

    #[error("peak signal-to-noise {snr:.2} below the required {required:.1}")]
    LowSnr { snr: f64, required: f64 },

    #[error("calibration tone not found above the noise floor")]
    ToneNotFound,

    #[error("empty scan ensemble")]
    EmptyEnsemble,

    #[error("trace file malformed: {0}")]
    BadTraceFile(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SpectraError>;
