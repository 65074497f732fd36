use thiserror::Error;

#[derive(Debug, Error)]
pub enum LockError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("stream sampled at {rate_hz} Hz, need at least {required_hz} Hz")]
    Undersampled { rate_hz: f64, required_hz: f64 },

    #[error("lock lost at t = {at_s} s")]
    LockLost { at_s: f64 },
}

pub type Result<T> = std::result::Result<T, LockError>;
