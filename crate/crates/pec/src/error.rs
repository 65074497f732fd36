use thiserror::Error;

#[derive(Debug, Error)]
pub enum PecError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parameter `{name}` invalid: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("empty layout")]
    EmptyLayout,

    #[error(
        "insufficient padding: exposed pixels need {required_nm:.0} nm of margin, found {actual_nm:.0} nm"
    )]
    InsufficientPadding { required_nm: f64, actual_nm: f64 },

    #[error("dose map file malformed: {0}")]
    BadDoseFile(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, PecError>;
