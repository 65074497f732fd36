use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parameter `{name}` invalid: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("gradient index {index} out of range 1..={count}")]
    IndexOutOfRange { index: usize, count: usize },

    #[error("degenerate dimensions: {0}")]
    DegenerateDimensions(String),

    #[error("curve has no real solution for a = {a} nm, b = {b}")]
    NonRealCurve { a: f64, b: f64 },

    #[error("empty layout")]
    EmptyLayout,

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, GeometryError>;
