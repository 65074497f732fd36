use thiserror::Error;

#[derive(Debug, Error)]
pub enum CouplingError {
    #[error("mesh file malformed: {0}")]
    BadMeshFile(String),

    #[error("schema violation: {0}")]
    Schema(String),

    #[error("inconsistent units: {0}")]
    Units(String),

    #[error("facet {index} normal has |n| = {norm}, expected 1 within 1e-9")]
    NonUnitNormal { index: usize, norm: f64 },

    #[error("facet {index} is degenerate (area {area})")]
    DegenerateFacet { index: usize, area: f64 },

    #[error("parameter `{name}` invalid: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("field `{0}` is zero where a nonzero field is required")]
    ZeroField(&'static str),

    #[error("missing field data: {0}")]
    MissingField(&'static str),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CouplingError>;
