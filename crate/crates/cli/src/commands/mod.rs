pub mod fit;
pub mod gom;
pub mod layout;
pub mod lock_sim;
pub mod pec;
pub mod simulate;

use crate::config::Validation;

/// Marker error: configuration problems exit with code 2 instead of 1.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Print warnings, convert accumulated errors into a ConfigError.
pub fn finish_validation(validation: Validation) -> Result<(), ConfigError> {
    for warning in &validation.warnings {
        eprintln!("warning: {warning}");
    }
    if validation.errors.is_empty() {
        Ok(())
    } else {
        Err(ConfigError(format!(
            "configuration invalid ({} problem{}):\n  {}",
            validation.errors.len(),
            if validation.errors.len() == 1 {
                ""
            } else {
                "s"
            },
            validation.errors.join("\n  ")
        )))
    }
}

/// File-missing errors are configuration errors (exit 2), with the path in
/// the message.
pub fn require_file(path: &std::path::Path) -> Result<(), ConfigError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(ConfigError(format!("file not found: {}", path.display())))
    }
}
