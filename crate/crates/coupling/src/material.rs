//! Cubic-crystal material properties.

use serde::{Deserialize, Serialize};

use crate::error::{CouplingError, Result};

pub const EPS0: f64 = 8.854_187_812_8e-12; // F/m
pub const HBAR: f64 = 1.054_571_817e-34; // J s

/// Cubic-crystal material constants (stiffness in GPa, photoelastic
/// constants dimensionless).
/// The piezoelectric constant e14 only matters for the eigensolve that
/// produced the fields; it is carried for completeness and unused here.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct MaterialProps {
    pub rho_kg_m3: f64,
    pub c11_gpa: f64,
    pub c12_gpa: f64,
    pub c44_gpa: f64,
    pub e14_c_m2: f64,
    pub p11: f64,
    pub p12: f64,
    pub p44: f64,
    pub eps_r: f64,
}

impl MaterialProps {
    /// GaAs, as used in the finite element modelling.
    pub fn gaas() -> Self {
        MaterialProps {
            rho_kg_m3: 5317.0,
            c11_gpa: 118.41,
            c12_gpa: 53.78,
            c44_gpa: 59.12,
            e14_c_m2: -0.16,
            p11: -0.165,
            p12: -0.140,
            p44: -0.072,
            eps_r: 11.361,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho_kg_m3 > 0.0) {
            return Err(CouplingError::InvalidParameter {
                name: "rho_kg_m3",
                reason: format!("must be > 0, got {}", self.rho_kg_m3),
            });
        }
        if !(self.eps_r > 1.0) {
            return Err(CouplingError::InvalidParameter {
                name: "eps_r",
                reason: format!("must be > 1, got {}", self.eps_r),
            });
        }
        // cubic stability
        if !(self.c11_gpa > self.c12_gpa.abs()) {
            return Err(CouplingError::InvalidParameter {
                name: "c11_gpa",
                reason: format!(
                    "cubic stability needs c11 > |c12| ({} vs {})",
                    self.c11_gpa, self.c12_gpa
                ),
            });
        }
        if !(self.c44_gpa > 0.0) {
            return Err(CouplingError::InvalidParameter {
                name: "c44_gpa",
                reason: format!("must be > 0, got {}", self.c44_gpa),
            });
        }
        Ok(())
    }

    pub fn permittivity(&self) -> f64 {
        EPS0 * self.eps_r
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mat: MaterialProps = serde_json::from_str(text)?;
        mat.validate()?;
        Ok(mat)
    }

    pub fn read_json(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
