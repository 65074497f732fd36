//! Point spread function: weighted Gaussian-Pearson VII product terms.

use serde::{Deserialize, Serialize};

use crate::error::{PecError, Result};
use crate::expint::expint;

/// One Gaussian-Pearson VII product term,
/// f_GP[sigma, gamma, nu; r] = exp(-gamma^2/sigma^2) / (pi gamma^2 E_nu(gamma^2/sigma^2))
///                             * exp(-r^2/sigma^2) * (r^2/gamma^2 + 1)^(-nu),
/// radially normalized: the integral of f_GP * 2 pi r over [0, inf) is 1.
/// gamma = 0 or nu = 0 reduce exactly to the plain Gaussian
/// exp(-r^2/sigma^2) / (pi sigma^2).
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct GpTerm {
    pub weight: f64,
    pub sigma_nm: f64,
    pub gamma_nm: f64,
    pub nu: f64,
}

impl GpTerm {
    pub fn gaussian(weight: f64, sigma_nm: f64) -> Self {
        GpTerm {
            weight,
            sigma_nm,
            gamma_nm: 0.0,
            nu: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.weight > 0.0) {
            return Err(PecError::InvalidParameter {
                name: "weight",
                reason: format!("must be > 0, got {}", self.weight),
            });
        }
        if !(self.sigma_nm > 0.0) {
            return Err(PecError::InvalidParameter {
                name: "sigma_nm",
                reason: format!("must be > 0, got {}", self.sigma_nm),
            });
        }
        if !(self.gamma_nm >= 0.0) {
            return Err(PecError::InvalidParameter {
                name: "gamma_nm",
                reason: format!("must be >= 0, got {}", self.gamma_nm),
            });
        }
        if !(self.nu >= 0.0) {
            return Err(PecError::InvalidParameter {
                name: "nu",
                reason: format!("must be >= 0, got {}", self.nu),
            });
        }
        Ok(())
    }
}

/// Evaluate one term at radius r (nm), in nm^-2.
pub fn gp_eval(term: &GpTerm, r_nm: f64) -> Result<f64> {
    term.validate()?;
    if !(r_nm >= 0.0) {
        return Err(PecError::Domain(format!("radius must be >= 0, got {r_nm}")));
    }
    let s2 = term.sigma_nm * term.sigma_nm;
    let gauss = (-r_nm * r_nm / s2).exp();
    if term.gamma_nm == 0.0 || term.nu == 0.0 {
        // analytic limit: E_0(x) = exp(-x)/x collapses the prefactor to 1/(pi sigma^2)
        return Ok(gauss / (std::f64::consts::PI * s2));
    }
    let g2 = term.gamma_nm * term.gamma_nm;
    let x = g2 / s2;
    let prefactor = (-x).exp() / (std::f64::consts::PI * g2 * expint(term.nu, x)?);
    Ok(prefactor * gauss * (r_nm * r_nm / g2 + 1.0).powf(-term.nu))
}

/// Weighted mixture of GP terms with a short-range cutoff: evaluation below
/// the cutoff radius clamps to the cutoff value (flat core).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PsfModel {
    pub terms: Vec<GpTerm>,
    pub cutoff_nm: f64,
}

impl PsfModel {
    /// The GaAs 250 nm heterostructure PSF used for snowflake crystal
    /// patterns.
    pub fn gaas_250nm() -> Self {
        PsfModel {
            terms: vec![
                GpTerm {
                    weight: 0.143885,
                    sigma_nm: 685.0,
                    gamma_nm: 1.0,
                    nu: 1.0,
                },
                GpTerm::gaussian(0.172662, 5.0),
                GpTerm::gaussian(0.683453, 13_000.0),
            ],
            cutoff_nm: 100.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.terms.is_empty() {
            return Err(PecError::InvalidParameter {
                name: "terms",
                reason: "at least one term required".into(),
            });
        }
        for term in &self.terms {
            term.validate()?;
        }
        let total: f64 = self.terms.iter().map(|t| t.weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(PecError::InvalidParameter {
                name: "weights",
                reason: format!("must sum to 1 within 1e-9, got {total}"),
            });
        }
        if !(self.cutoff_nm >= 0.0) {
            return Err(PecError::InvalidParameter {
                name: "cutoff_nm",
                reason: format!("must be >= 0, got {}", self.cutoff_nm),
            });
        }
        Ok(())
    }

    pub fn weight_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.weight).sum()
    }

    pub fn max_sigma(&self) -> f64 {
        self.terms.iter().map(|t| t.sigma_nm).fold(0.0, f64::max)
    }

    pub fn min_sigma(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.sigma_nm)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: PsfModel = serde_json::from_str(text)?;
        model.validate()?;
        Ok(model)
    }

    pub fn read_json(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Evaluate the mixture at radius r (nm), clamped to the short-range cutoff.
pub fn psf_eval(model: &PsfModel, r_nm: f64) -> Result<f64> {
    if !(r_nm >= 0.0) {
        return Err(PecError::Domain(format!("radius must be >= 0, got {r_nm}")));
    }
    let r = r_nm.max(model.cutoff_nm);
    let mut acc = 0.0;
    for term in &model.terms {
        acc += term.weight * gp_eval(term, r)?;
    }
    Ok(acc)
}
