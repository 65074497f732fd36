//! g_om extraction from per-scan fits.
//!
//! Each scan yields the factor sqrt(omega_m A / (4 gamma_m P_tone)); the
//! ensemble weighted mean carries the statistical uncertainty, while the
//! temperature and modulation depth enter as systematic terms:
//! g_om = omega_phi A_phi / sqrt(k_B T / hbar) * factor.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SpectraError};
use crate::fit::{MechanicalFit, ToneFit};
use crate::types::{CalibrationTone, HBAR, K_B};

/// Fit results for one scan, paired for combination.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanFit {
    pub scan_id: u64,
    pub amplitude: f64,
    pub omega_m: f64,
    pub gamma_m: f64,
    pub tone_power: f64,
    /// sqrt(omega_m A / (4 gamma_m P_tone)).
    pub factor: f64,
    pub factor_variance: f64,
}

impl ScanFit {
    pub fn from_fits(scan_id: u64, mech: &MechanicalFit, tone: &ToneFit) -> Result<ScanFit> {
        if !(mech.amplitude > 0.0 && mech.gamma_m > 0.0 && tone.power > 0.0) {
            return Err(SpectraError::InvalidParameter {
                name: "fits",
                reason: format!(
                    "non-positive fitted parameters: A = {}, gamma_m = {}, P_tone = {}",
                    mech.amplitude, mech.gamma_m, tone.power
                ),
            });
        }
        let factor = (mech.omega_m * mech.amplitude / (4.0 * mech.gamma_m * tone.power)).sqrt();
        // var(ln factor) = 1/4 [ var(A)/A^2 + var(g)/g^2 - 2 cov(A,g)/(A g)
        //                        + var(P)/P^2 ] (omega_m term negligible)
        let var_a = mech.covariance[0].max(0.0);
        let var_g = mech.covariance[8].max(0.0);
        let cov_ag = mech.covariance[2];
        let var_p = tone.power_variance.max(0.0);
        let var_ln = 0.25
            * (var_a / (mech.amplitude * mech.amplitude) + var_g / (mech.gamma_m * mech.gamma_m)
                - 2.0 * cov_ag / (mech.amplitude * mech.gamma_m)
                + var_p / (tone.power * tone.power));
        Ok(ScanFit {
            scan_id,
            amplitude: mech.amplitude,
            omega_m: mech.omega_m,
            gamma_m: mech.gamma_m,
            tone_power: tone.power,
            factor,
            factor_variance: var_ln.max(0.0) * factor * factor,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtractionResult {
    /// |g_om| (rad/s).
    pub g_om: f64,
    /// g_om / 2 pi (Hz).
    pub g_om_hz: f64,
    /// Statistical uncertainty on g_om (rad/s), from the scan ensemble.
    pub stat_uncertainty: f64,
    /// Systematic uncertainty on g_om (rad/s), from T and A_phi.
    pub sys_uncertainty: f64,
    /// Weighted-mean factor and its standard error.
    pub mean_factor: f64,
    pub mean_factor_err: f64,
    pub scans_used: usize,
    /// Mean fitted mechanical frequency and linewidth (rad/s).
    pub omega_m: f64,
    pub gamma_m: f64,
    pub per_scan: Vec<ScanFit>,
}

/// Known systematic uncertainties on the extraction inputs.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, Default)]
pub struct Systematics {
    pub delta_temperature_k: f64,
    pub delta_depth: f64,
}

/// Combine per-scan factors into g_om with statistical and systematic errors.
pub fn extract_gom(
    fits: &[ScanFit],
    tone: &CalibrationTone,
    temperature_k: f64,
    systematics: &Systematics,
) -> Result<ExtractionResult> {
    if fits.is_empty() {
        return Err(SpectraError::EmptyEnsemble);
    }
    tone.validate()?;
    if !(temperature_k > 0.0) {
        return Err(SpectraError::InvalidParameter {
            name: "temperature_k",
            reason: format!("must be > 0, got {temperature_k}"),
        });
    }

    // inverse-variance weighted mean; scans with degenerate covariance
    // (zero, NaN, or absurdly small variance) fall back to the ensemble
    // median variance so one bad Jacobian cannot dominate
    let mut positives: Vec<f64> = fits
        .iter()
        .map(|f| f.factor_variance)
        .filter(|v| v.is_finite() && *v > 0.0)
        .collect();
    positives.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let fallback = if positives.is_empty() {
        let mean = fits.iter().map(|f| f.factor).sum::<f64>() / fits.len() as f64;
        (1e-12 * mean).powi(2)
    } else {
        positives[positives.len() / 2]
    };
    let effective_var = |v: f64| {
        if v.is_finite() && v > 1e-6 * fallback {
            v
        } else {
            fallback
        }
    };
    let mut wsum = 0.0;
    let mut wfsum = 0.0;
    for fit in fits {
        let w = 1.0 / effective_var(fit.factor_variance);
        wsum += w;
        wfsum += w * fit.factor;
    }
    let mean_factor = wfsum / wsum;
    // standard error of the weighted mean; guard against over-confident
    // per-scan covariances with the weighted ensemble scatter
    let err_from_weights = (1.0 / wsum).sqrt();
    let err_from_scatter = if fits.len() > 1 {
        let mut num = 0.0;
        for fit in fits {
            num += (fit.factor - mean_factor).powi(2) / effective_var(fit.factor_variance);
        }
        err_from_weights * (num / (fits.len() - 1) as f64).sqrt()
    } else {
        err_from_weights
    };
    let mean_factor_err = err_from_weights.max(err_from_scatter);

    let calib = tone.omega_phi * tone.depth / (K_B * temperature_k / HBAR).sqrt();
    let g_om = calib * mean_factor;
    let stat_uncertainty = calib * mean_factor_err;
    // dg/dT = -g/(2T), dg/dA = g/A
    let sys_t = g_om * systematics.delta_temperature_k / (2.0 * temperature_k);
    let sys_a = if tone.depth > 0.0 {
        g_om * systematics.delta_depth / tone.depth
    } else {
        0.0
    };
    let sys_uncertainty = (sys_t * sys_t + sys_a * sys_a).sqrt();

    let omega_m = fits.iter().map(|f| f.omega_m).sum::<f64>() / fits.len() as f64;
    let gamma_m = fits.iter().map(|f| f.gamma_m).sum::<f64>() / fits.len() as f64;
    Ok(ExtractionResult {
        g_om,
        g_om_hz: g_om / (2.0 * std::f64::consts::PI),
        stat_uncertainty,
        sys_uncertainty,
        mean_factor,
        mean_factor_err,
        scans_used: fits.len(),
        omega_m,
        gamma_m,
        per_scan: fits.to_vec(),
    })
}
