//! Lorentzian and calibration-tone fits on spectrum traces.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SpectraError};
use crate::lm::{lm_fit_weighted, LmOptions};
use crate::model::Window;
use crate::trace::SpectrumTrace;

const MIN_SNR: f64 = 3.0;

/// Thermal-peak fit: P(omega) = RBW * A / ((omega-omega_m)^2 + (gamma_m/2)^2),
/// so A absorbs 2 T g^2 n gamma_m.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MechanicalFit {
    /// Fitted amplitude A (W rad/s).
    pub amplitude: f64,
    /// Fitted center (rad/s).
    pub omega_m: f64,
    /// Fitted linewidth (rad/s).
    pub gamma_m: f64,
    /// Covariance of (amplitude, omega_m, gamma_m), row-major 3x3.
    pub covariance: Vec<f64>,
    pub snr: f64,
}

/// Tone fit result.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ToneFit {
    /// Peak tone power P_f_phi (W).
    pub power: f64,
    /// Fitted tone center (rad/s).
    pub omega_phi: f64,
    /// Variance of the peak power.
    pub power_variance: f64,
}

/// Robust per-bin noise estimate from first differences.
pub fn noise_sigma(power: &[f64]) -> f64 {
    let mut diffs: Vec<f64> = power.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    if diffs.is_empty() {
        return 0.0;
    }
    diffs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = diffs[diffs.len() / 2];
    // median |N(0,1) - N(0,1)| = 0.954 sqrt(2) sigma
    median / 1.349
}

/// Per-sample noise proxy for multiplicative detection noise:
/// sigma_i proportional to |v_i| + median|v|, where v is a *model*
/// prediction. Weighting by the fitted model rather than the data keeps the
/// weights uncorrelated with the noise realization (no downward bias); the
/// unknown proportionality constant is absorbed by the chi-square rescaling
/// in the solver.
fn sigma_proxy(model_values: &[f64]) -> Vec<f64> {
    let max = model_values
        .iter()
        .map(|p| p.abs())
        .fold(f64::MIN_POSITIVE, f64::max);
    model_values.iter().map(|p| p.abs() + 1e-6 * max).collect()
}

fn masked_samples(
    trace: &SpectrumTrace,
    exclude_hz: &[(f64, f64)],
) -> (Vec<f64>, Vec<f64>, Vec<usize>) {
    let mut omega = Vec::with_capacity(trace.frequency_hz.len());
    let mut power = Vec::with_capacity(trace.power_w.len());
    let mut index = Vec::with_capacity(trace.power_w.len());
    for (i, (&f, &p)) in trace.frequency_hz.iter().zip(&trace.power_w).enumerate() {
        if exclude_hz.iter().any(|&(lo, hi)| f >= lo && f <= hi) {
            continue;
        }
        omega.push(2.0 * std::f64::consts::PI * f);
        power.push(p);
        index.push(i);
    }
    (omega, power, index)
}

/// Fit the thermal Lorentzian, ignoring samples inside `exclude_hz` ranges
/// (the calibration-tone region). Expects the background already removed.
///
/// `noise_floor`, aligned with the trace samples, carries any power that was
/// subtracted before fitting (the removed background): detection noise is
/// multiplicative in the *raw* power, so the per-sample noise scale must
/// include it.
pub fn fit_lorentzian(
    trace: &SpectrumTrace,
    exclude_hz: &[(f64, f64)],
    noise_floor: Option<&[f64]>,
) -> Result<MechanicalFit> {
    trace.validate()?;
    let (omega, power, index) = masked_samples(trace, exclude_hz);
    let floor: Vec<f64> = match noise_floor {
        Some(nf) => index.iter().map(|&i| nf[i].abs()).collect(),
        None => vec![0.0; omega.len()],
    };
    if omega.len() < 10 {
        return Err(SpectraError::UnderDetermined(format!(
            "{} unmasked samples for the Lorentzian fit",
            omega.len()
        )));
    }
    let sigma = noise_sigma(&power);
    // peak detection on an RBW-wide moving average: a real thermal peak is
    // much wider than the RBW, while the running max of pure noise shrinks
    let step = omega[1] - omega[0];
    let rbw_ang = 2.0 * std::f64::consts::PI * trace.rbw_hz;
    let smooth_w = ((rbw_ang / step).round() as usize).clamp(1, power.len() / 10);
    let smoothed: Vec<f64> = (0..power.len())
        .map(|i| {
            let lo = i.saturating_sub(smooth_w / 2);
            let hi = (i + smooth_w / 2 + 1).min(power.len());
            power[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect();
    let mut sorted = smoothed.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = sorted[sorted.len() / 2];
    let (_peak_idx, &peak) = power
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .expect("nonempty");
    let smoothed_max = smoothed.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let snr = if sigma > 0.0 {
        (smoothed_max - median) / sigma
    } else {
        f64::INFINITY
    };
    if snr < MIN_SNR {
        return Err(SpectraError::LowSnr {
            snr,
            required: MIN_SNR,
        });
    }

    // initial guesses from the smoothed trace: peak location and half-max
    // crossings are unreliable on raw noisy bins
    let (speak_idx, speak) = smoothed
        .iter()
        .enumerate()
        .map(|(i, &v)| (i, v))
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .expect("nonempty");
    let omega_m0 = omega[speak_idx];
    let half = median + 0.5 * (speak - median);
    let mut lo = omega[0];
    for i in (0..speak_idx).rev() {
        if smoothed[i] < half {
            lo = omega[i];
            break;
        }
    }
    let mut hi = *omega.last().unwrap();
    for i in speak_idx..omega.len() {
        if smoothed[i] < half {
            hi = omega[i];
            break;
        }
    }
    let gamma0 = (hi - lo).max(omega[1] - omega[0]);
    let rbw = 2.0 * std::f64::consts::PI * trace.rbw_hz;
    let a0 = peak * (0.5 * gamma0) * (0.5 * gamma0) / rbw;

    // a quadratic residual-background term rides along: the masked
    // polynomial removal cannot know the shoulder shape under the peak, and
    // leaving these free removes that bias from the amplitude
    let w_center = 0.5 * (omega[0] + omega[omega.len() - 1]);
    let w_half = 0.5 * (omega[omega.len() - 1] - omega[0]);
    let model = move |p: &[f64], w: f64| {
        let d = w - p[1];
        let hw = 0.5 * p[2];
        let x = (w - w_center) / w_half;
        rbw * p[0] / (d * d + hw * hw) + p[3] + p[4] * x + p[5] * x * x
    };
    let p_scale = peak.abs().max(1e-300);
    // pass 1 unweighted for the model shape, pass 2 weighted by it
    let first = lm_fit_weighted(
        model,
        &omega,
        &power,
        None,
        &[a0, omega_m0, gamma0, 0.0, 0.0, 0.0],
        &[
            a0.abs().max(1e-300),
            gamma0,
            gamma0,
            p_scale,
            p_scale,
            p_scale,
        ],
        &LmOptions::default(),
    )?;
    let predicted: Vec<f64> = omega
        .iter()
        .zip(&floor)
        .map(|(&w, &fl)| model(&first.params, w) + fl)
        .collect();
    let sigmas = sigma_proxy(&predicted);
    let fit = lm_fit_weighted(
        model,
        &omega,
        &power,
        Some(&sigmas),
        &first.params,
        &[
            a0.abs().max(1e-300),
            gamma0,
            gamma0,
            p_scale,
            p_scale,
            p_scale,
        ],
        &LmOptions::default(),
    )?;
    let params = fit.params;
    if !(params[0] > 0.0 && params[2] > 0.0) {
        return Err(SpectraError::NonConvergence {
            iterations: fit.iterations,
            cost: fit.cost,
        });
    }
    // report the (amplitude, omega_m, gamma_m) covariance block
    let mut covariance = vec![0.0; 9];
    for j in 0..3 {
        for k in 0..3 {
            covariance[j * 3 + k] = fit.covariance[j * 6 + k];
        }
    }
    Ok(MechanicalFit {
        amplitude: params[0],
        omega_m: params[1],
        gamma_m: params[2],
        covariance,
        snr,
    })
}

/// Fit the window image of the calibration tone near `tone_hint_hz`.
///
/// When the tone sits within one RBW of the mechanical peak the Lorentzian
/// shoulder is fitted jointly; otherwise the local Lorentzian contribution of
/// `mech` (if given) is subtracted and the window fitted alone.
pub fn fit_tone(
    trace: &SpectrumTrace,
    window: Window,
    tone_hint_hz: f64,
    mech: Option<&MechanicalFit>,
    noise_floor: Option<&[f64]>,
) -> Result<ToneFit> {
    trace.validate()?;
    let rbw = 2.0 * std::f64::consts::PI * trace.rbw_hz;
    let omega_hint = 2.0 * std::f64::consts::PI * tone_hint_hz;

    // samples within +-6 RBW of the hint
    let mut omega = Vec::new();
    let mut power = Vec::new();
    let mut floor = Vec::new();
    for (i, (&f, &p)) in trace.frequency_hz.iter().zip(&trace.power_w).enumerate() {
        if (f - tone_hint_hz).abs() <= 6.0 * trace.rbw_hz {
            omega.push(2.0 * std::f64::consts::PI * f);
            power.push(p);
            floor.push(noise_floor.map(|nf| nf[i].abs()).unwrap_or(0.0));
        }
    }
    if omega.len() < 5 {
        return Err(SpectraError::ToneNotFound);
    }

    // tone visibility judged on the local residual after removing the
    // fitted thermal shoulder
    let shoulder: Vec<f64> = match mech {
        Some(fit) => omega
            .iter()
            .map(|&w| {
                let d = w - fit.omega_m;
                let hw = 0.5 * fit.gamma_m;
                rbw * fit.amplitude / (d * d + hw * hw)
            })
            .collect(),
        None => vec![0.0; omega.len()],
    };
    let residual: Vec<f64> = power.iter().zip(&shoulder).map(|(p, s)| p - s).collect();
    let sigma_local = noise_sigma(&residual);
    let (peak_idx, tone_peak) = residual
        .iter()
        .enumerate()
        .map(|(i, &v)| (i, v))
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .expect("nonempty");
    // the expected maximum of n noise samples is ~sqrt(2 ln n) sigma; the
    // tone must clear that by MIN_SNR
    let detection = sigma_local * (MIN_SNR + (2.0 * (residual.len() as f64).ln()).sqrt());
    if tone_peak <= 0.0 || (sigma_local > 0.0 && tone_peak < detection) {
        return Err(SpectraError::ToneNotFound);
    }

    let joint = match mech {
        Some(fit) => (fit.omega_m - omega_hint).abs() < rbw,
        None => false,
    };

    if joint {
        let fit = mech.expect("joint fit requires a mechanical fit");
        // joint fit over the local window: Lorentzian, window image, and a
        // constant soaking up background-removal leftover
        let model = move |p: &[f64], w: f64| {
            let d = w - p[1];
            let hw = 0.5 * p[2];
            rbw * p[0] / (d * d + hw * hw) + p[3] * window.eval(w, rbw, p[4]) + p[5]
        };
        let p0 = [
            fit.amplitude,
            fit.omega_m,
            fit.gamma_m,
            tone_peak.max(1e-300),
            omega_hint,
            0.0,
        ];
        let scales = [
            fit.amplitude.abs().max(1e-300),
            fit.gamma_m,
            fit.gamma_m,
            tone_peak.abs().max(1e-300),
            rbw,
            tone_peak.abs().max(1e-300),
        ];
        let first = lm_fit_weighted(
            model,
            &omega,
            &power,
            None,
            &p0,
            &scales,
            &LmOptions::default(),
        )?;
        let predicted: Vec<f64> = omega
            .iter()
            .zip(&floor)
            .map(|(&w, &fl)| model(&first.params, w) + fl)
            .collect();
        let sigmas = sigma_proxy(&predicted);
        let out = lm_fit_weighted(
            model,
            &omega,
            &power,
            Some(&sigmas),
            &first.params,
            &scales,
            &LmOptions::default(),
        )?;
        let power_fit = out.params[3];
        if power_fit <= 0.0 || (sigma_local > 0.0 && power_fit < detection) {
            return Err(SpectraError::ToneNotFound);
        }
        return Ok(ToneFit {
            power: power_fit,
            omega_phi: out.params[4],
            power_variance: out.covariance[3 * 6 + 3],
        });
    }
    let model = move |p: &[f64], w: f64| p[0] * window.eval(w, rbw, p[1]) + p[2];
    let scales = [
        tone_peak.abs().max(1e-300),
        rbw,
        tone_peak.abs().max(1e-300),
    ];
    let first = lm_fit_weighted(
        model,
        &omega,
        &residual,
        None,
        &[tone_peak, omega[peak_idx], 0.0],
        &scales,
        &LmOptions::default(),
    )?;
    // detection noise rides on the full raw power: shoulder, tone image,
    // and any removed background
    let predicted: Vec<f64> = omega
        .iter()
        .zip(&shoulder)
        .zip(&floor)
        .map(|((&w, &sh), &fl)| model(&first.params, w) + sh + fl)
        .collect();
    let sigmas = sigma_proxy(&predicted);
    let out = lm_fit_weighted(
        model,
        &omega,
        &residual,
        Some(&sigmas),
        &first.params,
        &scales,
        &LmOptions::default(),
    )?;
    if out.params[0] <= 0.0 {
        return Err(SpectraError::ToneNotFound);
    }
    Ok(ToneFit {
        power: out.params[0],
        omega_phi: out.params[1],
        power_variance: out.covariance[0],
    })
}
