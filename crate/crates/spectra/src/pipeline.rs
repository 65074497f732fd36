//! End-to-end per-scan processing: background removal, thermal-peak fit,
//! tone fit.

use serde::{Deserialize, Serialize};

use crate::background::remove_background;
use crate::error::Result;
use crate::extract::ScanFit;
use crate::fit::{fit_lorentzian, fit_tone};
use crate::model::{check_rbw_ordering, Window};
use crate::trace::SpectrumTrace;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub background_order: usize,
    /// Expected calibration-tone frequency (Hz).
    pub tone_freq_hz: f64,
    pub window: Window,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            background_order: 2,
            tone_freq_hz: 0.0,
            window: Window::Gaussian,
        }
    }
}

/// Process one scan into the fit pair used for extraction. Returns the scan
/// fit and any sampling-hierarchy warnings.
pub fn process_scan(
    trace: &SpectrumTrace,
    config: &PipelineConfig,
) -> Result<(ScanFit, Vec<String>)> {
    trace.validate()?;
    let mut warnings = Vec::new();

    // normalize out the absolute power scale: the extracted factor
    // sqrt(A / P_tone) is invariant, and the fits stay well conditioned for
    // any detection-chain gain
    let norm = trace
        .power_w
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut trace = trace.clone();
    for p in trace.power_w.iter_mut() {
        *p /= norm;
    }
    let trace = &trace;

    let tone_mask = (
        config.tone_freq_hz - 5.0 * trace.rbw_hz,
        config.tone_freq_hz + 5.0 * trace.rbw_hz,
    );
    let in_tone = |f: f64| config.tone_freq_hz > 0.0 && f >= tone_mask.0 && f <= tone_mask.1;

    // locate the thermal peak outside the tone region and estimate its
    // linewidth from the half-maximum crossings
    let span = trace.frequency_hz.last().unwrap() - trace.frequency_hz[0];
    let floor = {
        let mut sorted = trace.power_w.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        sorted[sorted.len() / 2]
    };
    let (peak_idx, peak) = trace
        .frequency_hz
        .iter()
        .zip(&trace.power_w)
        .enumerate()
        .filter(|(_, (f, _))| !in_tone(**f))
        .map(|(i, (_, p))| (i, *p))
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .expect("validated nonempty");
    let f_peak = trace.frequency_hz[peak_idx];
    let half = floor + 0.5 * (peak - floor);
    let mut f_lo = trace.frequency_hz[0];
    for i in (0..peak_idx).rev() {
        if trace.power_w[i] < half && !in_tone(trace.frequency_hz[i]) {
            f_lo = trace.frequency_hz[i];
            break;
        }
    }
    let mut f_hi = *trace.frequency_hz.last().unwrap();
    for i in peak_idx..trace.frequency_hz.len() {
        if trace.power_w[i] < half && !in_tone(trace.frequency_hz[i]) {
            f_hi = trace.frequency_hz[i];
            break;
        }
    }
    let fwhm = (f_hi - f_lo).max(trace.rbw_hz);
    let guard = (3.0 * fwhm).min(0.35 * span);
    let mut masks = vec![(f_peak - guard, f_peak + guard)];
    if config.tone_freq_hz > 0.0 {
        masks.push(tone_mask);
    }
    let (cleaned, background) = remove_background(trace, config.background_order, &masks)?;
    // the removed background still carries detection noise; keep its level
    // as the per-sample noise-scale floor for the weighted fits
    let floor: Vec<f64> = cleaned
        .frequency_hz
        .iter()
        .map(|&f| background.eval(2.0 * std::f64::consts::PI * f))
        .collect();

    let exclude = if config.tone_freq_hz > 0.0 {
        vec![tone_mask]
    } else {
        vec![]
    };
    let mech = fit_lorentzian(&cleaned, &exclude, Some(&floor))?;
    if let Some(w) = check_rbw_ordering(
        2.0 * std::f64::consts::PI * cleaned.step_hz(),
        2.0 * std::f64::consts::PI * trace.rbw_hz,
        mech.gamma_m,
    ) {
        warnings.push(w);
    }
    let tone = fit_tone(
        &cleaned,
        config.window,
        config.tone_freq_hz,
        Some(&mech),
        Some(&floor),
    )?;
    let mut fit = ScanFit::from_fits(trace.scan_id, &mech, &tone)?;
    // restore physical units on the reported fit quantities; the factor and
    // its variance are scale-free already
    fit.amplitude *= norm;
    fit.tone_power *= norm;
    Ok((fit, warnings))
}
