//! Synthetic scan generation for round-trip tests and fixtures.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{sa_power, PsdModel, Window};
use crate::trace::{DetuningTag, SpectrumTrace};
use crate::types::{CalibrationTone, MechanicalMode};

#[derive(Debug, Clone, Copy, Serialize, Deserialize, Default)]
pub struct NoiseModel {
    /// Per-bin multiplicative Gaussian noise (relative sigma).
    pub relative: f64,
    /// Constant additive background floor (W).
    pub floor_w: f64,
    /// Additive Gaussian noise on the floor (W, sigma).
    pub floor_noise_w: f64,
}

/// Optional dither imprint: sidebands of the calibration tone at the dither
/// frequency, for fast un-averaged scans.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DitherImprint {
    pub f_dither_hz: f64,
    /// Sideband power as a fraction of the tone peak.
    pub fraction: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ScanConfig {
    pub mech: MechanicalMode,
    /// Truth coupling (rad/s).
    pub g_om: f64,
    pub tone: Option<CalibrationTone>,
    /// Detection-chain transfer at the reference input power.
    pub transfer: f64,
    pub rbw_hz: f64,
    pub f_start_hz: f64,
    pub f_stop_hz: f64,
    pub points: usize,
    pub input_power_w: f64,
    /// Photodetector current tracks received laser power, so measured
    /// microwave power scales as the square of input power.
    pub reference_power_w: f64,
    pub detector_p2: bool,
    pub noise: NoiseModel,
    pub dither: Option<DitherImprint>,
    pub detuning: DetuningTag,
}

impl ScanConfig {
    pub fn effective_transfer(&self) -> f64 {
        if self.detector_p2 {
            let ratio = self.input_power_w / self.reference_power_w;
            self.transfer * ratio * ratio
        } else {
            self.transfer
        }
    }
}

/// Generate one scan. Identical (seed, scan_id) pairs give identical traces.
pub fn simulate_scan(config: &ScanConfig, scan_id: u64, seed: u64) -> Result<SpectrumTrace> {
    config.mech.validate()?;
    if let Some(tone) = &config.tone {
        tone.validate()?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(scan_id);
    let model = PsdModel {
        mech: config.mech,
        g_om: config.g_om,
        tone: config.tone,
        transfer: config.effective_transfer(),
    };
    let rbw = 2.0 * std::f64::consts::PI * config.rbw_hz;
    let n = config.points.max(2);
    let step = (config.f_stop_hz - config.f_start_hz) / (n - 1) as f64;
    let mut frequency_hz = Vec::with_capacity(n);
    let mut power_w = Vec::with_capacity(n);
    for i in 0..n {
        let f = config.f_start_hz + i as f64 * step;
        let omega = 2.0 * std::f64::consts::PI * f;
        let mut p = sa_power(omega, &model, rbw, Window::Gaussian, None);
        if let (Some(tone), Some(dither)) = (&config.tone, &config.dither) {
            let peak = model.transfer
                * 0.5
                * tone.depth
                * tone.depth
                * tone.omega_phi
                * tone.omega_phi
                * dither.fraction;
            for sign in [-1.0, 1.0] {
                let center =
                    tone.omega_phi + sign * 2.0 * std::f64::consts::PI * dither.f_dither_hz;
                p += peak * Window::Gaussian.eval(omega, rbw, center);
            }
        }
        let noisy = p * (1.0 + config.noise.relative * gauss(&mut rng))
            + config.noise.floor_w
            + config.noise.floor_noise_w * gauss(&mut rng);
        frequency_hz.push(f);
        power_w.push(noisy.max(0.0));
    }
    let trace = SpectrumTrace {
        frequency_hz,
        power_w,
        rbw_hz: config.rbw_hz,
        input_power_w: config.input_power_w,
        scan_id,
        detuning: config.detuning,
    };
    trace.validate()?;
    Ok(trace)
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    loop {
        let u: f64 = rng.gen::<f64>();
        if u > f64::MIN_POSITIVE {
            let v: f64 = rng.gen::<f64>();
            return (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos();
        }
    }
}
