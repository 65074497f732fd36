//! `omc simulate`: synthesize spectrum-analyzer scans from a truth config.

use std::path::Path;

use anyhow::{Context, Result};
use omc_spectra::{
    simulate_scan, CalibrationTone, DetuningTag, MechanicalMode, NoiseModel, ScanConfig,
};
use serde::Serialize;

use super::finish_validation;
use crate::config::{Config, Validation};
use crate::provenance::Provenance;

#[derive(Serialize)]
struct SimulateReport {
    scans: u64,
    out_dir: String,
    provenance: Provenance,
}

pub fn run(config_path: &Path, scans: u64, seed: u64, out_dir: &Path) -> Result<()> {
    super::require_file(config_path)?;
    let config = Config::load(config_path)?;
    let mut v = Validation::default();
    let pos = Validation::positive;
    let two_pi = 2.0 * std::f64::consts::PI;

    let f_m = v.f64_checked(&config, "f_m_hz", None, pos);
    let q_m = v.f64_checked(&config, "q_m", None, pos);
    let temperature = v.f64_checked(&config, "temperature_k", None, pos);
    let g_om_hz = v.f64_checked(&config, "g_om_hz", None, pos);
    let tone_freq = v.f64_checked(&config, "tone_freq_hz", Some(0.0), Validation::non_negative);
    let tone_depth = v.f64_checked(&config, "tone_depth", Some(0.01), pos);
    if tone_depth >= 0.1 {
        v.warn(format!(
            "tone_depth {tone_depth} stretches the weak-modulation assumption (A << 1)"
        ));
    }
    let transfer = v.f64_checked(&config, "transfer", Some(3e-22), pos);
    let rbw = v.f64_checked(&config, "rbw_hz", None, pos);
    let f_start = v.f64_checked(&config, "f_start_hz", None, pos);
    let f_stop = v.f64_checked(&config, "f_stop_hz", None, pos);
    if f_stop <= f_start {
        v.error(format!(
            "f_stop_hz {f_stop} must exceed f_start_hz {f_start}"
        ));
    }
    let points = v.usize_checked(&config, "points", Some(1001));
    let input_power = v.f64_checked(&config, "input_power_w", Some(1e-3), pos);
    let reference_power = v.f64_checked(&config, "reference_power_w", Some(1e-3), pos);
    let detector_p2 = config.get("detector_p2").unwrap_or("true") == "true";
    let noise_rel = v.f64_checked(&config, "noise_rel", Some(0.0), Validation::non_negative);
    let noise_floor = v.f64_checked(
        &config,
        "noise_floor_w",
        Some(0.0),
        Validation::non_negative,
    );
    let detuning = match config.get("detuning").unwrap_or("blue") {
        "blue" => DetuningTag::Blue,
        "red" => DetuningTag::Red,
        "peak" => DetuningTag::Peak,
        other => {
            v.error(format!("detuning: unknown tag `{other}`"));
            DetuningTag::Blue
        }
    };
    let step = (f_stop - f_start) / (points.max(2) - 1) as f64;
    if step * 2.0 > rbw {
        v.warn(format!(
            "frequency step {step:.3e} Hz is not well below RBW {rbw:.3e} Hz"
        ));
    }
    finish_validation(v)?;

    let scan_config = ScanConfig {
        mech: MechanicalMode::from_quality_factor(two_pi * f_m, q_m, temperature),
        g_om: two_pi * g_om_hz,
        tone: (tone_freq > 0.0).then_some(CalibrationTone {
            omega_phi: two_pi * tone_freq,
            depth: tone_depth,
        }),
        transfer,
        rbw_hz: rbw,
        f_start_hz: f_start,
        f_stop_hz: f_stop,
        points,
        input_power_w: input_power,
        reference_power_w: reference_power,
        detector_p2,
        noise: NoiseModel {
            relative: noise_rel,
            floor_w: noise_floor,
            floor_noise_w: 0.0,
        },
        dither: None,
        detuning,
    };

    std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    for id in 0..scans {
        let trace = simulate_scan(&scan_config, id, seed).context("simulating")?;
        let path = out_dir.join(format!("scan_{id:04}.csv"));
        trace
            .write_csv(&path)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let report = SimulateReport {
        scans,
        out_dir: out_dir.display().to_string(),
        provenance: Provenance::new("simulate", &config.raw, Some(seed)),
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
