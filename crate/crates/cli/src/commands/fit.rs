//! `omc fit`: run the extraction pipeline over a directory of trace CSVs.

use std::path::Path;

use anyhow::{Context, Result};
use omc_spectra::{
    extract_gom, process_scan, CalibrationTone, PipelineConfig, ScanFit, SpectrumTrace, Systematics,
};
use serde::Serialize;

use super::{finish_validation, ConfigError};
use crate::config::Validation;
use crate::provenance::Provenance;

#[derive(Serialize)]
struct FitReport {
    g_om_hz: f64,
    g_om_rad_s: f64,
    stat_uncertainty_hz: f64,
    sys_uncertainty_hz: f64,
    mean_factor: f64,
    scans_used: usize,
    scans_failed: usize,
    f_m_hz: f64,
    gamma_m_hz: f64,
    per_scan: Vec<ScanRow>,
    provenance: Provenance,
}

#[derive(Serialize)]
struct ScanRow {
    scan_id: u64,
    amplitude: f64,
    f_m_hz: f64,
    gamma_m_hz: f64,
    tone_power_w: f64,
    factor: f64,
    factor_sigma: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn run(
    traces_dir: &Path,
    tone_freq_hz: f64,
    tone_depth: f64,
    temperature_k: f64,
    delta_temp: f64,
    delta_depth: f64,
    background_order: usize,
    csv_scans: bool,
    out: &Path,
) -> Result<()> {
    let mut v = Validation::default();
    if !(tone_freq_hz > 0.0) {
        v.error(format!("tone-freq: must be > 0, got {tone_freq_hz}"));
    }
    if !(tone_depth > 0.0) {
        v.error(format!("tone-depth: must be > 0, got {tone_depth}"));
    } else if tone_depth >= 0.1 {
        v.warn(format!(
            "tone-depth {tone_depth} stretches the weak-modulation assumption (A << 1)"
        ));
    }
    if !(temperature_k > 0.0) {
        v.error(format!("temp: must be > 0, got {temperature_k}"));
    }
    if !traces_dir.is_dir() {
        v.error(format!("traces: not a directory: {}", traces_dir.display()));
    }
    finish_validation(v)?;

    let mut paths: Vec<_> = std::fs::read_dir(traces_dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().and_then(|e| e.to_str()) == Some("csv"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(
            ConfigError(format!("no .csv traces found in {}", traces_dir.display())).into(),
        );
    }

    let pipeline = PipelineConfig {
        background_order,
        tone_freq_hz,
        ..Default::default()
    };
    let mut fits: Vec<ScanFit> = Vec::new();
    let mut failed = 0usize;
    for path in &paths {
        let trace =
            SpectrumTrace::read_csv(path).with_context(|| format!("reading {}", path.display()))?;
        match process_scan(&trace, &pipeline) {
            Ok((fit, warnings)) => {
                for w in warnings {
                    eprintln!("warning: {}: {w}", path.display());
                }
                fits.push(fit);
            }
            Err(e) => {
                failed += 1;
                eprintln!("warning: {} skipped: {e}", path.display());
            }
        }
    }

    let tone = CalibrationTone {
        omega_phi: 2.0 * std::f64::consts::PI * tone_freq_hz,
        depth: tone_depth,
    };
    let result = extract_gom(
        &fits,
        &tone,
        temperature_k,
        &Systematics {
            delta_temperature_k: delta_temp,
            delta_depth,
        },
    )
    .context("combining scans")?;

    let two_pi = 2.0 * std::f64::consts::PI;
    let report = FitReport {
        g_om_hz: result.g_om_hz,
        g_om_rad_s: result.g_om,
        stat_uncertainty_hz: result.stat_uncertainty / two_pi,
        sys_uncertainty_hz: result.sys_uncertainty / two_pi,
        mean_factor: result.mean_factor,
        scans_used: result.scans_used,
        scans_failed: failed,
        f_m_hz: result.omega_m / two_pi,
        gamma_m_hz: result.gamma_m / two_pi,
        per_scan: result
            .per_scan
            .iter()
            .map(|s| ScanRow {
                scan_id: s.scan_id,
                amplitude: s.amplitude,
                f_m_hz: s.omega_m / two_pi,
                gamma_m_hz: s.gamma_m / two_pi,
                tone_power_w: s.tone_power,
                factor: s.factor,
                factor_sigma: s.factor_variance.sqrt(),
            })
            .collect(),
        provenance: Provenance::new(
            "fit",
            &format!(
                "tone_freq_hz = {tone_freq_hz}\ntone_depth = {tone_depth}\ntemperature_k = {temperature_k}\nbackground_order = {background_order}"
            ),
            None,
        ),
    };
    let text = serde_json::to_string_pretty(&report)?;
    std::fs::write(out, &text).with_context(|| format!("writing {}", out.display()))?;
    if csv_scans {
        let mut csv = String::from(
            "scan_id,amplitude,f_m_hz,gamma_m_hz,tone_power_w,factor,factor_sigma
",
        );
        for row in &report.per_scan {
            csv.push_str(&format!(
                "{},{},{},{},{},{},{}
",
                row.scan_id,
                row.amplitude,
                row.f_m_hz,
                row.gamma_m_hz,
                row.tone_power_w,
                row.factor,
                row.factor_sigma
            ));
        }
        let csv_path = out.with_extension("scans.csv");
        std::fs::write(&csv_path, csv)
            .with_context(|| format!("writing {}", csv_path.display()))?;
    }
    println!("{text}");
    Ok(())
}
