//! `omc lock-sim`: dither-lock feedback simulation to a trajectory CSV.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use omc_locksim::{run_lock, LockConfig, LockMode, LockSide, PlantState, C_LIGHT};
use omc_spectra::OpticalResonance;
use serde::Serialize;

use super::finish_validation;
use crate::config::{Config, Validation};
use crate::provenance::Provenance;

#[derive(Serialize)]
struct LockReport {
    converged: bool,
    mean_offset_gamma: f64,
    lock_lost_at_s: Option<f64>,
    samples: usize,
    provenance: Provenance,
}

pub fn run(config_path: &Path, duration: f64, seed: u64, out: &Path) -> Result<()> {
    super::require_file(config_path)?;
    let config = Config::load(config_path)?;
    let mut v = Validation::default();
    let pos = Validation::positive;
    let two_pi = 2.0 * std::f64::consts::PI;

    let f_o = v.f64_checked(&config, "f_o_hz", None, pos);
    let q_loaded = v.f64_checked(&config, "q_loaded", None, pos);
    let q_intrinsic = v.f64_checked(&config, "q_intrinsic", None, pos);
    let efficiency = v.f64_checked(&config, "efficiency", Some(1.0), pos);
    let harmonic = v.usize_checked(&config, "harmonic", Some(2)) as u32;
    let side = match config.get("side").unwrap_or("red") {
        "red" => LockSide::Red,
        "blue" => LockSide::Blue,
        other => {
            v.error(format!("side: `{other}` (expected red or blue)"));
            LockSide::Red
        }
    };
    let mode = match config.get("mode").unwrap_or("dither") {
        "dither" => LockMode::Dither { harmonic },
        "side" => LockMode::SideLock {
            setpoint: v.f64_checked(&config, "setpoint", None, pos),
        },
        other => {
            v.error(format!("mode: `{other}` (expected dither or side)"));
            LockMode::Dither { harmonic }
        }
    };
    let f_dither = v.f64_checked(&config, "f_dither_hz", Some(100.0), pos);
    let dither_frac = v.f64_checked(
        &config,
        "dither_amplitude_gamma",
        Some(0.03),
        Validation::non_negative,
    );
    let time_constant = v.f64_checked(&config, "time_constant_s", Some(0.03), pos);
    let dt = v.f64_checked(&config, "dt_s", Some(2e-5), pos);
    let start_offset = v.f64_checked(&config, "start_offset_gamma", Some(0.25), |_| None);
    let center_rate_hz = v.f64_checked(&config, "center_drift_hz_per_s", Some(0.0), |_| None);
    let walk_sigma_hz = v.f64_checked(
        &config,
        "center_walk_sigma_hz",
        Some(0.0),
        Validation::non_negative,
    );
    let walk_tau = v.f64_checked(&config, "center_walk_tau_s", Some(1.0), pos);
    let eta_rate = v.f64_checked(&config, "efficiency_drift_per_s", Some(0.0), |_| None);
    if q_loaded >= q_intrinsic {
        v.error(format!(
            "q_loaded {q_loaded} must be below q_intrinsic {q_intrinsic}"
        ));
    }
    finish_validation(v)?;

    let resonance = OpticalResonance::from_quality_factors(two_pi * f_o, q_loaded, q_intrinsic)
        .context("building resonance")?;
    let mut plant = PlantState::new(resonance, efficiency, seed);
    plant.center_drift.linear_rate = two_pi * center_rate_hz;
    plant.center_drift.walk_sigma = two_pi * walk_sigma_hz;
    plant.center_drift.walk_tau = walk_tau;
    plant.efficiency_drift.linear_rate = eta_rate;

    let lambda_peak = plant.lambda_center();
    let gamma_lambda = lambda_peak * lambda_peak * resonance.gamma_o() / (two_pi * C_LIGHT);
    let lock_config = LockConfig {
        mode,
        side,
        f_dither_hz: f_dither,
        dither_amplitude_m: dither_frac * gamma_lambda,
        time_constant_s: time_constant,
        dt_s: dt,
        ..LockConfig::second_harmonic_defaults()
    };
    let sign = match side {
        LockSide::Red => 1.0,
        LockSide::Blue => -1.0,
    };
    let lambda_start = lambda_peak + sign * start_offset * gamma_lambda;
    let result = run_lock(plant, &lock_config, lambda_start, duration).context("running lock")?;

    let mut file = std::io::BufWriter::new(
        std::fs::File::create(out).with_context(|| format!("creating {}", out.display()))?,
    );
    writeln!(file, "t_s,lambda_m,demod,transmission,locked")?;
    for p in &result.trajectory {
        writeln!(
            file,
            "{},{},{},{},{}",
            p.t_s,
            p.lambda_m,
            p.demod,
            p.transmission,
            if p.locked { 1 } else { 0 }
        )?;
    }
    let report = LockReport {
        converged: result.converged,
        mean_offset_gamma: result.mean_offset_gamma,
        lock_lost_at_s: result.lock_lost_at,
        samples: result.trajectory.len(),
        provenance: Provenance::new("lock-sim", &config.raw, Some(seed)),
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
