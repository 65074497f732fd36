//! Closed-loop extraction tests: simulate scans, run the full pipeline, and
//! check the recovered coupling, its uncertainty behaviour, and the
//! calibration cancellations.

use std::f64::consts::PI;

use omc_spectra::{
    extract_gom, process_scan, simulate_scan, CalibrationTone, DetuningTag, MechanicalMode,
    NoiseModel, PipelineConfig, ScanConfig, ScanFit, SpectrumTrace, Systematics,
};

const F_M: f64 = 4.488e9;
const Q_M: f64 = 600.0;
const TEMP: f64 = 295.3;
const G_TRUE_HZ: f64 = 649e3;
const TONE_F: f64 = 4.463e9;
const TONE_DEPTH: f64 = 0.01;

fn scan_config(noise_rel: f64) -> ScanConfig {
    ScanConfig {
        mech: MechanicalMode::from_quality_factor(2.0 * PI * F_M, Q_M, TEMP),
        g_om: 2.0 * PI * G_TRUE_HZ,
        tone: Some(CalibrationTone {
            omega_phi: 2.0 * PI * TONE_F,
            depth: TONE_DEPTH,
        }),
        transfer: 3.0e-22,
        rbw_hz: 300e3,
        f_start_hz: F_M - 50e6,
        f_stop_hz: F_M + 50e6,
        points: 2001,
        input_power_w: 1e-3,
        reference_power_w: 1e-3,
        detector_p2: false,
        noise: NoiseModel {
            relative: noise_rel,
            floor_w: 1e-7,
            floor_noise_w: 0.0,
        },
        dither: None,
        detuning: DetuningTag::Blue,
    }
}

fn pipeline_config() -> PipelineConfig {
    PipelineConfig {
        background_order: 2,
        tone_freq_hz: TONE_F,
        ..Default::default()
    }
}

fn run_ensemble(config: &ScanConfig, scans: u64, seed: u64) -> Vec<ScanFit> {
    let pipe = pipeline_config();
    (0..scans)
        .map(|id| {
            let trace = simulate_scan(config, id, seed).unwrap();
            process_scan(&trace, &pipe).unwrap().0
        })
        .collect()
}

fn true_factor(config: &ScanConfig) -> f64 {
    // A = 2 T g^2 n gamma, P = T A_phi^2 omega_phi^2 / 2:
    // factor = sqrt(omega_m A / (4 gamma P)) = g sqrt(n omega_m) / (A_phi omega_phi)
    let tone = config.tone.unwrap();
    let n = config.mech.occupation();
    config.g_om * (n * config.mech.omega_m).sqrt() / (tone.depth * tone.omega_phi)
}

#[test]
fn closed_loop_noiseless_recovers_exactly() {
    let config = scan_config(0.0);
    let fits = run_ensemble(&config, 3, 11);
    let tone = config.tone.unwrap();
    let result = extract_gom(&fits, &tone, TEMP, &Systematics::default()).unwrap();
    let rel = (result.g_om_hz - G_TRUE_HZ).abs() / G_TRUE_HZ;
    // residual background-estimation bias bounds the pipeline, not the fit
    assert!(
        rel < 5e-3,
        "g = {} Hz vs {G_TRUE_HZ} ({rel:.2e})",
        result.g_om_hz
    );
}

#[test]
fn closed_loop_hundred_noisy_scans() {
    // noise tuned so the ensemble standard error lands near the
    // experimental +-8 kHz on 649 kHz
    let mut config = scan_config(0.4);
    config.points = 501;
    let fits = run_ensemble(&config, 100, 20260808);
    assert_eq!(fits.len(), 100);
    let tone = config.tone.unwrap();
    let result = extract_gom(&fits, &tone, TEMP, &Systematics::default()).unwrap();
    let sigma_hz = result.stat_uncertainty / (2.0 * PI);
    assert!(
        sigma_hz > 5e3 && sigma_hz < 13e3,
        "stat sigma {sigma_hz} Hz out of the tuned band"
    );
    let err = (result.g_om_hz - G_TRUE_HZ).abs();
    assert!(
        err < 3.0 * sigma_hz,
        "recovered {} Hz vs {G_TRUE_HZ} Hz: {err} > 3 sigma ({sigma_hz})",
        result.g_om_hz
    );
}

#[test]
fn pull_distribution_is_calibrated() {
    // per-scan factor pulls should be ~N(0,1) if the fit covariances are honest
    let config = scan_config(0.25);
    let fits = run_ensemble(&config, 100, 7);
    let f_true = true_factor(&config);
    let pulls: Vec<f64> = fits
        .iter()
        .map(|f| (f.factor - f_true) / f.factor_variance.sqrt())
        .collect();
    let mean = pulls.iter().sum::<f64>() / pulls.len() as f64;
    let var = pulls.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>() / (pulls.len() - 1) as f64;
    let std = var.sqrt();
    assert!(
        mean.abs() < 3.0 / (pulls.len() as f64).sqrt() + 0.3,
        "pull mean {mean}"
    );
    assert!(std > 0.8 && std < 1.2, "pull std {std}");
}

#[test]
fn transfer_factor_cancels() {
    // scaling every trace by a constant changes g_om by < 1e-8 relative
    let config = scan_config(0.2);
    let pipe = pipeline_config();
    let tone = config.tone.unwrap();
    let baseline: Vec<ScanFit> = run_ensemble(&config, 5, 99);
    let g0 = extract_gom(&baseline, &tone, TEMP, &Systematics::default())
        .unwrap()
        .g_om;
    for scale in [0.1, 0.37, 2.9, 10.0] {
        let fits: Vec<ScanFit> = (0..5)
            .map(|id| {
                let mut trace: SpectrumTrace = simulate_scan(&config, id, 99).unwrap();
                for p in trace.power_w.iter_mut() {
                    *p *= scale;
                }
                process_scan(&trace, &pipe).unwrap().0
            })
            .collect();
        let g = extract_gom(&fits, &tone, TEMP, &Systematics::default())
            .unwrap()
            .g_om;
        let rel = (g - g0).abs() / g0;
        assert!(rel < 1e-8, "scale {scale}: relative change {rel:.2e}");
    }
}

#[test]
fn blue_and_red_detunings_agree() {
    // different transfer factors on the two inflection points; extractions
    // agree within combined statistical error
    let mut blue = scan_config(0.3);
    blue.detuning = DetuningTag::Blue;
    let mut red = scan_config(0.3);
    red.detuning = DetuningTag::Red;
    red.transfer = 1.8e-22; // different opaque efficiency on the red side
    let tone = blue.tone.unwrap();
    let fits_blue = run_ensemble(&blue, 50, 500);
    let fits_red = run_ensemble(&red, 50, 501);
    let sys = Systematics::default();
    let gb = extract_gom(&fits_blue, &tone, TEMP, &sys).unwrap();
    let gr = extract_gom(&fits_red, &tone, TEMP, &sys).unwrap();
    let combined = (gb.stat_uncertainty.powi(2) + gr.stat_uncertainty.powi(2)).sqrt();
    let diff = (gb.g_om - gr.g_om).abs();
    assert!(
        diff < 3.0 * combined,
        "blue {} vs red {} Hz differ by {} > 3 sigma",
        gb.g_om_hz,
        gr.g_om_hz,
        diff / (2.0 * PI)
    );
}

#[test]
fn amplitude_follows_power_squared() {
    // fitted A vs input power over one decade: exponent 2.00 +- 0.05
    let pipe = pipeline_config();
    let mut log_p = Vec::new();
    let mut log_a = Vec::new();
    for (i, power_mw) in [0.4, 0.63, 1.0, 1.6, 2.5, 4.0].iter().enumerate() {
        let mut config = scan_config(0.05);
        config.detector_p2 = true;
        config.input_power_w = power_mw * 1e-3;
        let trace = simulate_scan(&config, i as u64, 3000 + i as u64).unwrap();
        let (fit, _) = process_scan(&trace, &pipe).unwrap();
        log_p.push(config.input_power_w.ln());
        log_a.push(fit.amplitude.ln());
    }
    // least-squares slope of ln A vs ln P
    let n = log_p.len() as f64;
    let mx = log_p.iter().sum::<f64>() / n;
    let my = log_a.iter().sum::<f64>() / n;
    let sxy: f64 = log_p
        .iter()
        .zip(&log_a)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum();
    let sxx: f64 = log_p.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    assert!(
        (slope - 2.0).abs() < 0.05,
        "power-law exponent {slope} should be 2.00 +- 0.05"
    );
}

#[test]
fn doubling_input_power_quadruples_amplitude() {
    let pipe = pipeline_config();
    let amp_at = |p_mw: f64, id: u64| {
        let mut config = scan_config(0.02);
        config.detector_p2 = true;
        config.input_power_w = p_mw * 1e-3;
        let trace = simulate_scan(&config, id, 4242).unwrap();
        process_scan(&trace, &pipe).unwrap().0.amplitude
    };
    let a1 = amp_at(1.0, 0);
    let a2 = amp_at(2.0, 1);
    let ratio = a2 / a1;
    assert!((ratio - 4.0).abs() < 0.2, "A(2P)/A(P) = {ratio}");
}

#[test]
fn dither_imprint_sidebands_appear_when_enabled() {
    let mut config = scan_config(0.0);
    config.dither = Some(omc_spectra::DitherImprint {
        f_dither_hz: 2e6,
        fraction: 0.2,
    });
    let with = simulate_scan(&config, 0, 5).unwrap();
    config.dither = None;
    let without = simulate_scan(&config, 0, 5).unwrap();
    // sideband bins gain power
    let idx = with
        .frequency_hz
        .iter()
        .position(|f| (f - (TONE_F + 2e6)).abs() < 3e4)
        .unwrap();
    assert!(with.power_w[idx] > 1.5 * without.power_w[idx]);
}
