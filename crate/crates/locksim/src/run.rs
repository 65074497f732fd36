//! Closed-loop dither-lock simulation.

use serde::{Deserialize, Serialize};

use crate::error::{LockError, Result};
use crate::lockin::LockIn;
use crate::pid::{Pid, PidGains};
use crate::plant::{PlantState, C_LIGHT};

/// What the loop servos onto.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LockMode {
    /// Dither lock at the n-th harmonic: n = 1 finds the transmission peak,
    /// n = 2 an inflection point.
    Dither { harmonic: u32 },
    /// Plain transmission-value side lock (baseline for comparison).
    SideLock { setpoint: f64 },
}

/// Which inflection point an n = 2 lock walks to (side in optical
/// frequency: blue = above the resonance center).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum LockSide {
    Blue,
    #[default]
    Red,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LockConfig {
    pub mode: LockMode,
    pub side: LockSide,
    pub f_dither_hz: f64,
    /// Dither amplitude in wavelength (m).
    pub dither_amplitude_m: f64,
    /// Lock-in time constant (s); also the PID update period.
    pub time_constant_s: f64,
    /// Simulation step (s).
    pub dt_s: f64,
    /// Proportional gain in units of the demod-slope inverse; the absolute
    /// gain is calibrated on the static plant at startup.
    pub kp_norm: f64,
    pub ki_norm: f64,
    pub kd_norm: f64,
}

impl LockConfig {
    pub fn second_harmonic_defaults() -> Self {
        LockConfig {
            mode: LockMode::Dither { harmonic: 2 },
            side: LockSide::Red,
            f_dither_hz: 100.0,
            dither_amplitude_m: 0.0, // filled in from the plant linewidth
            time_constant_s: 0.03,   // 3 dither periods
            dt_s: 2e-5,              // 500 samples per period
            kp_norm: 0.4,
            ki_norm: 0.08,
            kd_norm: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f_dither_hz > 0.0 && self.dt_s > 0.0) {
            return Err(LockError::InvalidParameter(
                "f_dither and dt must be positive".into(),
            ));
        }
        if self.f_dither_hz * self.dt_s > 0.05 {
            return Err(LockError::InvalidParameter(format!(
                "f_dither * dt = {} must be << 1",
                self.f_dither_hz * self.dt_s
            )));
        }
        if self.time_constant_s < 2.0 / self.f_dither_hz {
            return Err(LockError::InvalidParameter(
                "lock-in time constant must span several dither periods".into(),
            ));
        }
        if let LockMode::Dither { harmonic } = self.mode {
            if harmonic == 0 {
                return Err(LockError::InvalidParameter("harmonic must be >= 1".into()));
            }
            let rate = 1.0 / self.dt_s;
            let needed = 20.0 * harmonic as f64 * self.f_dither_hz;
            if rate < needed {
                return Err(LockError::Undersampled {
                    rate_hz: rate,
                    required_hz: needed,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t_s: f64,
    pub lambda_m: f64,
    pub demod: f64,
    pub transmission: f64,
    pub locked: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LockRun {
    pub trajectory: Vec<TrajectoryPoint>,
    /// Mean laser offset from the drifting resonance center over the last
    /// 20% of the run, in units of gamma_o (optical rad/s).
    pub mean_offset_gamma: f64,
    pub converged: bool,
    pub lock_lost_at: Option<f64>,
}

/// Ideal small-dither demod signal for gain calibration: probes the static
/// plant's transmission derivatives at the given center wavelength.
fn demod_model(plant: &PlantState, lambda: f64, amplitude: f64, harmonic: u32) -> f64 {
    // direct harmonic projection over one dither period
    let steps = 256;
    let mut acc = 0.0;
    for k in 0..steps {
        let phase = 2.0 * std::f64::consts::PI * k as f64 / steps as f64;
        let t = plant.transmission(lambda + amplitude * phase.sin());
        let reference = (harmonic as f64 * (phase - std::f64::consts::FRAC_PI_2)).cos();
        acc += 2.0 * t * reference / steps as f64;
    }
    acc
}

/// Servo polarity so that lambda += polarity * gain * error is stable at the
/// requested target.
fn polarity(mode: &LockMode, side: LockSide) -> f64 {
    match mode {
        LockMode::Dither { harmonic } => match (harmonic, side) {
            (1, _) => 1.0,
            // red side = longer wavelength: demod slope vs lambda is
            // positive there, negative on the blue side
            (_, LockSide::Red) => -1.0,
            (_, LockSide::Blue) => 1.0,
        },
        // side lock on the red flank: transmission decreases with lambda
        LockMode::SideLock { .. } => match side {
            LockSide::Red => 1.0,
            LockSide::Blue => -1.0,
        },
    }
}

/// Run the closed loop for `duration` seconds starting from
/// `lambda_start`. The plant's drift processes use its own seeded noise.
pub fn run_lock(
    mut plant: PlantState,
    config: &LockConfig,
    lambda_start: f64,
    duration: f64,
) -> Result<LockRun> {
    config.validate()?;
    let gamma = plant.resonance.gamma_o();
    let polarity = polarity(&config.mode, config.side);

    // gain calibration on the frozen plant at the expected lock point
    let lambda_peak = plant.lambda_center();
    let gamma_lambda = lambda_peak * lambda_peak * gamma / (2.0 * std::f64::consts::PI * C_LIGHT);
    let target_offset_lambda = match config.mode {
        LockMode::Dither { harmonic: 2 } => {
            let sign = match config.side {
                LockSide::Red => 1.0, // lower omega = longer lambda
                LockSide::Blue => -1.0,
            };
            sign * gamma_lambda / (2.0 * 3f64.sqrt())
        }
        _ => 0.0,
    };
    let (kp, ki, kd) = match config.mode {
        LockMode::Dither { harmonic } => {
            let lam_t = lambda_peak + target_offset_lambda;
            let h = 1e-4 * gamma_lambda;
            let slope = (demod_model(&plant, lam_t + h, config.dither_amplitude_m, harmonic)
                - demod_model(&plant, lam_t - h, config.dither_amplitude_m, harmonic))
                / (2.0 * h);
            if slope.abs() < 1e-300 {
                return Err(LockError::InvalidParameter(
                    "demod slope vanishes at the target; cannot calibrate gains".into(),
                ));
            }
            (
                config.kp_norm / slope.abs(),
                config.ki_norm / slope.abs() / config.time_constant_s,
                config.kd_norm / slope.abs() * config.time_constant_s,
            )
        }
        LockMode::SideLock { .. } => {
            // transmission slope at the starting flank position
            let h = 1e-4 * gamma_lambda;
            let slope = (plant.transmission(lambda_start + h)
                - plant.transmission(lambda_start - h))
                / (2.0 * h);
            (
                config.kp_norm / slope.abs(),
                config.ki_norm / slope.abs() / config.time_constant_s,
                0.0,
            )
        }
    };
    let gains = PidGains {
        kp,
        ki,
        kd,
        integral_limit: 10.0 * gamma_lambda * kp.signum(),
    };

    let mut lockin = match config.mode {
        LockMode::Dither { harmonic } => Some(
            LockIn::new(config.f_dither_hz, harmonic, config.time_constant_s)
                .expect("validated config"),
        ),
        LockMode::SideLock { .. } => None,
    };
    let mut pid = Pid::new();

    let steps = (duration / config.dt_s).ceil() as usize;
    let dither_steps = (1.0 / (config.f_dither_hz * config.dt_s)).round().max(1.0) as usize;
    let dither_periods_per_update = (config.time_constant_s * config.f_dither_hz)
        .round()
        .max(1.0) as usize;
    let pid_period = dither_steps * dither_periods_per_update;
    let settle_steps = 4 * pid_period;
    let record_every = (steps / 4000).max(1);

    let mut lambda_center = lambda_start;
    let mut window_sum = 0.0f64;
    let mut trajectory = Vec::with_capacity(steps / record_every + 2);
    let mut lock_lost_at = None;
    let mut offset_accum = 0.0;
    let mut offset_count = 0usize;
    let tail_start = (0.8 * steps as f64) as usize;

    for step in 0..steps {
        let t = step as f64 * config.dt_s;
        let dither =
            config.dither_amplitude_m * (2.0 * std::f64::consts::PI * config.f_dither_hz * t).sin();
        let lambda_laser = lambda_center + dither;
        let transmission = plant.transmission(lambda_laser);
        let demod = match (&mut lockin, &config.mode) {
            (Some(li), _) => li.process(transmission, t, config.dt_s),
            (None, LockMode::SideLock { setpoint }) => transmission - setpoint,
            _ => unreachable!(),
        };
        // integrate-and-dump decimation: averaging over the full PID window
        // (an integer number of dither periods) cancels the residual
        // dither-frequency ripple of the single-pole filter
        window_sum += demod;
        if step % pid_period == pid_period - 1 {
            let error = window_sum / pid_period as f64;
            window_sum = 0.0;
            // hold off until the lock-in transient has decayed
            if step >= settle_steps {
                let control = pid.step(error, &gains, config.time_constant_s);
                lambda_center += polarity * control;
            }
        }
        plant.advance(config.dt_s);

        let omega_laser = 2.0 * std::f64::consts::PI * C_LIGHT / lambda_center;
        let offset = omega_laser - plant.omega_center();
        let locked = offset.abs() < 2.0 * gamma;
        if lock_lost_at.is_none() && !locked && step > settle_steps + 2 * pid_period {
            lock_lost_at = Some(t);
        }
        if step >= tail_start {
            offset_accum += offset;
            offset_count += 1;
        }
        if step % record_every == 0 {
            trajectory.push(TrajectoryPoint {
                t_s: t,
                lambda_m: lambda_laser,
                demod,
                transmission,
                locked,
            });
        }
    }

    let mean_offset = offset_accum / offset_count.max(1) as f64;
    let target_omega_offset = match config.mode {
        LockMode::Dither { harmonic: 2 } => {
            let sign = match config.side {
                LockSide::Red => -1.0, // red = below center in omega
                LockSide::Blue => 1.0,
            };
            sign * gamma / (2.0 * 3f64.sqrt())
        }
        _ => 0.0,
    };
    let converged =
        lock_lost_at.is_none() && (mean_offset - target_omega_offset).abs() < 0.01 * gamma;
    Ok(LockRun {
        trajectory,
        mean_offset_gamma: mean_offset / gamma,
        converged,
        lock_lost_at,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use omc_spectra::OpticalResonance;

    pub(crate) fn resonance() -> OpticalResonance {
        let omega_o = 2.0 * std::f64::consts::PI * 194.5e12;
        OpticalResonance::from_quality_factors(omega_o, 4300.0, 8600.0).unwrap()
    }

    pub(crate) fn gamma_lambda(plant: &PlantState) -> f64 {
        let lam = plant.lambda_center();
        lam * lam * plant.resonance.gamma_o() / (2.0 * std::f64::consts::PI * C_LIGHT)
    }

    #[test]
    fn config_validation() {
        let mut config = LockConfig::second_harmonic_defaults();
        config.dither_amplitude_m = 1e-14;
        config.validate().unwrap();
        config.dt_s = 0.01; // f_dither * dt = 1
        assert!(config.validate().is_err());
    }

    #[test]
    fn first_harmonic_locks_to_peak() {
        let plant = PlantState::new(resonance(), 1.0, 3);
        let glam = gamma_lambda(&plant);
        let mut config = LockConfig::second_harmonic_defaults();
        config.mode = LockMode::Dither { harmonic: 1 };
        config.dither_amplitude_m = 0.03 * glam;
        let start = plant.lambda_center() + 0.3 * glam;
        let run = run_lock(plant, &config, start, 6.0).unwrap();
        assert!(run.lock_lost_at.is_none());
        assert!(
            run.mean_offset_gamma.abs() < 0.01,
            "offset {} gamma",
            run.mean_offset_gamma
        );
        assert!(run.converged);
    }

    #[test]
    fn second_harmonic_locks_to_inflection() {
        // starting 0.3 gamma off, the loop settles at gamma/(2 sqrt(3))
        let plant = PlantState::new(resonance(), 1.0, 3);
        let glam = gamma_lambda(&plant);
        let mut config = LockConfig::second_harmonic_defaults();
        config.side = LockSide::Red;
        config.dither_amplitude_m = 0.03 * glam;
        let start = plant.lambda_center() + 0.3 * glam;
        let run = run_lock(plant, &config, start, 8.0).unwrap();
        let target = -1.0 / (2.0 * 3f64.sqrt());
        assert!(
            (run.mean_offset_gamma - target).abs() < 0.01,
            "offset {} gamma vs target {target}",
            run.mean_offset_gamma
        );
        assert!(run.converged);
    }

    #[test]
    fn determinism() {
        let make = || {
            let mut plant = PlantState::new(resonance(), 1.0, 77);
            plant.center_drift.walk_sigma = 2.0 * std::f64::consts::PI * 2e6;
            plant.center_drift.walk_tau = 0.5;
            let glam = gamma_lambda(&plant);
            let mut config = LockConfig::second_harmonic_defaults();
            config.dither_amplitude_m = 0.03 * glam;
            let start = plant.lambda_center() + 0.25 * glam;
            run_lock(plant, &config, start, 2.0).unwrap()
        };
        let a = make();
        let b = make();
        assert_eq!(a.trajectory.len(), b.trajectory.len());
        for (pa, pb) in a.trajectory.iter().zip(&b.trajectory) {
            assert_eq!(pa.lambda_m, pb.lambda_m);
            assert_eq!(pa.demod, pb.demod);
        }
    }
}
