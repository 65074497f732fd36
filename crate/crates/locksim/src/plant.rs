//! The drifting transmission plant: a Lorentzian optical resonance whose
//! center and global efficiency wander slowly in time.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use omc_spectra::{s21_sq, OpticalResonance};

pub const C_LIGHT: f64 = 299_792_458.0; // m/s

/// Linear drift plus an optional bounded (Ornstein-Uhlenbeck) random walk.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, Default)]
pub struct DriftProcess {
    /// Deterministic rate (units of the driven quantity per second).
    pub linear_rate: f64,
    /// OU noise strength (units per sqrt(s)).
    pub walk_sigma: f64,
    /// OU relaxation time (s); the walk stays bounded at
    /// walk_sigma * sqrt(tau/2).
    pub walk_tau: f64,
}

#[derive(Debug, Clone)]
pub struct PlantState {
    pub resonance: OpticalResonance,
    /// Center-frequency drift (rad/s of optical frequency, per second).
    pub center_drift: DriftProcess,
    /// Multiplicative efficiency and its drift.
    pub efficiency: f64,
    pub efficiency_drift: DriftProcess,
    rng: ChaCha8Rng,
    center_walk: f64,
    efficiency_walk: f64,
    time: f64,
}

impl PlantState {
    pub fn new(resonance: OpticalResonance, efficiency: f64, seed: u64) -> Self {
        PlantState {
            resonance,
            center_drift: DriftProcess::default(),
            efficiency,
            efficiency_drift: DriftProcess::default(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            center_walk: 0.0,
            efficiency_walk: 0.0,
            time: 0.0,
        }
    }

    /// Current resonance center (rad/s).
    pub fn omega_center(&self) -> f64 {
        self.resonance.omega_o + self.center_drift.linear_rate * self.time + self.center_walk
    }

    pub fn efficiency_now(&self) -> f64 {
        (self.efficiency + self.efficiency_drift.linear_rate * self.time + self.efficiency_walk)
            .max(0.0)
    }

    /// Advance the drift processes to t + dt.
    pub fn advance(&mut self, dt: f64) {
        self.time += dt;
        for (drift, walk) in [
            (self.center_drift, &mut self.center_walk),
            (self.efficiency_drift, &mut self.efficiency_walk),
        ] {
            if drift.walk_sigma > 0.0 && drift.walk_tau > 0.0 {
                let decay = (-dt / drift.walk_tau).exp();
                let noise: f64 = gauss(&mut self.rng);
                let stationary = drift.walk_sigma * (drift.walk_tau / 2.0).sqrt();
                *walk = *walk * decay + stationary * (1.0 - decay * decay).sqrt() * noise;
            }
        }
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Transmission at the given laser wavelength (m).
    pub fn transmission(&self, lambda_laser: f64) -> f64 {
        let omega = 2.0 * std::f64::consts::PI * C_LIGHT / lambda_laser;
        let shifted = OpticalResonance {
            omega_o: self.omega_center(),
            ..self.resonance
        };
        self.efficiency_now() * s21_sq(omega, &shifted)
    }

    /// Wavelength (m) of the current resonance center.
    pub fn lambda_center(&self) -> f64 {
        2.0 * std::f64::consts::PI * C_LIGHT / self.omega_center()
    }
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let u: f64 = rng.gen::<f64>();
        if u > f64::MIN_POSITIVE {
            let v: f64 = rng.gen::<f64>();
            return (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos();
        }
    }
}
