//! Core domain types for the measurement model. All internal frequencies are
//! angular (rad/s); file I/O converts from Hz at the boundary.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SpectraError};

pub const HBAR: f64 = 1.054_571_817e-34; // J s
pub const K_B: f64 = 1.380_649e-23; // J/K

/// Optical resonance with intrinsic and per-port waveguide loss rates.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct OpticalResonance {
    /// Center (rad/s).
    pub omega_o: f64,
    /// Intrinsic power loss rate (rad/s).
    pub gamma_o0: f64,
    /// Power loss rate to each waveguide port (rad/s).
    pub gamma_owg: f64,
}

impl OpticalResonance {
    /// Build from loaded and intrinsic quality factors.
    pub fn from_quality_factors(omega_o: f64, q_loaded: f64, q_intrinsic: f64) -> Result<Self> {
        if !(q_loaded > 0.0 && q_intrinsic > 0.0 && omega_o > 0.0) {
            return Err(SpectraError::InvalidParameter {
                name: "quality_factors",
                reason: "omega_o, Q_oL, Q_o0 must all be > 0".into(),
            });
        }
        if q_loaded >= q_intrinsic {
            return Err(SpectraError::InvalidParameter {
                name: "q_loaded",
                reason: format!("loaded Q {q_loaded} must be below intrinsic Q {q_intrinsic}"),
            });
        }
        let gamma_o = omega_o / q_loaded;
        let gamma_o0 = omega_o / q_intrinsic;
        Ok(OpticalResonance {
            omega_o,
            gamma_o0,
            gamma_owg: 0.5 * (gamma_o - gamma_o0),
        })
    }

    /// Total loaded loss rate gamma_o = gamma_o0 + 2 gamma_owg.
    pub fn gamma_o(&self) -> f64 {
        self.gamma_o0 + 2.0 * self.gamma_owg
    }

    pub fn q_loaded(&self) -> f64 {
        self.omega_o / self.gamma_o()
    }

    pub fn q_intrinsic(&self) -> f64 {
        self.omega_o / self.gamma_o0
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("omega_o", self.omega_o),
            ("gamma_o0", self.gamma_o0),
            ("gamma_owg", self.gamma_owg),
        ] {
            if !(v > 0.0) {
                return Err(SpectraError::InvalidParameter {
                    name,
                    reason: format!("must be > 0, got {v}"),
                });
            }
        }
        Ok(())
    }
}

/// Transmission |S21|^2 through the optical resonance.
pub fn s21_sq(omega: f64, res: &OpticalResonance) -> f64 {
    let detuning = omega - res.omega_o;
    let half = 0.5 * res.gamma_o();
    res.gamma_owg * res.gamma_owg / (detuning * detuning + half * half)
}

/// Mechanical mode at temperature T.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct MechanicalMode {
    /// Resonance (rad/s).
    pub omega_m: f64,
    /// Power loss rate (rad/s).
    pub gamma_m: f64,
    /// Bath temperature (K).
    pub temperature: f64,
}

impl MechanicalMode {
    pub fn from_quality_factor(omega_m: f64, q_m: f64, temperature: f64) -> Self {
        MechanicalMode {
            omega_m,
            gamma_m: omega_m / q_m,
            temperature,
        }
    }

    pub fn q_m(&self) -> f64 {
        self.omega_m / self.gamma_m
    }

    pub fn occupation(&self) -> f64 {
        thermal_occupation(self.temperature, self.omega_m)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("omega_m", self.omega_m),
            ("gamma_m", self.gamma_m),
            ("temperature", self.temperature),
        ] {
            if !(v > 0.0) {
                return Err(SpectraError::InvalidParameter {
                    name,
                    reason: format!("must be > 0, got {v}"),
                });
            }
        }
        Ok(())
    }
}

/// Classical-limit thermal phonon occupation k_B T / (hbar omega_m).
pub fn thermal_occupation(temperature: f64, omega_m: f64) -> f64 {
    K_B * temperature / (HBAR * omega_m)
}

/// Weak phase-modulation calibration tone.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct CalibrationTone {
    /// Modulation frequency (rad/s).
    pub omega_phi: f64,
    /// Modulation depth (rad).
    pub depth: f64,
}

impl CalibrationTone {
    /// Validates positivity; returns a warning string when the
    /// weak-modulation assumption depth << 1 is stretched.
    pub fn validate(&self) -> Result<Option<String>> {
        if !(self.omega_phi > 0.0) {
            return Err(SpectraError::InvalidParameter {
                name: "omega_phi",
                reason: format!("must be > 0, got {}", self.omega_phi),
            });
        }
        if !(self.depth > 0.0) {
            return Err(SpectraError::InvalidParameter {
                name: "depth",
                reason: format!("must be > 0, got {}", self.depth),
            });
        }
        Ok((self.depth >= 0.1).then(|| {
            format!(
                "phase modulation depth A = {} stretches the weak-modulation assumption (A << 1)",
                self.depth
            )
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn measured_resonance() -> OpticalResonance {
        let omega_o = 2.0 * std::f64::consts::PI * 194.5e12;
        OpticalResonance::from_quality_factors(omega_o, 4300.0, 8600.0).unwrap()
    }

    #[test]
    fn peak_transmission_identity() {
        // peak = (1 - Q_L/Q_0)^2; the measured device gives exactly 1/4
        let res = measured_resonance();
        let peak = s21_sq(res.omega_o, &res);
        assert!((peak - 0.25).abs() < 1e-12, "{peak}");
    }

    #[test]
    fn half_width_at_half_maximum() {
        let res = measured_resonance();
        let peak = s21_sq(res.omega_o, &res);
        let half = s21_sq(res.omega_o + 0.5 * res.gamma_o(), &res);
        assert!((half - 0.5 * peak).abs() < 1e-12 * peak);
    }

    #[test]
    fn decoupled_cavity_transmits_nothing() {
        let mut res = measured_resonance();
        res.gamma_owg = 0.0;
        for offset in [-1e10, 0.0, 3e9] {
            assert_eq!(s21_sq(res.omega_o + offset, &res), 0.0);
        }
    }

    #[test]
    fn occupation_at_room_temperature() {
        // 295.3 K at 4.488 GHz: 1371 +- 14
        let n = thermal_occupation(295.3, 2.0 * std::f64::consts::PI * 4.488e9);
        assert!(n > 1357.0 && n < 1385.0, "{n}");
    }

    #[test]
    fn occupation_scalings() {
        let omega = 2.0 * std::f64::consts::PI * 4.488e9;
        let n1 = thermal_occupation(295.3, omega);
        assert!((thermal_occupation(2.0 * 295.3, omega) - 2.0 * n1).abs() < 1e-9 * n1);
        let half = thermal_occupation(295.3, 2.0 * omega);
        assert!((half - 0.5 * n1).abs() < 1e-9 * n1);
    }

    #[test]
    fn strong_modulation_warns() {
        let tone = CalibrationTone {
            omega_phi: 1e9,
            depth: 0.5,
        };
        assert!(tone.validate().unwrap().is_some());
        let weak = CalibrationTone {
            omega_phi: 1e9,
            depth: 0.01,
        };
        assert!(weak.validate().unwrap().is_none());
    }
}
