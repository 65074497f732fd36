//! Lock-in demodulation at a harmonic of the dither.
//!
//! For a dither epsilon sin(w_d t), the n-th harmonic in-phase reference is
//! cos(n (w_d t - pi/2)), which lines up with the harmonic content of
//! T(lambda_0 + epsilon sin): the settled output approaches
//! epsilon^n / (2^(n-1) n!) * d^n T / d lambda^n.

use crate::error::{LockError, Result};

#[derive(Debug, Clone)]
pub struct LockIn {
    pub f_dither: f64,
    pub harmonic: u32,
    pub time_constant: f64,
    state: f64,
}

impl LockIn {
    pub fn new(f_dither: f64, harmonic: u32, time_constant: f64) -> Result<Self> {
        if !(f_dither > 0.0) || harmonic == 0 || !(time_constant > 0.0) {
            return Err(LockError::InvalidParameter(format!(
                "f_dither {f_dither}, harmonic {harmonic}, time constant {time_constant}"
            )));
        }
        Ok(LockIn {
            f_dither,
            harmonic,
            time_constant,
            state: 0.0,
        })
    }

    /// Reference value at time t: in phase with the dither's n-th harmonic.
    pub fn reference(&self, t: f64) -> f64 {
        let n = self.harmonic as f64;
        (n * (2.0 * std::f64::consts::PI * self.f_dither * t - std::f64::consts::FRAC_PI_2)).cos()
    }

    /// Feed one sample; returns the current demodulated estimate
    /// (low-passed product, scaled by 2 so a pure reference-matched harmonic
    /// of amplitude A reads A).
    pub fn process(&mut self, signal: f64, t: f64, dt: f64) -> f64 {
        let mixed = 2.0 * signal * self.reference(t);
        let alpha = (dt / self.time_constant).min(1.0);
        self.state += alpha * (mixed - self.state);
        self.state
    }

    pub fn output(&self) -> f64 {
        self.state
    }

    pub fn reset(&mut self) {
        self.state = 0.0;
    }
}

/// Demodulate a pre-sampled stream; errors when undersampled.
pub fn lockin_demod(
    signal: &[f64],
    dt: f64,
    f_dither: f64,
    harmonic: u32,
    time_constant: f64,
) -> Result<Vec<f64>> {
    let rate = 1.0 / dt;
    let needed = 20.0 * harmonic as f64 * f_dither;
    if rate < needed {
        return Err(LockError::Undersampled {
            rate_hz: rate,
            required_hz: needed,
        });
    }
    let mut lockin = LockIn::new(f_dither, harmonic, time_constant)?;
    Ok(signal
        .iter()
        .enumerate()
        .map(|(i, &s)| lockin.process(s, i as f64 * dt, dt))
        .collect())
}
