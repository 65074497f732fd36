//! Forward measurement model: displacement PSD and spectrum-analyzer power.

use serde::{Deserialize, Serialize};

use crate::types::{CalibrationTone, MechanicalMode};

/// Spectrum-analyzer window shape. Normalized to 1 at center with
/// FWHM = RBW, so a tone reads its peak power directly.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq, Default)]
pub enum Window {
    #[default]
    Gaussian,
    FlatTop,
}

impl Window {
    /// Evaluate w(omega; RBW, omega_c).
    pub fn eval(&self, omega: f64, rbw: f64, center: f64) -> f64 {
        let x = (omega - center) / rbw;
        match self {
            // FWHM = RBW: exp(-4 ln2 x^2)
            Window::Gaussian => (-4.0 * std::f64::consts::LN_2 * x * x).exp(),
            Window::FlatTop => {
                if x.abs() <= 0.5 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Thermal displacement PSD: the Lorentzian term is returned as a density;
/// the calibration tone is carried symbolically as a delta weight.
#[derive(Debug, Clone, Copy)]
pub struct PsdModel {
    pub mech: MechanicalMode,
    /// Optomechanical coupling (rad/s).
    pub g_om: f64,
    pub tone: Option<CalibrationTone>,
    /// Opaque detection-chain transfer factor.
    pub transfer: f64,
}

impl PsdModel {
    /// Lorentzian part of S_XX at omega:
    /// transfer * g^2 n gamma_m / ((omega-omega_m)^2 + (gamma_m/2)^2).
    pub fn lorentzian(&self, omega: f64) -> f64 {
        let n = self.mech.occupation();
        let d = omega - self.mech.omega_m;
        let half = 0.5 * self.mech.gamma_m;
        self.transfer * self.g_om * self.g_om * n * self.mech.gamma_m / (d * d + half * half)
    }

    /// Delta-tone weight: transfer * A^2 omega_phi^2 / 4 * 2 pi, at omega_phi.
    pub fn tone_weight(&self) -> Option<(f64, f64)> {
        self.tone.map(|t| {
            let w = self.transfer * t.depth * t.depth * t.omega_phi * t.omega_phi / 4.0
                * 2.0
                * std::f64::consts::PI;
            (w, t.omega_phi)
        })
    }
}

/// Background polynomial in (omega - omega_ref), coefficients low-to-high.
#[derive(Debug, Clone, Default)]
pub struct BackgroundPoly {
    pub omega_ref: f64,
    pub scale: f64,
    pub coeffs: Vec<f64>,
}

impl BackgroundPoly {
    pub fn eval(&self, omega: f64) -> f64 {
        let x = if self.scale != 0.0 {
            (omega - self.omega_ref) / self.scale
        } else {
            0.0
        };
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

/// Measured spectrum-analyzer power at omega_sa:
/// transfer * (RBW * 2 g^2 n gamma_m Lor + A^2 omega_phi^2 / 2 * w + bg).
pub fn sa_power(
    omega_sa: f64,
    model: &PsdModel,
    rbw: f64,
    window: Window,
    background: Option<&BackgroundPoly>,
) -> f64 {
    let n = model.mech.occupation();
    let d = omega_sa - model.mech.omega_m;
    let half = 0.5 * model.mech.gamma_m;
    let lorentzian =
        rbw * 2.0 * model.g_om * model.g_om * n * model.mech.gamma_m / (d * d + half * half);
    let tone = model
        .tone
        .map(|t| {
            0.5 * t.depth
                * t.depth
                * t.omega_phi
                * t.omega_phi
                * window.eval(omega_sa, rbw, t.omega_phi)
        })
        .unwrap_or(0.0);
    let bg = background.map(|b| b.eval(omega_sa)).unwrap_or(0.0);
    model.transfer * (lorentzian + tone + bg)
}

/// Warn when the sampling hierarchy step << RBW << gamma_m is not respected.
pub fn check_rbw_ordering(step: f64, rbw: f64, gamma_m: f64) -> Option<String> {
    let mut problems = Vec::new();
    if step * 2.0 > rbw {
        problems.push(format!("step {step:.3e} not well below RBW {rbw:.3e}"));
    }
    if rbw * 2.0 > gamma_m {
        problems.push(format!(
            "RBW {rbw:.3e} not well below gamma_m {gamma_m:.3e}"
        ));
    }
    (!problems.is_empty()).then(|| problems.join("; "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn device_model(tone: bool) -> PsdModel {
        PsdModel {
            mech: MechanicalMode::from_quality_factor(2.0 * PI * 4.488e9, 600.0, 295.3),
            g_om: 2.0 * PI * 649e3,
            tone: tone.then_some(CalibrationTone {
                omega_phi: 2.0 * PI * 4.46e9,
                depth: 0.01,
            }),
            transfer: 3.7e-22,
        }
    }

    #[test]
    fn zero_coupling_no_tone_is_dark() {
        let mut m = device_model(false);
        m.g_om = 0.0;
        assert_eq!(m.lorentzian(m.mech.omega_m), 0.0);
        assert_eq!(
            sa_power(m.mech.omega_m, &m, 2e6, Window::Gaussian, None),
            0.0
        );
    }

    #[test]
    fn lorentzian_peak_value() {
        // peak density = transfer g^2 n * 4 / gamma_m
        let m = device_model(false);
        let n = m.mech.occupation();
        let expected = m.transfer * m.g_om * m.g_om * n * 4.0 / m.mech.gamma_m;
        let got = m.lorentzian(m.mech.omega_m);
        assert!((got - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn delta_tone_carried_symbolically() {
        let m = device_model(true);
        let tone = m.tone.unwrap();
        let (weight, location) = m.tone_weight().unwrap();
        let expected =
            m.transfer * tone.depth * tone.depth * tone.omega_phi * tone.omega_phi / 4.0
                * 2.0
                * PI;
        assert!((weight - expected).abs() < 1e-12 * expected);
        assert_eq!(location, tone.omega_phi);
        assert!(device_model(false).tone_weight().is_none());
    }

    #[test]
    fn integrated_lorentzian_matches_analytic_area() {
        // quadrature oracle: integral over all omega = transfer g^2 n 2 pi
        let m = device_model(false);
        let n = m.mech.occupation();
        let expected = m.transfer * m.g_om * m.g_om * n * 2.0 * PI;
        let span = 2000.0 * m.mech.gamma_m;
        let steps = 4_000_000usize;
        let dw = 2.0 * span / steps as f64;
        let mut acc = 0.0;
        for i in 0..=steps {
            let w = m.mech.omega_m - span + i as f64 * dw;
            let weight = if i == 0 || i == steps { 0.5 } else { 1.0 };
            acc += weight * m.lorentzian(w) * dw;
        }
        let rel = (acc - expected).abs() / expected;
        // trapezoid over +-2000 linewidths: tail misses ~1/(pi*2000)
        assert!(rel < 5e-4, "integral {acc} vs {expected} ({rel:.2e})");
    }

    #[test]
    fn tone_peak_reads_its_power() {
        let m = device_model(true);
        let tone = m.tone.unwrap();
        let mut dark = m;
        dark.g_om = 0.0;
        let rbw = 2.0 * PI * 300e3;
        let got = sa_power(tone.omega_phi, &dark, rbw, Window::Gaussian, None);
        let expected = m.transfer * tone.depth * tone.depth * tone.omega_phi * tone.omega_phi / 2.0;
        assert!((got - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn mechanical_peak_power() {
        let m = device_model(false);
        let rbw = 2.0 * PI * 300e3;
        let n = m.mech.occupation();
        let expected = m.transfer * rbw * 8.0 * m.g_om * m.g_om * n / m.mech.gamma_m;
        let got = sa_power(m.mech.omega_m, &m, rbw, Window::Gaussian, None);
        assert!((got - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn sa_curve_integral_matches_psd_area() {
        // integrating P/(transfer RBW 2) over the peak reproduces the
        // Lorentzian area of the PSD within 1%
        let m = device_model(false);
        let rbw = 2.0 * PI * 100e3;
        let span = 300.0 * m.mech.gamma_m;
        let steps = 800_000usize;
        let dw = 2.0 * span / steps as f64;
        let mut acc = 0.0;
        for i in 0..=steps {
            let w = m.mech.omega_m - span + i as f64 * dw;
            acc += sa_power(w, &m, rbw, Window::Gaussian, None) * dw;
        }
        let area_from_sa = acc / (m.transfer * rbw * 2.0);
        let n = m.mech.occupation();
        let expected = m.g_om * m.g_om * n * 2.0 * PI;
        let rel = (area_from_sa - expected).abs() / expected;
        assert!(rel < 0.01, "{area_from_sa} vs {expected} ({rel:.2e})");
    }

    #[test]
    fn rbw_ordering_warnings() {
        assert!(check_rbw_ordering(1e5, 2e6, 5e7).is_none());
        assert!(check_rbw_ordering(2e6, 2e6, 5e7).is_some());
        assert!(check_rbw_ordering(1e5, 4e7, 5e7).is_some());
    }
}
