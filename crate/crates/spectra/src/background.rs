//! Low-order polynomial background removal.

use crate::error::{Result, SpectraError};
use crate::lm::solve_dense;
use crate::model::BackgroundPoly;
use crate::trace::SpectrumTrace;

pub const MAX_BACKGROUND_ORDER: usize = 5;

/// Fit a polynomial of the given order to samples outside the masked
/// frequency ranges (Hz), subtract it everywhere, and report the fit.
pub fn remove_background(
    trace: &SpectrumTrace,
    order: usize,
    masks_hz: &[(f64, f64)],
) -> Result<(SpectrumTrace, BackgroundPoly)> {
    trace.validate()?;
    if order > MAX_BACKGROUND_ORDER {
        return Err(SpectraError::InvalidParameter {
            name: "order",
            reason: format!("order {order} exceeds the maximum {MAX_BACKGROUND_ORDER}"),
        });
    }
    if trace.frequency_hz.len() <= 10 * (order + 1) {
        return Err(SpectraError::UnderDetermined(format!(
            "{} samples for order-{order} background (need > {})",
            trace.frequency_hz.len(),
            10 * (order + 1)
        )));
    }
    let masked = |f: f64| masks_hz.iter().any(|&(lo, hi)| f >= lo && f <= hi);
    let f0 = trace.frequency_hz[0];
    let f1 = *trace.frequency_hz.last().unwrap();
    let center = 0.5 * (f0 + f1);
    let half_span = 0.5 * (f1 - f0);

    // normal equations for the monomial basis in x = (f - center)/half_span
    let m = order + 1;
    let mut ata = vec![0.0; m * m];
    let mut atb = vec![0.0; m];
    let mut used = 0usize;
    for (&f, &p) in trace.frequency_hz.iter().zip(&trace.power_w) {
        if masked(f) {
            continue;
        }
        used += 1;
        let x = (f - center) / half_span;
        let mut pow = vec![0.0; m];
        let mut acc = 1.0;
        for basis in pow.iter_mut() {
            *basis = acc;
            acc *= x;
        }
        for j in 0..m {
            atb[j] += pow[j] * p;
            for k in j..m {
                ata[j * m + k] += pow[j] * pow[k];
            }
        }
    }
    if used <= 2 * (order + 1) {
        return Err(SpectraError::UnderDetermined(format!(
            "only {used} unmasked samples for order-{order} background"
        )));
    }
    for j in 0..m {
        for k in 0..j {
            ata[j * m + k] = ata[k * m + j];
        }
    }
    let coeffs = solve_dense(&mut ata, &mut atb, m)
        .ok_or_else(|| SpectraError::UnderDetermined("singular background fit".into()))?;

    let background = BackgroundPoly {
        omega_ref: 2.0 * std::f64::consts::PI * center,
        scale: 2.0 * std::f64::consts::PI * half_span,
        coeffs,
    };
    let mut cleaned = trace.clone();
    for (f, p) in cleaned.frequency_hz.iter().zip(cleaned.power_w.iter_mut()) {
        *p -= background.eval(2.0 * std::f64::consts::PI * f);
    }
    Ok((cleaned, background))
}
