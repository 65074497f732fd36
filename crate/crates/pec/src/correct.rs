//! Inverse dose correction by damped fixed-point iteration.

use crate::convolve::{ConvolveOptions, DoseConvolver};
use crate::dosemap::DoseMap;
use crate::error::Result;
use crate::psf::PsfModel;

#[derive(Debug, Clone, Copy)]
pub struct CorrectionOptions {
    pub max_iters: usize,
    /// Max-residual stop criterion over exposed pixels.
    pub tol: f64,
    /// Fixed-point damping; 1.0 works for normalized positive kernels.
    pub damping: f64,
    pub allow_truncation: bool,
}

impl Default for CorrectionOptions {
    fn default() -> Self {
        CorrectionOptions {
            max_iters: 200,
            tol: 1e-3,
            damping: 1.0,
            allow_truncation: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CorrectionResult {
    pub dose: DoseMap,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

/// Pixels counted as exposed for the residual norm. Antialiased boundary
/// pixels below half coverage cannot in general reach their fractional
/// target under the d >= 0 constraint (neighbor spillover alone exceeds
/// it), so the stop criterion tracks majority-covered pixels.
pub const EXPOSED_THRESHOLD: f64 = 0.5;

/// Solve for the written dose d >= 0 with PSF*d ~ target on exposed pixels,
/// via d <- max(0, d + damping (target - PSF*d)).
///
/// Non-convergence is not an error: the best iterate comes back with
/// `converged = false` and its residual.
pub fn correct_dose(
    target: &DoseMap,
    model: &PsfModel,
    opts: &CorrectionOptions,
) -> Result<CorrectionResult> {
    target.validate()?;
    let convolver = DoseConvolver::new(model, target)?;
    let conv_opts = ConvolveOptions {
        allow_truncation: opts.allow_truncation,
    };
    let exposed: Vec<usize> = target
        .values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| (*v >= EXPOSED_THRESHOLD).then_some(i))
        .collect();

    let mut dose = target.clone();
    let mut best = dose.clone();
    let mut best_residual = f64::INFINITY;
    let mut iterations = 0;
    for iter in 0..=opts.max_iters {
        let (forward, _) = convolver.convolve(&dose, &conv_opts)?;
        let residual = exposed
            .iter()
            .map(|&i| (target.values[i] - forward.values[i]).abs())
            .fold(0.0f64, f64::max);
        if residual < best_residual {
            best_residual = residual;
            best = dose.clone();
        }
        iterations = iter;
        if residual <= opts.tol {
            return Ok(CorrectionResult {
                dose,
                iterations,
                residual,
                converged: true,
            });
        }
        if iter == opts.max_iters {
            break;
        }
        for i in 0..dose.values.len() {
            let updated = dose.values[i] + opts.damping * (target.values[i] - forward.values[i]);
            dose.values[i] = updated.max(0.0);
        }
    }
    Ok(CorrectionResult {
        dose: best,
        iterations,
        residual: best_residual,
        converged: false,
    })
}
