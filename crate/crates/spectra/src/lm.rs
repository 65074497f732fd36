//! Small dense Levenberg-Marquardt least-squares solver.
//!
//! Numeric forward-difference Jacobian with per-parameter scaling; normal
//! equations solved by Gaussian elimination with partial pivoting. Sized for
//! the 3-6 parameter fits in this crate.

use crate::error::{Result, SpectraError};

#[derive(Debug, Clone, Copy)]
pub struct LmOptions {
    pub max_iters: usize,
    /// Relative cost-decrease convergence threshold.
    pub ftol: f64,
    /// Relative step-size convergence threshold (scaled parameters).
    pub xtol: f64,
    pub lambda0: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions {
            max_iters: 200,
            ftol: 1e-14,
            xtol: 1e-12,
            lambda0: 1e-3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LmFit {
    pub params: Vec<f64>,
    /// Parameter covariance, sigma^2 (J^T J)^-1, row-major m x m.
    pub covariance: Vec<f64>,
    pub cost: f64,
    pub iterations: usize,
}

/// Solve A x = b in place for small systems; returns None when singular.
pub fn solve_dense(a: &mut [f64], b: &mut [f64], n: usize) -> Option<Vec<f64>> {
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if a[row * n + col].abs() > a[pivot * n + col].abs() {
                pivot = row;
            }
        }
        if a[pivot * n + col].abs() < 1e-300 {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        let inv = 1.0 / a[col * n + col];
        for row in col + 1..n {
            let f = a[row * n + col] * inv;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= f * a[col * n + k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row * n + k] * x[k];
        }
        x[row] = acc / a[row * n + row];
    }
    Some(x)
}

fn invert_dense(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut inv = vec![0.0; n * n];
    for col in 0..n {
        let mut m = a.to_vec();
        let mut e = vec![0.0; n];
        e[col] = 1.0;
        let x = solve_dense(&mut m, &mut e, n)?;
        for row in 0..n {
            inv[row * n + col] = x[row];
        }
    }
    Some(inv)
}

/// Fit `model(params, x)` to (x, y) by damped least squares.
///
/// `scales` sets the characteristic magnitude of each parameter; the solver
/// works in units of `params / scales` so wildly different magnitudes (watts
/// against rad/s) stay well conditioned.
pub fn lm_fit<F>(
    model: F,
    x: &[f64],
    y: &[f64],
    p0: &[f64],
    scales: &[f64],
    opts: &LmOptions,
) -> Result<LmFit>
where
    F: Fn(&[f64], f64) -> f64,
{
    lm_fit_weighted(model, x, y, None, p0, scales, opts)
}

/// `lm_fit` with optional per-sample standard deviations. Residuals are
/// divided by sigma_i, and the covariance carries the chi-square rescaling,
/// so sigmas known only up to a common constant still give honest parameter
/// errors.
pub fn lm_fit_weighted<F>(
    model: F,
    x: &[f64],
    y: &[f64],
    sigma: Option<&[f64]>,
    p0: &[f64],
    scales: &[f64],
    opts: &LmOptions,
) -> Result<LmFit>
where
    F: Fn(&[f64], f64) -> f64,
{
    assert_eq!(x.len(), y.len());
    if let Some(s) = sigma {
        assert_eq!(s.len(), x.len());
    }
    let m = p0.len();
    assert_eq!(scales.len(), m);
    let n = x.len();
    if n < m {
        return Err(SpectraError::UnderDetermined(format!(
            "{n} samples for {m} parameters"
        )));
    }

    let residuals = |p: &[f64], out: &mut Vec<f64>| {
        out.clear();
        match sigma {
            Some(s) => out.extend(
                x.iter()
                    .zip(y)
                    .zip(s)
                    .map(|((&xi, &yi), &si)| (yi - model(p, xi)) / si),
            ),
            None => out.extend(x.iter().zip(y).map(|(&xi, &yi)| yi - model(p, xi))),
        }
    };
    let cost_of = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>();

    let mut params = p0.to_vec();
    let mut r = Vec::with_capacity(n);
    residuals(&params, &mut r);
    let mut cost = cost_of(&r);
    let mut lambda = opts.lambda0;
    let mut jac = vec![0.0; n * m]; // d r_i / d q_j, scaled params
    let mut iterations = 0;

    for iter in 0..opts.max_iters {
        iterations = iter + 1;
        // forward-difference Jacobian in scaled units
        let mut r_pert = Vec::with_capacity(n);
        for j in 0..m {
            let h = 1e-7 * scales[j].abs().max(1e-300);
            let mut pj = params.clone();
            pj[j] += h;
            residuals(&pj, &mut r_pert);
            let inv_h = scales[j] / h;
            for i in 0..n {
                jac[i * m + j] = (r_pert[i] - r[i]) * inv_h;
            }
        }
        // normal equations J^T J delta = -J^T r
        let mut jtj = vec![0.0; m * m];
        let mut jtr = vec![0.0; m];
        for i in 0..n {
            for j in 0..m {
                let jij = jac[i * m + j];
                jtr[j] -= jij * r[i];
                for k in j..m {
                    jtj[j * m + k] += jij * jac[i * m + k];
                }
            }
        }
        for j in 0..m {
            for k in 0..j {
                jtj[j * m + k] = jtj[k * m + j];
            }
        }

        let mut improved = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for j in 0..m {
                a[j * m + j] += lambda * jtj[j * m + j].max(1e-300);
            }
            let mut rhs = jtr.clone();
            let Some(dq) = solve_dense(&mut a, &mut rhs, m) else {
                lambda *= 10.0;
                continue;
            };
            let mut trial = params.clone();
            for j in 0..m {
                trial[j] += dq[j] * scales[j];
            }
            let mut r_trial = Vec::with_capacity(n);
            residuals(&trial, &mut r_trial);
            let trial_cost = cost_of(&r_trial);
            if trial_cost <= cost {
                let step = dq.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
                let rel_drop = (cost - trial_cost) / cost.max(1e-300);
                params = trial;
                r = r_trial;
                cost = trial_cost;
                lambda = (lambda * 0.3).max(1e-12);
                improved = true;
                if rel_drop < opts.ftol || step < opts.xtol {
                    return finish(params, jac, &r, n, m, cost, iterations, scales);
                }
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            // damping saturated: local minimum within numerical resolution
            return finish(params, jac, &r, n, m, cost, iterations, scales);
        }
    }
    finish(params, jac, &r, n, m, cost, iterations, scales)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    params: Vec<f64>,
    jac: Vec<f64>,
    r: &[f64],
    n: usize,
    m: usize,
    cost: f64,
    iterations: usize,
    scales: &[f64],
) -> Result<LmFit> {
    let mut jtj = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..m {
            for k in j..m {
                jtj[j * m + k] += jac[i * m + j] * jac[i * m + k];
            }
        }
    }
    for j in 0..m {
        for k in 0..j {
            jtj[j * m + k] = jtj[k * m + j];
        }
    }
    let dof = (n.saturating_sub(m)).max(1) as f64;
    let sigma2 = cost / dof;
    let covariance = match invert_dense(&jtj, m) {
        Some(inv) => {
            let mut cov = vec![0.0; m * m];
            for j in 0..m {
                for k in 0..m {
                    // undo the parameter scaling
                    cov[j * m + k] = inv[j * m + k] * sigma2 * scales[j] * scales[k];
                }
            }
            cov
        }
        None => {
            let _ = r;
            vec![f64::NAN; m * m]
        }
    };
    Ok(LmFit {
        params,
        covariance,
        cost,
        iterations,
    })
}
