//! Minimal-degree polynomial step functions.
//!
//! `SmoothStep_n` is the lowest-order polynomial on [0,1] running from 0 to 1
//! whose first n derivatives vanish at both endpoints. It is used to grade
//! hole parameters between the crystal mirror cells and the defect cell.

use crate::error::{GeometryError, Result};

/// Binomial coefficient as f64. Exact for the small orders used here.
fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Evaluate SmoothStep_n(x) = x^{n+1} * sum_{k=0}^{n} C(n+k,k) C(2n+1,n-k) (-x)^k.
///
/// Monotone non-decreasing on [0,1] with SmoothStep_n(0) = 0,
/// SmoothStep_n(1) = 1. The alternating sum cancels catastrophically for
/// large n near x = 1, so x > 1/2 evaluates through the central symmetry
/// SmoothStep_n(x) = 1 - SmoothStep_n(1 - x).
pub fn smoothstep(n: u32, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(GeometryError::Domain(format!(
            "smoothstep argument x = {x} outside [0, 1]"
        )));
    }
    if x > 0.5 {
        return Ok(1.0 - smoothstep(n, 1.0 - x)?);
    }
    let n = n as u64;
    let mut sum = 0.0;
    let mut neg_x_pow = 1.0; // (-x)^k
    for k in 0..=n {
        sum += binomial(n + k, k) * binomial(2 * n + 1, n - k) * neg_x_pow;
        neg_x_pow *= -x;
    }
    Ok(x.powi(n as i32 + 1) * sum)
}
