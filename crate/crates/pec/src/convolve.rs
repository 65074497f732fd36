//! Forward dose convolution with the PSF.
//!
//! Each mixture term is discretized on its own grid: short-range terms at
//! full resolution, terms whose kernel would exceed ~256 px on an 8x
//! coarsened grid with bilinear upsampling afterwards. Every discrete term
//! kernel is rescaled to carry exactly its mixture weight, so total dose is
//! conserved regardless of pixel size or the short-range cutoff.

use rustfft::num_complex::Complex64;

use crate::dosemap::DoseMap;
use crate::error::{PecError, Result};
use crate::fft2::{fft2d, next_pow2};
use crate::psf::{gp_eval, GpTerm, PsfModel};

/// Kernels wider than this many pixels move to the coarse grid.
const COARSE_KERNEL_LIMIT_PX: f64 = 256.0;
const COARSE_FACTOR: usize = 8;
/// Term kernel radius in units of sigma.
const KERNEL_RADIUS_SIGMAS: f64 = 4.0;

#[derive(Debug, Clone, Copy, Default)]
pub struct ConvolveOptions {
    /// Accept maps whose exposed pixels sit closer to the boundary than the
    /// PSF range; leaked dose is then reported instead of erroring.
    pub allow_truncation: bool,
}

#[derive(Debug, Clone, Default)]
pub struct ConvolveDiagnostics {
    pub mass_in: f64,
    pub mass_out: f64,
    pub margin_required_nm: f64,
    pub margin_actual_nm: Option<f64>,
    pub truncated: bool,
    pub warnings: Vec<String>,
}

struct TermPlan {
    factor: usize,
    /// padded FFT grid
    fnx: usize,
    fny: usize,
    /// coarse map size
    cnx: usize,
    cny: usize,
    /// kernel half-width in coarse pixels
    kw: usize,
    kernel_fft: Vec<Complex64>,
}

/// Reusable convolution plan for one PSF model and one grid shape.
pub struct DoseConvolver {
    nx: usize,
    ny: usize,
    margin_required_nm: f64,
    min_sigma_nm: f64,
    plans: Vec<TermPlan>,
}

impl DoseConvolver {
    pub fn new(model: &PsfModel, template: &DoseMap) -> Result<Self> {
        model.validate()?;
        template.validate()?;
        let pixel = template.pixel;
        let mut plans = Vec::with_capacity(model.terms.len());
        for term in &model.terms {
            plans.push(plan_term(term, model.cutoff_nm, template, pixel)?);
        }
        let margin_required_nm = model
            .terms
            .iter()
            .map(|t| 3.0 * t.sigma_nm.max(10.0 * t.gamma_nm))
            .fold(0.0, f64::max);
        Ok(DoseConvolver {
            nx: template.nx,
            ny: template.ny,

            margin_required_nm,
            min_sigma_nm: model.min_sigma(),
            plans,
        })
    }

    pub fn convolve(
        &self,
        map: &DoseMap,
        opts: &ConvolveOptions,
    ) -> Result<(DoseMap, ConvolveDiagnostics)> {
        if map.nx != self.nx || map.ny != self.ny {
            return Err(PecError::InvalidParameter {
                name: "map",
                reason: format!(
                    "grid {}x{} does not match the planned {}x{}",
                    map.nx, map.ny, self.nx, self.ny
                ),
            });
        }
        let mut diag = ConvolveDiagnostics {
            mass_in: map.mass(),
            margin_required_nm: self.margin_required_nm,
            margin_actual_nm: map.margin_to_boundary(0.0),
            ..Default::default()
        };
        if map.pixel > self.min_sigma_nm {
            diag.warnings.push(format!(
                "pixel {} nm exceeds the smallest PSF sigma {} nm; short-range terms collapse to local dose",
                map.pixel, self.min_sigma_nm
            ));
        }
        if let Some(actual) = diag.margin_actual_nm {
            if actual < self.margin_required_nm {
                if !opts.allow_truncation {
                    return Err(PecError::InsufficientPadding {
                        required_nm: self.margin_required_nm,
                        actual_nm: actual,
                    });
                }
                diag.truncated = true;
                diag.warnings.push(format!(
                    "exposed pixels within {actual:.0} nm of the boundary (PSF range {:.0} nm); dose leaks off-map",
                    self.margin_required_nm
                ));
            }
        }

        let mut out = DoseMap::zeros(map.origin, map.pixel, map.nx, map.ny)?;
        for plan in &self.plans {
            accumulate_term(plan, map, &mut out);
        }
        // convolution of non-negative data with a non-negative kernel;
        // clip FFT rounding noise
        for v in out.values.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        diag.mass_out = out.mass();
        Ok((out, diag))
    }
}

/// One-shot convenience wrapper.
pub fn convolve_dose(
    map: &DoseMap,
    model: &PsfModel,
    opts: &ConvolveOptions,
) -> Result<(DoseMap, ConvolveDiagnostics)> {
    DoseConvolver::new(model, map)?.convolve(map, opts)
}

fn plan_term(term: &GpTerm, cutoff_nm: f64, template: &DoseMap, pixel: f64) -> Result<TermPlan> {
    let reach_nm = (KERNEL_RADIUS_SIGMAS * term.sigma_nm).max(cutoff_nm);
    let factor = if reach_nm / pixel > COARSE_KERNEL_LIMIT_PX {
        COARSE_FACTOR
    } else {
        1
    };
    let cpixel = pixel * factor as f64;
    let cnx = template.nx.div_ceil(factor);
    let cny = template.ny.div_ceil(factor);
    let kw = (reach_nm / cpixel).ceil().max(1.0) as usize;
    let fnx = next_pow2(cnx + 2 * kw);
    let fny = next_pow2(cny + 2 * kw);

    // sample the clamped term on the kernel stencil, then rescale the taps
    // to carry exactly the term's mixture weight
    let side = 2 * kw + 1;
    let mut taps = vec![0.0f64; side * side];
    let mut sum = 0.0;
    for dy in 0..side {
        for dx in 0..side {
            let rx = (dx as f64 - kw as f64) * cpixel;
            let ry = (dy as f64 - kw as f64) * cpixel;
            let r = rx.hypot(ry).max(cutoff_nm);
            let v = gp_eval(term, r)?;
            taps[dy * side + dx] = v;
            sum += v;
        }
    }
    if sum <= 0.0 {
        return Err(PecError::InvalidParameter {
            name: "psf",
            reason: format!(
                "term (sigma {} nm) vanishes on the sampling grid",
                term.sigma_nm
            ),
        });
    }
    let scale = term.weight / sum;
    let mut kernel_fft = vec![Complex64::default(); fnx * fny];
    for dy in 0..side {
        for dx in 0..side {
            kernel_fft[dy * fnx + dx] = Complex64::new(taps[dy * side + dx] * scale, 0.0);
        }
    }
    fft2d(&mut kernel_fft, fnx, fny, false);
    Ok(TermPlan {
        factor,
        fnx,
        fny,
        cnx,
        cny,
        kw,
        kernel_fft,
    })
}

fn accumulate_term(plan: &TermPlan, map: &DoseMap, out: &mut DoseMap) {
    // downsample (block average) onto the term grid
    let f = plan.factor;
    let mut coarse = vec![0.0f64; plan.cnx * plan.cny];
    if f == 1 {
        coarse.copy_from_slice(&map.values);
    } else {
        for iy in 0..map.ny {
            for ix in 0..map.nx {
                coarse[(iy / f) * plan.cnx + ix / f] += map.at(ix, iy);
            }
        }
        for v in coarse.iter_mut() {
            *v /= (f * f) as f64;
        }
    }

    // padded forward FFT, multiply, inverse
    let mut buf = vec![Complex64::default(); plan.fnx * plan.fny];
    for y in 0..plan.cny {
        for x in 0..plan.cnx {
            buf[y * plan.fnx + x] = Complex64::new(coarse[y * plan.cnx + x], 0.0);
        }
    }
    fft2d(&mut buf, plan.fnx, plan.fny, false);
    for (b, k) in buf.iter_mut().zip(plan.kernel_fft.iter()) {
        *b *= *k;
    }
    fft2d(&mut buf, plan.fnx, plan.fny, true);

    // read back the aligned (same-grid) region and upsample bilinearly
    let sample = |cx: usize, cy: usize| buf[(cy + plan.kw) * plan.fnx + (cx + plan.kw)].re;
    if f == 1 {
        for y in 0..map.ny {
            for x in 0..map.nx {
                *out.at_mut(x, y) += sample(x, y);
            }
        }
    } else {
        for y in 0..map.ny {
            let v = (y as f64 + 0.5) / f as f64 - 0.5;
            let y0 = v.floor().max(0.0) as usize;
            let y1 = (y0 + 1).min(plan.cny - 1);
            let wy = (v - y0 as f64).clamp(0.0, 1.0);
            for x in 0..map.nx {
                let u = (x as f64 + 0.5) / f as f64 - 0.5;
                let x0 = u.floor().max(0.0) as usize;
                let x1 = (x0 + 1).min(plan.cnx - 1);
                let wx = (u - x0 as f64).clamp(0.0, 1.0);
                let interp = sample(x0, y0) * (1.0 - wx) * (1.0 - wy)
                    + sample(x1, y0) * wx * (1.0 - wy)
                    + sample(x0, y1) * (1.0 - wx) * wy
                    + sample(x1, y1) * wx * wy;
                *out.at_mut(x, y) += interp;
            }
        }
    }
}
