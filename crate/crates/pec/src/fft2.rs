//! Minimal 2-D complex FFT on top of rustfft.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

/// In-place 2-D FFT of row-major data (ny rows of nx).
pub fn fft2d(data: &mut [Complex64], nx: usize, ny: usize, inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let row_fft = if inverse {
        planner.plan_fft_inverse(nx)
    } else {
        planner.plan_fft_forward(nx)
    };
    let col_fft = if inverse {
        planner.plan_fft_inverse(ny)
    } else {
        planner.plan_fft_forward(ny)
    };
    for row in data.chunks_exact_mut(nx) {
        row_fft.process(row);
    }
    let mut col = vec![Complex64::default(); ny];
    for x in 0..nx {
        for y in 0..ny {
            col[y] = data[y * nx + x];
        }
        col_fft.process(&mut col);
        for y in 0..ny {
            data[y * nx + x] = col[y];
        }
    }
    if inverse {
        let scale = 1.0 / (nx * ny) as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }
}

pub fn next_pow2(n: usize) -> usize {
    n.next_power_of_two()
}
