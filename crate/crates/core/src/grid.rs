//! Uniform circle grids and DFT-based coefficient extraction.
//!
//! Sampling convention: a circle of radius `c` carries `m` points
//! `c * exp(2*pi*i*l/m)`, l = 0..m. For f(z) = sum c_k z^k the forward DFT of
//! the samples returns `m * c_k * c^k` at bin `k mod m`, so coefficients inside
//! an index window recover exactly (up to aliasing of indices beyond the grid).

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::defaults::is_power_of_two;
use crate::error::{Error, Result};

pub fn circle_point(radius: f64, index: usize, count: usize) -> Complex64 {
    let angle = 2.0 * std::f64::consts::PI * index as f64 / count as f64;
    Complex64::from_polar(radius, angle)
}

pub fn circle_points(radius: f64, count: usize) -> Vec<Complex64> {
    (0..count).map(|l| circle_point(radius, l, count)).collect()
}

/// In-place forward DFT, unnormalized: X_j = sum_l x_l exp(-2 pi i j l / m).
pub fn dft_forward(values: &mut [Complex64]) {
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(values.len());
    fft.process(values);
}

/// Checks a sample count against the index window it must resolve: a power of
/// two, at least twice the largest index magnitude, and strictly more samples
/// than the window spans so distinct indices land in distinct DFT bins.
pub fn check_grid(samples: usize, min: i32, max: i32) -> Result<()> {
    let half = min.unsigned_abs().max(max.unsigned_abs()) as usize;
    let span = (max - min) as usize;
    if !is_power_of_two(samples) || samples < 2 * half || samples <= span {
        return Err(Error::InsufficientSamples {
            got: samples,
            need: (2 * half).max(span + 1).next_power_of_two(),
        });
    }
    Ok(())
}

/// Smallest sample count `check_grid` accepts for the window [min, max].
pub fn grid_for_window(min: i32, max: i32) -> usize {
    let half = min.unsigned_abs().max(max.unsigned_abs()) as usize;
    let span = (max - min) as usize;
    (2 * half).max(span + 1).next_power_of_two()
}

/// Laurent coefficients on the window [min, max] from samples on |z| = radius.
///
/// Exact for Laurent polynomials supported inside the window; indices outside
/// alias onto the grid and are the caller's responsibility to keep negligible.
pub fn coefficients_from_circle(
    samples: &[Complex64],
    radius: f64,
    min: i32,
    max: i32,
) -> Result<Vec<Complex64>> {
    check_grid(samples.len(), min, max)?;
    let m = samples.len();
    let window_len = (max - min + 1) as usize;
    let mut buf = samples.to_vec();
    dft_forward(&mut buf);
    let scale = 1.0 / m as f64;
    let mut out = Vec::with_capacity(window_len);
    for k in min..=max {
        let bin = (k.rem_euclid(m as i32)) as usize;
        out.push(buf[bin] * scale * radius.powi(-k));
    }
    Ok(out)
}

/// Two-variable coefficients from samples on the torus |z| = cz, |w| = cw.
///
/// `samples` is row-major over z first: samples[iz * mw + iw]. Returns
/// coefficients row-major over the z window first, w powers 0..=w_degree inner.
pub fn coefficients_from_torus(
    samples: &[Complex64],
    mz: usize,
    mw: usize,
    cz: f64,
    cw: f64,
    z_min: i32,
    z_max: i32,
    w_degree: usize,
) -> Result<Vec<Complex64>> {
    assert_eq!(samples.len(), mz * mw, "torus sample layout");
    check_grid(mz, z_min, z_max)?;
    check_grid(mw, 0, w_degree as i32)?;
    let mut buf = samples.to_vec();
    let mut planner = FftPlanner::new();
    let fft_w = planner.plan_fft_forward(mw);
    for row in buf.chunks_exact_mut(mw) {
        fft_w.process(row);
    }
    let fft_z = planner.plan_fft_forward(mz);
    let mut col = vec![Complex64::default(); mz];
    for iw in 0..mw {
        for iz in 0..mz {
            col[iz] = buf[iz * mw + iw];
        }
        fft_z.process(&mut col);
        for iz in 0..mz {
            buf[iz * mw + iw] = col[iz];
        }
    }
    let scale = 1.0 / (mz * mw) as f64;
    let z_len = (z_max - z_min + 1) as usize;
    let mut out = vec![Complex64::default(); z_len * (w_degree + 1)];
    for (row, j) in (z_min..=z_max).enumerate() {
        let bin_z = j.rem_euclid(mz as i32) as usize;
        let zfac = scale * cz.powi(-j);
        for k in 0..=w_degree {
            let bin_w = k % mw;
            out[row * (w_degree + 1) + k] = buf[bin_z * mw + bin_w] * zfac * cw.powi(-(k as i32));
        }
    }
    Ok(out)
}
