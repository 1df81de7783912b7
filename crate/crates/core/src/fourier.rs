//! Unitary Fourier transform of grid functions.
//!
//! Convention: `F[psi](y) = (2 pi)^{-1/2} integral exp(-i x y) psi(x) dx`.
//! Under this convention the oscillator eigenfunctions at `m = 0` satisfy
//! `F[psi_n] = (-i)^n psi_n` with `mu` replaced by `1 / mu`.
//!
//! The input grid must be symmetric about the origin. Writing `c = (N-1)/2`,
//! the samples sit at `x_j = (j - c) h` and the transform is returned on
//! `y_k = (k - c) dy` with `dy = 2 pi / (N h)`, so the output grid is again
//! origin-symmetric and transforming twice returns exactly to the input grid.
//! The centered sum is computed with one FFT plus pre/post phase factors.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{MfiError, Result};
use crate::grid::{Grid, GridFunction};

/// Grid on which [`fourier_transform`] of a function on `grid` is sampled.
pub fn conjugate_grid(grid: &Grid) -> Result<Grid> {
    let n = grid.count();
    let dy = 2.0 * PI / (n as f64 * grid.step());
    let half = 0.5 * (n as f64 - 1.0) * dy;
    Grid::new(-half, half, n)
}

// exp(-i pi j / N) * (-1)^j, i.e. exp(i 2 pi c j / N) with c = (N-1)/2.
fn centering_phase(j: usize, n: usize) -> Complex64 {
    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
    Complex64::from_polar(sign, -PI * j as f64 / n as f64)
}

/// Continuous-transform approximation on the conjugate grid.
pub fn fourier_transform(f: &GridFunction) -> Result<GridFunction> {
    let grid = *f.grid();
    if !grid.is_origin_symmetric() {
        return Err(MfiError::InvalidGrid(format!(
            "Fourier transform needs a grid symmetric about 0, got [{}, {}]",
            grid.x_min(),
            grid.x_max()
        )));
    }
    let n = grid.count();
    let mut buf: Vec<Complex64> =
        f.values().iter().enumerate().map(|(j, v)| v * centering_phase(j, n)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);

    // exp(-i 2 pi c^2 / N) = (-i)^(N-2) * exp(-i pi / (2N))
    let quarter_turns = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, -1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, 1.0),
    ];
    let global = quarter_turns[(n + 2) % 4]
        * Complex64::from_polar(grid.step() / (2.0 * PI).sqrt(), -PI / (2.0 * n as f64));
    let values = buf.iter().enumerate().map(|(k, v)| v * centering_phase(k, n) * global).collect();
    GridFunction::new(conjugate_grid(&grid)?, values)
}

/// Spectral derivative `F^{-1}[i k F[f]]` with the discrete wavenumbers of
/// the grid; the Nyquist mode is dropped. Exact up to round-off for smooth
/// functions that vanish near both ends of the grid.
pub fn spectral_derivative(f: &GridFunction) -> GridFunction {
    let grid = *f.grid();
    let n = grid.count();
    let mut buf = f.values().to_vec();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    let base = 2.0 * PI / (n as f64 * grid.step());
    for (j, v) in buf.iter_mut().enumerate() {
        let k = if 2 * j < n {
            j as f64
        } else if 2 * j == n {
            0.0
        } else {
            j as f64 - n as f64
        };
        *v *= Complex64::new(0.0, k * base / n as f64);
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    GridFunction::new(grid, buf).expect("derivative of finite samples is finite")
}
