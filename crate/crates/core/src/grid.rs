//! Uniform grids, sampled functions, Simpson quadrature and finite differences.

use num_complex::Complex64;
use serde::Serialize;

use crate::basis::{self, OscillatorParams};
use crate::error::{MfiError, Result};
use crate::exec::{pairwise_sum, Execution};

/// Number of sample points used when no override is given.
pub const DEFAULT_GRID_COUNT: usize = 4096;

/// Fewest points a grid may have.
pub const MIN_GRID_COUNT: usize = 16;

/// Uniform grid `x_i = x_min + i * step`, `i = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    count: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, count: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(MfiError::InvalidGrid(format!("need finite x_min < x_max, got [{x_min}, {x_max}]")));
        }
        if count < MIN_GRID_COUNT {
            return Err(MfiError::InvalidGrid(format!("need at least {MIN_GRID_COUNT} points, got {count}")));
        }
        Ok(Self { x_min, x_max, count })
    }

    pub fn centered(center: f64, half_width: f64, count: usize) -> Result<Self> {
        Self::new(center - half_width, center + half_width, count)
    }

    /// Origin-centered grid whose Fourier conjugate grid is itself:
    /// `step = sqrt(2 pi / count)`.
    pub fn self_dual(count: usize) -> Result<Self> {
        let step = (2.0 * std::f64::consts::PI / count as f64).sqrt();
        let half = 0.5 * (count as f64 - 1.0) * step;
        Self::new(-half, half, count)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn step(&self) -> f64 {
        (self.x_max - self.x_min) / (self.count - 1) as f64
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.x_min + self.x_max)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.x_max - self.x_min)
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.x_max
        } else {
            self.x_min + i as f64 * self.step()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.x(i)).collect()
    }

    /// Same point count and endpoints equal up to rounding.
    pub fn approx_eq(&self, other: &Grid) -> bool {
        let tol = 1e-10 * (self.x_max - self.x_min);
        self.count == other.count
            && (self.x_min - other.x_min).abs() <= tol
            && (self.x_max - other.x_max).abs() <= tol
    }

    /// True when the grid is symmetric about the origin.
    pub fn is_origin_symmetric(&self) -> bool {
        (self.x_min + self.x_max).abs() <= 1e-12 * (self.x_max - self.x_min)
    }
}

/// Grid centered at `m` covering the classical region of `psi_{n_max}` with
/// padding: half-width `1.5 sqrt(2 (2 n_max + 1) / mu) + 6 / sqrt(mu)`.
pub fn default_grid_for(params: &OscillatorParams, n_max: usize) -> Grid {
    default_grid_with_count(params, n_max, DEFAULT_GRID_COUNT)
}

pub fn default_grid_with_count(params: &OscillatorParams, n_max: usize, count: usize) -> Grid {
    let turning = (2.0 * (2.0 * n_max as f64 + 1.0) / params.mu).sqrt();
    let half_width = 1.5 * turning + 6.0 / params.mu.sqrt();
    Grid::centered(params.m, half_width, count.max(MIN_GRID_COUNT)).expect("validated parameters give a valid grid")
}

/// Complex samples of a function on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.count() {
            return Err(MfiError::InvalidGrid(format!(
                "{} values for a {}-point grid",
                values.len(),
                grid.count()
            )));
        }
        if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(MfiError::InvalidGrid(format!("non-finite value at x = {}", grid.x(i))));
        }
        Ok(Self { grid, values })
    }

    pub fn from_real(grid: Grid, values: Vec<f64>) -> Result<Self> {
        Self::new(grid, values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
    }

    pub fn from_fn<F>(grid: Grid, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Complex64 + Sync + Send,
    {
        Self::from_fn_with(Execution::default(), grid, f)
    }

    pub fn from_fn_with<F>(exec: Execution, grid: Grid, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Complex64 + Sync + Send,
    {
        let values = exec.map_indexed(grid.count(), |i| f(grid.x(i)));
        Self::new(grid, values)
    }

    pub fn from_real_fn<F>(grid: Grid, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Sync + Send,
    {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    /// Samples `psi_n` on the grid.
    pub fn eigenstate(grid: Grid, n: usize, params: &OscillatorParams) -> Self {
        Self::eigenstate_with(Execution::default(), grid, n, params)
    }

    pub fn eigenstate_with(exec: Execution, grid: Grid, n: usize, params: &OscillatorParams) -> Self {
        let params = *params;
        Self::from_fn_with(exec, grid, |x| Complex64::new(basis::eigenstate_value(n, x, &params), 0.0))
            .expect("eigenfunction samples are finite")
    }

    /// Samples `d psi_n / dx` from the closed-form ladder identity.
    pub fn eigenstate_derivative(grid: Grid, n: usize, params: &OscillatorParams) -> Self {
        let params = *params;
        Self::from_fn(grid, |x| Complex64::new(basis::eigenstate_derivative(n, x, &params), 0.0))
            .expect("eigenfunction derivatives are finite")
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    /// Largest imaginary part in magnitude.
    pub fn max_imag(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.im.abs()))
    }

    pub fn map<F: Fn(f64, Complex64) -> Complex64>(&self, f: F) -> Self {
        let values = self.values.iter().enumerate().map(|(i, &v)| f(self.grid.x(i), v)).collect();
        Self { grid: self.grid, values }
    }

    /// `|f|^2` as a real grid function.
    pub fn abs_sq(&self) -> Self {
        self.map(|_, v| Complex64::new(v.norm_sqr(), 0.0))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|_, v| v * c)
    }

    /// Pointwise product `self * other`. Both must share a grid.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(Self { grid: self.grid, values })
    }

    /// Pointwise `conj(self) * other`.
    pub fn conj_mul(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).collect();
        Ok(Self { grid: self.grid, values })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(Self { grid: self.grid, values })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(Self { grid: self.grid, values })
    }

    /// `sqrt(integral |self - other|^2)`.
    pub fn l2_distance(&self, other: &Self) -> Result<f64> {
        Ok(integrate(&self.sub(other)?.abs_sq()).re.max(0.0).sqrt())
    }

    /// `sqrt(integral |self|^2)`.
    pub fn l2_norm(&self) -> f64 {
        integrate(&self.abs_sq()).re.max(0.0).sqrt()
    }

    fn check_same_grid(&self, other: &Self) -> Result<()> {
        if !self.grid.approx_eq(&other.grid) {
            return Err(MfiError::InvalidGrid("grid functions live on different grids".into()));
        }
        Ok(())
    }
}

/// Composite Simpson weights. For an odd number of intervals the last three
/// intervals use the 3/8 rule.
pub fn simpson_weights(count: usize, step: f64) -> Vec<f64> {
    assert!(count >= 4, "Simpson weights need at least 4 points");
    let mut w = vec![0.0; count];
    let intervals = count - 1;
    let simpson_end = if intervals % 2 == 0 { intervals } else { intervals - 3 };
    if simpson_end > 0 {
        for (i, wi) in w.iter_mut().enumerate().take(simpson_end + 1) {
            *wi += if i == 0 || i == simpson_end {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            } * step
                / 3.0;
        }
    }
    if simpson_end < intervals {
        let k = simpson_end;
        for (j, c) in [3.0, 9.0, 9.0, 3.0].iter().enumerate() {
            w[k + j] += c * step / 8.0;
        }
    }
    w
}

/// Simpson quadrature of `f` over its grid.
pub fn integrate(f: &GridFunction) -> Complex64 {
    let w = simpson_weights(f.grid.count(), f.grid.step());
    let re: Vec<f64> = f.values.iter().zip(&w).map(|(v, w)| v.re * w).collect();
    let im: Vec<f64> = f.values.iter().zip(&w).map(|(v, w)| v.im * w).collect();
    Complex64::new(pairwise_sum(&re), pairwise_sum(&im))
}

/// Real part of the Simpson quadrature of `values` sampled on `grid`.
pub fn integrate_real(grid: &Grid, values: &[f64]) -> f64 {
    let w = simpson_weights(grid.count(), grid.step());
    let terms: Vec<f64> = values.iter().zip(&w).map(|(v, w)| v * w).collect();
    pairwise_sum(&terms)
}

/// First derivative by fourth-order finite differences: central five-point
/// stencil in the interior, one-sided fourth-order stencils on the two
/// outermost points at each end.
pub fn differentiate(f: &GridFunction) -> GridFunction {
    let n = f.grid.count();
    let h = f.grid.step();
    let v = &f.values;
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for i in 2..n - 2 {
        out[i] = (v[i - 2] - v[i - 1] * 8.0 + v[i + 1] * 8.0 - v[i + 2]) / (12.0 * h);
    }
    out[0] = (v[0] * -25.0 + v[1] * 48.0 - v[2] * 36.0 + v[3] * 16.0 - v[4] * 3.0) / (12.0 * h);
    out[1] = (v[0] * -3.0 - v[1] * 10.0 + v[2] * 18.0 - v[3] * 6.0 + v[4]) / (12.0 * h);
    out[n - 1] =
        (v[n - 1] * 25.0 - v[n - 2] * 48.0 + v[n - 3] * 36.0 - v[n - 4] * 16.0 + v[n - 5] * 3.0) / (12.0 * h);
    out[n - 2] = (v[n - 1] * 3.0 + v[n - 2] * 10.0 - v[n - 3] * 18.0 + v[n - 4] * 6.0 - v[n - 5]) / (12.0 * h);
    GridFunction { grid: f.grid, values: out }
}

/// Second derivative, fourth order: five-point central stencil inside,
/// six-point one-sided stencils on the two outermost points at each end.
pub fn second_derivative(f: &GridFunction) -> GridFunction {
    let n = f.grid.count();
    let h2 = f.grid.step().powi(2);
    let v = &f.values;
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for i in 2..n - 2 {
        out[i] = (-v[i - 2] + v[i - 1] * 16.0 - v[i] * 30.0 + v[i + 1] * 16.0 - v[i + 2]) / (12.0 * h2);
    }
    let left = |a: usize, s: isize| -> [Complex64; 6] {
        let mut w = [Complex64::new(0.0, 0.0); 6];
        for (k, wk) in w.iter_mut().enumerate() {
            *wk = v[(a as isize + s * k as isize) as usize];
        }
        w
    };
    let edge0 = |w: [Complex64; 6]| {
        (w[0] * 45.0 - w[1] * 154.0 + w[2] * 214.0 - w[3] * 156.0 + w[4] * 61.0 - w[5] * 10.0) / (12.0 * h2)
    };
    let edge1 = |w: [Complex64; 6]| {
        (w[0] * 10.0 - w[1] * 15.0 - w[2] * 4.0 + w[3] * 14.0 - w[4] * 6.0 + w[5]) / (12.0 * h2)
    };
    out[0] = edge0(left(0, 1));
    out[1] = edge1(left(0, 1));
    out[n - 1] = edge0(left(n - 1, -1));
    out[n - 2] = edge1(left(n - 1, -1));
    GridFunction { grid: f.grid, values: out }
}
