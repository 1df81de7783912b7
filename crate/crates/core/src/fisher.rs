//! Fisher information functionals, distribution moments and the oscillator
//! coupling matrices.
//!
//! Two routes to the same quantity are kept side by side. The amplitude form
//! `4 integral |psi'|^2` is the primary one and uses a spectral derivative.
//! The density form `integral (f')^2 / f` uses fourth-order finite
//! differences and serves as a cross-check for nodeless densities.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::basis::epsilon;
use crate::error::{MfiError, Result};
use crate::fourier::spectral_derivative;
use crate::grid::{differentiate, integrate, integrate_real, GridFunction};

/// Points where the density falls below this value are skipped by
/// [`fisher_of_density`].
pub const DEFAULT_DENSITY_FLOOR: f64 = 1e-12;

/// Allowed deviation of `integral f` (or `integral |psi|^2`) from one.
pub const NORMALIZATION_TOL: f64 = 1e-6;

/// Whether values are compared at a common scale `mu` or at a common risk `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FisherImage {
    Physical,
    Transactional,
}

impl std::fmt::Display for FisherImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FisherImage::Physical => "physical",
            FisherImage::Transactional => "transactional",
        })
    }
}

/// Fisher information of a state together with its first two moments.
/// Fields serialize in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherReport {
    pub fisher: f64,
    pub mean: f64,
    pub variance: f64,
    pub cramer_rao_product: f64,
    pub image: FisherImage,
}

impl FisherReport {
    pub const FIELDS: [&'static str; 5] = ["fisher", "mean", "variance", "cramer_rao_product", "image"];

    pub fn new(fisher: f64, mean: f64, variance: f64, image: FisherImage) -> Self {
        Self { fisher, mean, variance, cramer_rao_product: fisher * variance, image }
    }

    /// Quadrature report for a normalized amplitude.
    pub fn from_amplitude(psi: &GridFunction, image: FisherImage) -> Result<Self> {
        let fisher = fisher_of_amplitude(psi)?;
        let m = moments(&psi.abs_sq());
        Ok(Self::new(fisher, m.mean, m.variance, image))
    }
}

/// Quadratures `integral f`, `integral x f` and `integral (x - mean)^2 f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub norm: f64,
    pub mean: f64,
    pub variance: f64,
}

pub fn moments(f: &GridFunction) -> Moments {
    let g = f.grid();
    let xs = g.points();
    let re = f.real_parts();
    let norm = integrate_real(g, &re);
    let first: Vec<f64> = xs.iter().zip(&re).map(|(x, v)| x * v).collect();
    let mean = integrate_real(g, &first);
    let second: Vec<f64> = xs.iter().zip(&re).map(|(x, v)| (x - mean).powi(2) * v).collect();
    Moments { norm, mean, variance: integrate_real(g, &second) }
}

fn check_normalized(integral: f64) -> Result<()> {
    if (integral - 1.0).abs() > NORMALIZATION_TOL {
        return Err(MfiError::Normalization { integral, tolerance: NORMALIZATION_TOL });
    }
    Ok(())
}

/// `integral f (d ln f / dx)^2 dx = integral (f')^2 / f dx`, skipping points
/// where `f < floor`.
pub fn fisher_of_density(f: &GridFunction, floor: f64) -> Result<f64> {
    let g = f.grid();
    for (i, v) in f.values().iter().enumerate() {
        if v.re < -1e-12 || v.im.abs() > 1e-12 {
            return Err(MfiError::InvalidDensity { x: g.x(i), value: v.re });
        }
    }
    check_normalized(integrate(f).re)?;
    let df = differentiate(f);
    let integrand: Vec<f64> = f
        .values()
        .iter()
        .zip(df.values())
        .map(|(v, d)| if v.re < floor { 0.0 } else { d.re * d.re / v.re })
        .collect();
    Ok(integrate_real(g, &integrand))
}

/// `4 integral |psi'|^2 dx` for a normalized, possibly complex amplitude.
pub fn fisher_of_amplitude(psi: &GridFunction) -> Result<f64> {
    check_normalized(integrate(&psi.abs_sq()).re)?;
    Ok(gradient_energy(psi))
}

/// `4 integral |f'|^2 dx` without the normalization check.
pub fn gradient_energy(f: &GridFunction) -> f64 {
    4.0 * integrate(&spectral_derivative(f).abs_sq()).re
}

/// Fisher information of the `n`-th eigenstate, `(4n + 2) mu`.
pub fn closed_form_eigen_fisher(n: usize, mu: f64) -> f64 {
    (4 * n + 2) as f64 * mu
}

/// `min_{r in {j,k}} sqrt((r+1)(r+2))` when `|j - k| = 2`, else zero.
fn two_step_coupling(j: usize, k: usize) -> f64 {
    if j + 2 == k || k + 2 == j {
        let r = j.min(k) as f64;
        ((r + 1.0) * (r + 2.0)).sqrt()
    } else {
        0.0
    }
}

/// Element `v_jk = integral (x-m)^2 psi_j psi_k dx`.
pub fn risk_element(j: usize, k: usize, mu: f64) -> f64 {
    let diag = if j == k { 2.0 * epsilon(j) } else { 0.0 };
    (diag + two_step_coupling(j, k)) / (2.0 * mu)
}

/// Element `w_jk = 4 integral psi_j' psi_k' dx`.
pub fn gradient_element(j: usize, k: usize, mu: f64) -> f64 {
    let diag = if j == k { 2.0 * epsilon(j) } else { 0.0 };
    2.0 * mu * (diag - two_step_coupling(j, k))
}

/// Second-moment matrix `v` over `psi_0 .. psi_{n_max}`.
pub fn risk_matrix_v(n_max: usize, mu: f64) -> DMatrix<f64> {
    DMatrix::from_fn(n_max + 1, n_max + 1, |j, k| risk_element(j, k, mu))
}

/// Gradient Gram matrix `w` over `psi_0 .. psi_{n_max}`.
pub fn gradient_matrix_w(n_max: usize, mu: f64) -> DMatrix<f64> {
    DMatrix::from_fn(n_max + 1, n_max + 1, |j, k| gradient_element(j, k, mu))
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// `I_F * var` for a normalized amplitude; at least one for any
/// square-integrable state.
pub fn cramer_rao_product(psi: &GridFunction) -> Result<f64> {
    let fisher = fisher_of_amplitude(psi)?;
    Ok(fisher * moments(&psi.abs_sq()).variance)
}
