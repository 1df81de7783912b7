//! Direct constrained minimization of the Fisher functional and the
//! finite-difference eigenproblem it reduces to.

mod banded;
mod solver;
mod spectrum;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::fisher::{gradient_energy, moments};
use crate::grid::{integrate, second_derivative, GridFunction};
use crate::Complex64;

pub use solver::{
    solve_mfi, solve_mfi_with, ConstraintSet, MfiSolution, SolverOptions, TraceRow, COVERAGE_WIDTHS,
    DEFAULT_GRADIENT_TOLERANCE, DEFAULT_MAX_ITERATIONS,
};
pub use spectrum::{
    boundary_density, discrete_spectrum, discrete_spectrum_with, DiscreteOperator, Eigenpair, Stencil,
    COVERAGE_DENSITY,
};

/// L2 norm of `-(1/2mu) psi'' + (mu/2)(x-m)^2 psi - eps psi`, skipping two
/// points at each end.
pub fn euler_lagrange_residual(psi: &GridFunction, epsilon: f64, mu: f64, m: f64) -> f64 {
    let d2 = second_derivative(psi);
    let grid = psi.grid();
    let n = grid.count();
    let sum: f64 = (2..n - 2)
        .map(|i| {
            let t = grid.x(i) - m;
            let r = d2.values()[i] * (-0.5 / mu) + psi.values()[i] * (0.5 * mu * t * t - epsilon);
            r.norm_sqr()
        })
        .sum();
    (sum * grid.step()).sqrt()
}

/// Second variation of the Fisher term along `delta`, `4 * integral |delta'|^2`.
pub fn second_variation(delta: &GridFunction) -> f64 {
    gradient_energy(delta)
}

/// Second variation along a random smooth perturbation tangent to the
/// constraint set at `psi` (orthogonal to `psi`, `(x-m) psi`, `(x-m)^2 psi`).
pub fn convexity_witness(psi: &GridFunction, seed: u64) -> Result<f64> {
    let mo = moments(&psi.abs_sq());
    let s = mo.variance.max(f64::MIN_POSITIVE).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bumps: Vec<(f64, f64, f64)> = (0..4)
        .map(|_| (mo.mean + 2.0 * s * rng.random_range(-1.0..1.0), s * rng.random_range(0.3..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let mut delta = GridFunction::from_real_fn(*psi.grid(), |x| {
        bumps.iter().map(|&(c, w, a)| a * (-0.5 * ((x - c) / w).powi(2)).exp()).sum()
    })?;
    let mut basis: Vec<GridFunction> = Vec::with_capacity(3);
    for k in 0..3 {
        let mut b = psi.map(|x, v| v * (x - mo.mean).powi(k));
        for q in &basis {
            b = b.sub(&q.scale(integrate(&q.conj_mul(&b)?)))?;
        }
        let norm = b.l2_norm();
        if norm > 0.0 {
            basis.push(b.scale(Complex64::from(1.0 / norm)));
        }
    }
    for q in &basis {
        delta = delta.sub(&q.scale(integrate(&q.conj_mul(&delta)?)))?;
    }
    Ok(second_variation(&delta))
}
