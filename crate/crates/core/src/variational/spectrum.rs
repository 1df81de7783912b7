use serde::{Deserialize, Serialize};

use super::banded::BandedLu;
use crate::basis::OscillatorParams;
use crate::error::{MfiError, Result};
use crate::grid::{integrate_real, Grid, GridFunction};

/// Density above which the outer band of the grid counts as occupied.
pub const COVERAGE_DENSITY: f64 = 1e-8;

/// Finite-difference stencil for the kinetic term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stencil {
    /// Three-point central difference.
    SecondOrder,
    /// Five-point central difference.
    #[default]
    FourthOrder,
}

/// `-(1/2mu) d^2/dx^2 + (mu/2)(x - m)^2` on the interior grid points with
/// zero boundary values.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteOperator {
    grid: Grid,
    params: OscillatorParams,
}

impl DiscreteOperator {
    pub fn new(grid: Grid, mu: f64, m: f64) -> Result<Self> {
        Ok(Self { grid, params: OscillatorParams::new(mu, m)? })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn params(&self) -> OscillatorParams {
        self.params
    }

    /// Number of unknowns (interior points).
    pub fn dim(&self) -> usize {
        self.grid.count() - 2
    }

    fn potential(&self, i: usize) -> f64 {
        let t = self.grid.x(i + 1) - self.params.m;
        0.5 * self.params.mu * t * t
    }

    /// Diagonal and off-diagonal of the three-point operator.
    pub fn tridiagonal(&self) -> (Vec<f64>, Vec<f64>) {
        let k = 1.0 / (2.0 * self.params.mu * self.grid.step().powi(2));
        let n = self.dim();
        ((0..n).map(|i| 2.0 * k + self.potential(i)).collect(), vec![-k; n - 1])
    }

    /// Row-wise bands `[a_{i,i-2}, .., a_{i,i+2}]` for the chosen stencil.
    pub fn bands(&self, stencil: Stencil) -> Vec<[f64; 5]> {
        let n = self.dim();
        let k = 1.0 / (2.0 * self.params.mu * self.grid.step().powi(2));
        let (c0, c1, c2) = match stencil {
            Stencil::SecondOrder => (2.0 * k, -k, 0.0),
            Stencil::FourthOrder => (2.5 * k, -4.0 / 3.0 * k, k / 12.0),
        };
        (0..n)
            .map(|i| {
                let mut b = [c2, c1, c0 + self.potential(i), c1, c2];
                if i < 2 {
                    b[..2 - i].fill(0.0);
                }
                if i + 2 >= n {
                    b[n - i + 2..].fill(0.0);
                }
                b
            })
            .collect()
    }

    /// Applies the banded operator to interior values.
    pub fn apply(&self, stencil: Stencil, v: &[f64]) -> Vec<f64> {
        apply_bands(&self.bands(stencil), v)
    }

    /// Number of eigenvalues of the three-point operator below `lambda`.
    pub fn sturm_count(&self, lambda: f64) -> usize {
        let (d, e) = self.tridiagonal();
        sturm_count(&d, &e, lambda)
    }
}

fn apply_bands(bands: &[[f64; 5]], v: &[f64]) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|i| {
            let mut s = 0.0;
            for (j, a) in bands[i].iter().enumerate() {
                let c = i + j;
                if (2..n + 2).contains(&c) {
                    s += a * v[c - 2];
                }
            }
            s
        })
        .collect()
}

fn sturm_count(d: &[f64], e: &[f64], lambda: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..d.len() {
        let off = if i == 0 { 0.0 } else { e[i - 1] * e[i - 1] / q };
        q = d[i] - lambda - off;
        if q == 0.0 {
            q = -f64::EPSILON * (d[i].abs() + lambda.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn bisect(d: &[f64], e: &[f64], index: usize) -> f64 {
    let radius = |i: usize| {
        (if i > 0 { e[i - 1].abs() } else { 0.0 }) + (if i < e.len() { e[i].abs() } else { 0.0 })
    };
    let mut lo = (0..d.len()).map(|i| d[i] - radius(i)).fold(f64::INFINITY, f64::min);
    let mut hi = (0..d.len()).map(|i| d[i] + radius(i)).fold(f64::NEG_INFINITY, f64::max);
    while hi - lo > 4.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(1e-300) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(d, e, mid) > index {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

// Inverse iteration with a fixed shift, then the Rayleigh quotient.
fn inverse_iteration(bands: &[[f64; 5]], shift: f64) -> Result<(f64, Vec<f64>)> {
    let n = bands.len();
    let shifted: Vec<[f64; 5]> = bands
        .iter()
        .map(|b| {
            let mut s = *b;
            s[2] -= shift;
            s
        })
        .collect();
    let lu = BandedLu::factor(&shifted)?;
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * (0.7311 * i as f64).sin() + 0.3 * (i as f64 / n as f64)).collect();
    let norm = dot(&v, &v).sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    let mut lambda = f64::NAN;
    for _ in 0..200 {
        let mut w = v.clone();
        lu.solve(&mut w);
        let norm = dot(&w, &w).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            break;
        }
        w.iter_mut().for_each(|x| *x /= norm);
        let sign = dot(&w, &v).signum();
        w.iter_mut().for_each(|x| *x *= sign);
        let change = w.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = w;
        let next = dot(&v, &apply_bands(bands, &v));
        let settled = (next - lambda).abs() <= 1e-15 * next.abs().max(1.0) && change < 1e-11;
        lambda = next;
        if settled {
            return Ok((lambda, v));
        }
    }
    let residual: f64 = {
        let av = apply_bands(bands, &v);
        av.iter().zip(&v).map(|(a, x)| (a - lambda * x).powi(2)).sum::<f64>().sqrt()
    };
    if residual.is_finite() && residual < 1e-8 * lambda.abs().max(1.0) {
        Ok((lambda, v))
    } else {
        Err(MfiError::Convergence { iterations: 200, residual })
    }
}

/// An eigenvalue with its eigenvector sampled on the full grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub epsilon: f64,
    pub psi: GridFunction,
}

/// The lowest `count` eigenpairs of the oscillator operator, ascending.
///
/// Eigenvalues are bracketed by Sturm bisection of the three-point operator
/// and refined by inverse iteration on the five-point one. Eigenvectors are
/// normalized with the grid quadrature weights and signed to be positive on
/// the right tail.
pub fn discrete_spectrum(grid: &Grid, mu: f64, m: f64, count: usize) -> Result<Vec<Eigenpair>> {
    discrete_spectrum_with(grid, mu, m, count, Stencil::default())
}

pub fn discrete_spectrum_with(grid: &Grid, mu: f64, m: f64, count: usize, stencil: Stencil) -> Result<Vec<Eigenpair>> {
    let op = DiscreteOperator::new(*grid, mu, m)?;
    if count == 0 || count > op.dim() / 4 {
        return Err(MfiError::Domain(format!("state count {count} outside 1..={}", op.dim() / 4)));
    }
    let (d, e) = op.tridiagonal();
    let bands = op.bands(stencil);
    let mut out: Vec<Eigenpair> = Vec::with_capacity(count);
    for index in 0..count {
        let shift = bisect(&d, &e, index);
        let (epsilon, v) = inverse_iteration(&bands, shift)?;
        if let Some(prev) = out.last() {
            if epsilon <= prev.epsilon + 1e-8 * epsilon.abs() {
                return Err(MfiError::Contract(format!(
                    "eigenvalue {index} ({epsilon}) did not separate from {}",
                    prev.epsilon
                )));
            }
        }
        out.push(Eigenpair { epsilon, psi: to_grid_function(grid, &v)? });
    }
    if let Some(top) = out.last() {
        let density = boundary_density(&top.psi);
        if density > COVERAGE_DENSITY {
            return Err(MfiError::DomainCoverage(format!(
                "state {} has density {density:e} near the grid edge (limit {COVERAGE_DENSITY:e})",
                count - 1
            )));
        }
    }
    Ok(out)
}

fn to_grid_function(grid: &Grid, interior: &[f64]) -> Result<GridFunction> {
    let mut values = Vec::with_capacity(grid.count());
    values.push(0.0);
    values.extend_from_slice(interior);
    values.push(0.0);
    let norm = integrate_real(grid, &values.iter().map(|v| v * v).collect::<Vec<_>>()).sqrt();
    let peak = values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let tail = values.iter().rev().find(|v| v.abs() > 1e-3 * peak).copied().unwrap_or(1.0);
    let scale = tail.signum() / norm;
    GridFunction::from_real(*grid, values.into_iter().map(|v| v * scale).collect())
}

/// Largest density in the outer twentieth of the grid on either side.
pub fn boundary_density(psi: &GridFunction) -> f64 {
    let n = psi.values().len();
    let band = (n / 20).max(2);
    psi.values()[..band]
        .iter()
        .chain(&psi.values()[n - band..])
        .map(|v| v.norm_sqr())
        .fold(0.0, f64::max)
}
