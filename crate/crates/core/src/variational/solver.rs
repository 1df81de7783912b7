use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::banded::BandedLu;
use crate::error::{MfiError, Result};
use crate::grid::{Grid, GridFunction};

pub const DEFAULT_MAX_ITERATIONS: usize = 50_000;
pub const DEFAULT_GRADIENT_TOLERANCE: f64 = 1e-8;

/// Grid half-width required around the mean, in units of `sqrt(r)`.
pub const COVERAGE_WIDTHS: f64 = 6.0;

/// Normalization, mean and risk targets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSet {
    pub norm_target: f64,
    pub mean_target: f64,
    pub risk_target: f64,
}

impl ConstraintSet {
    pub fn new(mean: f64, risk: f64) -> Result<Self> {
        let c = Self { norm_target: 1.0, mean_target: mean, risk_target: risk };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.norm_target != 1.0 {
            return Err(MfiError::Domain(format!("norm target must be 1, got {}", self.norm_target)));
        }
        if !self.mean_target.is_finite() {
            return Err(MfiError::Domain(format!("mean must be finite, got {}", self.mean_target)));
        }
        if !(self.risk_target.is_finite() && self.risk_target > 0.0) {
            return Err(MfiError::Domain(format!("risk must be positive and finite, got {}", self.risk_target)));
        }
        Ok(())
    }

    /// Scale of the Gaussian that satisfies the constraints, `1 / (2r)`.
    pub fn gaussian_mu(&self) -> f64 {
        0.5 / self.risk_target
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub max_iterations: usize,
    /// Bound on the L2 norm of the gradient projected onto the constraint
    /// tangent space.
    pub tolerance: f64,
    pub record_trace: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { max_iterations: DEFAULT_MAX_ITERATIONS, tolerance: DEFAULT_GRADIENT_TOLERANCE, record_trace: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iter: usize,
    pub fisher: f64,
    pub norm_residual: f64,
    pub mean_residual: f64,
    pub risk_residual: f64,
}

impl TraceRow {
    pub const HEADER: [&'static str; 5] = ["iter", "fisher", "norm_residual", "mean_residual", "risk_residual"];
}

#[derive(Debug, Clone, PartialEq)]
pub struct MfiSolution {
    pub psi: GridFunction,
    /// Discrete value of `4 * integral (psi')^2` at the minimizer.
    pub fisher: f64,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub trace: Vec<TraceRow>,
}

struct Problem {
    h: f64,
    r: f64,
    t: Vec<f64>,
}

impl Problem {
    fn energy(&self, v: &[f64]) -> f64 {
        let n = v.len();
        let mut s = v[0] * v[0] + v[n - 1] * v[n - 1];
        for w in v.windows(2) {
            s += (w[1] - w[0]).powi(2);
        }
        4.0 * s / self.h
    }

    // 2 K v, the Euclidean gradient of the energy
    fn gradient(&self, v: &[f64]) -> Vec<f64> {
        let n = v.len();
        let k = 8.0 / self.h;
        (0..n)
            .map(|i| {
                let l = if i > 0 { v[i - 1] } else { 0.0 };
                let r = if i + 1 < n { v[i + 1] } else { 0.0 };
                k * (2.0 * v[i] - l - r)
            })
            .collect()
    }

    fn residuals(&self, v: &[f64]) -> [f64; 3] {
        let (mut n0, mut n1, mut n2) = (0.0, 0.0, 0.0);
        for (x, t) in v.iter().zip(&self.t) {
            let d = x * x;
            n0 += d;
            n1 += d * t;
            n2 += d * t * t;
        }
        [self.h * n0 - 1.0, self.h * n1, self.h * n2 - self.r]
    }

    // Multiplies by exp(b1 t + b2 t^2) so that mean and risk hold, then
    // normalizes.
    fn retract(&self, u: &[f64]) -> Result<Vec<f64>> {
        let mut beta = Vector2::zeros();
        let scale = self.r.sqrt();
        let mut last = f64::INFINITY;
        for iteration in 0..100 {
            let (z, m) = self.tilted_moments(u, &beta);
            if !(z > 0.0) {
                return Err(MfiError::Convergence { iterations: iteration, residual: f64::NAN });
            }
            let f = Vector2::new(m[1], m[2] - self.r);
            let size = (f[0] / scale).abs().max((f[1] / self.r).abs());
            if size <= 1e-14 {
                break;
            }
            if iteration == 99 || (size >= last && size < 1e-10) {
                if size < 1e-10 {
                    break;
                }
                return Err(MfiError::Convergence { iterations: iteration, residual: size });
            }
            last = size;
            let var = m[2] - m[1] * m[1];
            let cov = m[3] - m[1] * m[2];
            let kurt = m[4] - m[2] * m[2];
            let jac = 2.0 * Matrix2::new(var, cov, cov, kurt);
            let step = jac
                .lu()
                .solve(&f)
                .ok_or_else(|| MfiError::Contract("singular moment Jacobian in retraction".into()))?;
            let mut lambda = 1.0;
            loop {
                let trial = beta - lambda * step;
                let (_, mt) = self.tilted_moments(u, &trial);
                let ft = (mt[1] / scale).abs().max(((mt[2] - self.r) / self.r).abs());
                if ft.is_finite() && (ft < size || lambda < 1e-6) {
                    beta = trial;
                    break;
                }
                lambda *= 0.5;
            }
        }
        let exps = self.exponents(u, &beta);
        let top = exps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut v: Vec<f64> = u.iter().zip(&exps).map(|(x, e)| x * (0.5 * (e - top)).exp()).collect();
        let norm = (self.h * v.iter().map(|x| x * x).sum::<f64>()).sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        Ok(v)
    }

    fn exponents(&self, u: &[f64], beta: &Vector2<f64>) -> Vec<f64> {
        u.iter()
            .zip(&self.t)
            .map(|(x, t)| if *x == 0.0 { f64::NEG_INFINITY } else { 2.0 * (beta[0] * t + beta[1] * t * t) })
            .collect()
    }

    // normalizer and raw moments of u^2 exp(2 b1 t + 2 b2 t^2)
    fn tilted_moments(&self, u: &[f64], beta: &Vector2<f64>) -> (f64, [f64; 5]) {
        let exps = self.exponents(u, beta);
        let top = exps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut m = [0.0; 5];
        for ((x, t), e) in u.iter().zip(&self.t).zip(&exps) {
            let w = x * x * (e - top).exp();
            let mut p = w;
            for mk in m.iter_mut() {
                *mk += p;
                p *= t;
            }
        }
        let z = m[0];
        for mk in m.iter_mut() {
            *mk /= z;
        }
        (z, m)
    }

    // Gradient projected onto the tangent space in the L2 inner product,
    // returned as its L2 norm.
    fn projected_gradient_norm(&self, v: &[f64], g: &[f64]) -> f64 {
        let h = self.h;
        let gf: Vec<f64> = g.iter().map(|x| x / h).collect();
        let basis: [Vec<f64>; 3] = [
            v.to_vec(),
            v.iter().zip(&self.t).map(|(x, t)| x * t).collect(),
            v.iter().zip(&self.t).map(|(x, t)| x * t * t).collect(),
        ];
        let ip = |a: &[f64], b: &[f64]| h * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let gram = Matrix3::from_fn(|i, j| ip(&basis[i], &basis[j]));
        let rhs = Vector3::from_fn(|i, _| ip(&basis[i], &gf));
        let coef = gram.lu().solve(&rhs).unwrap_or_else(Vector3::zeros);
        let proj: Vec<f64> =
            (0..gf.len()).map(|k| gf[k] - (0..3).map(|i| coef[i] * basis[i][k]).sum::<f64>()).collect();
        ip(&proj, &proj).sqrt()
    }
}

fn initial_guess(grid: &Grid, c: &ConstraintSet, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = c.risk_target.sqrt();
    let bumps: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| {
            let center = c.mean_target + s * rng.random_range(-1.0..1.0);
            let width = s * rng.random_range(0.5..1.5);
            let amp = rng.random_range(0.5..1.5);
            (center, width, amp)
        })
        .collect();
    (1..grid.count() - 1)
        .map(|i| {
            let x = grid.x(i);
            bumps.iter().map(|&(c, w, a)| a * (-0.5 * ((x - c) / w).powi(2)).exp()).sum()
        })
        .collect()
}

/// Minimizes `4 * integral (psi')^2` over real grid functions with zero
/// boundary values, subject to unit norm, mean `m` and variance `r`.
///
/// Preconditioned projected gradient descent: each step solves with
/// `2K + h(8mu + 8mu^2 (x-m)^2)`, `mu = 1/(2r)`, projects onto the
/// constraint tangent space, backtracks on the energy and re-imposes the
/// constraints. Starts from a positive random bump drawn from `seed`.
pub fn solve_mfi(constraints: &ConstraintSet, grid: &Grid, seed: u64) -> Result<MfiSolution> {
    solve_mfi_with(constraints, grid, seed, &SolverOptions::default())
}

pub fn solve_mfi_with(
    constraints: &ConstraintSet,
    grid: &Grid,
    seed: u64,
    options: &SolverOptions,
) -> Result<MfiSolution> {
    constraints.validate()?;
    let reach = COVERAGE_WIDTHS * constraints.risk_target.sqrt();
    let (m, r) = (constraints.mean_target, constraints.risk_target);
    if grid.x_min() > m - reach || grid.x_max() < m + reach {
        return Err(MfiError::DomainCoverage(format!(
            "grid [{}, {}] does not cover [{}, {}]",
            grid.x_min(),
            grid.x_max(),
            m - reach,
            m + reach
        )));
    }
    let h = grid.step();
    let problem = Problem { h, r, t: (1..grid.count() - 1).map(|i| grid.x(i) - m).collect() };
    let mu = constraints.gaussian_mu();
    let pre_diag: Vec<f64> = problem.t.iter().map(|t| 16.0 / h + h * (8.0 * mu + 8.0 * mu * mu * t * t)).collect();
    let pre_off = -8.0 / h;
    let pre_apply = |x: &[f64]| -> f64 {
        let n = x.len();
        (0..n)
            .map(|i| {
                let l = if i > 0 { x[i - 1] } else { 0.0 };
                let r = if i + 1 < n { x[i + 1] } else { 0.0 };
                x[i] * (pre_diag[i] * x[i] + pre_off * (l + r))
            })
            .sum()
    };
    let pre: Vec<[f64; 5]> = pre_diag.iter().map(|&d| [0.0, pre_off, d, pre_off, 0.0]).collect();
    let pre = BandedLu::factor(&pre)?;
    let solve = |rhs: &[f64]| {
        let mut x = rhs.to_vec();
        pre.solve(&mut x);
        x
    };

    let mut v = problem.retract(&initial_guess(grid, constraints, seed))?;
    let mut energy = problem.energy(&v);
    let mut trace = Vec::new();
    let mut tau: f64 = 1.0;
    let mut gnorm = f64::INFINITY;
    let mut last_iter = 0;
    for iter in 0..=options.max_iterations {
        last_iter = iter;
        let g = problem.gradient(&v);
        gnorm = problem.projected_gradient_norm(&v, &g);
        if options.record_trace {
            let [a, b, c] = problem.residuals(&v);
            trace.push(TraceRow { iter, fisher: energy, norm_residual: a, mean_residual: b, risk_residual: c });
        }
        if !gnorm.is_finite() {
            break;
        }
        if gnorm < options.tolerance {
            let mut values = Vec::with_capacity(grid.count());
            values.push(0.0);
            values.extend_from_slice(&v);
            values.push(0.0);
            return Ok(MfiSolution {
                psi: GridFunction::from_real(*grid, values)?,
                fisher: energy,
                iterations: iter,
                gradient_norm: gnorm,
                trace,
            });
        }
        if iter == options.max_iterations {
            break;
        }

        let cons: [Vec<f64>; 3] = [
            v.iter().map(|x| 2.0 * h * x).collect(),
            v.iter().zip(&problem.t).map(|(x, t)| 2.0 * h * x * t).collect(),
            v.iter().zip(&problem.t).map(|(x, t)| 2.0 * h * x * t * t).collect(),
        ];
        let z = solve(&g);
        let zc: Vec<Vec<f64>> = cons.iter().map(|c| solve(c)).collect();
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let gram = Matrix3::from_fn(|i, j| dot(&cons[i], &zc[j]));
        let rhs = Vector3::from_fn(|i, _| dot(&cons[i], &z));
        let coef = gram
            .lu()
            .solve(&rhs)
            .ok_or_else(|| MfiError::Contract("degenerate constraint gradients".into()))?;
        let d: Vec<f64> = (0..v.len()).map(|k| z[k] - (0..3).map(|i| coef[i] * zc[i][k]).sum::<f64>()).collect();
        // equals g.d because d is P-orthogonal to the constraint normals
        let slope = pre_apply(&d);
        if !(slope > 0.0) {
            break;
        }

        tau = (2.0 * tau).min(1.0);
        let slack = 64.0 * f64::EPSILON * energy.abs();
        let mut accepted = None;
        for _ in 0..60 {
            let u: Vec<f64> = v.iter().zip(&d).map(|(x, y)| x - tau * y).collect();
            if let Ok(w) = problem.retract(&u) {
                let e = problem.energy(&w);
                if e <= energy - 1e-4 * tau * slope + slack {
                    accepted = Some((w, e));
                    break;
                }
                // below rounding the energy cannot rank steps; use the gradient
                if e - energy <= 1e-12 * energy.abs()
                    && problem.projected_gradient_norm(&w, &problem.gradient(&w)) < 0.9 * gnorm
                {
                    accepted = Some((w, e));
                    break;
                }
            }
            tau *= 0.5;
        }
        match accepted {
            Some((w, e)) => {
                v = w;
                energy = e;
            }
            None => break,
        }
    }
    Err(MfiError::Convergence { iterations: last_iter, residual: gnorm })
}
