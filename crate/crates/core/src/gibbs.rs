//! Eigenstates randomized by the maximum-entropy (geometric) distribution.
//!
//! Maximizing `-sum p_n ln p_n` at fixed mean eigenstate Fisher information
//! gives `p_n = (1 - e^{-d}) e^{-d n}` with `d = 4 beta mu`. The mixture
//! density `f_G = sum p_n psi_n^2` is the Gaussian
//! `sqrt(s mu / pi) exp(-s mu (x-m)^2)` with `s = tanh(d/2)`, so its Fisher
//! information is `2 s mu` and its variance `1 / (2 s mu)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::basis::{self, OscillatorParams};
use crate::error::{MfiError, Result};
use crate::exec::{pairwise_sum, Execution};
use crate::grid::{Grid, GridFunction};

/// Default bound on the probability mass dropped by truncation.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-12;

fn check_d(d: f64) -> Result<()> {
    if !(d.is_finite() && d > 0.0) {
        return Err(MfiError::Domain(format!("d must be positive and finite, got {d}")));
    }
    Ok(())
}

/// `s = (1 - e^{-d}) / (1 + e^{-d}) = tanh(d / 2)`.
pub fn shape_parameter(d: f64) -> f64 {
    (0.5 * d).tanh()
}

/// Smallest `N` with `e^{-d N} <= tolerance`.
pub fn truncation_for_tail(d: f64, tolerance: f64) -> usize {
    ((-tolerance.ln()) / d).ceil().max(1.0) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GibbsEnsemble {
    pub d: f64,
    pub truncation: usize,
    pub s: f64,
    pub params: OscillatorParams,
}

impl GibbsEnsemble {
    /// Truncation chosen so the dropped mass is at most `tail_tolerance`.
    pub fn new(d: f64, params: OscillatorParams, tail_tolerance: f64) -> Result<Self> {
        check_d(d)?;
        if !(tail_tolerance > 0.0 && tail_tolerance < 1.0) {
            return Err(MfiError::Domain(format!("tail tolerance must lie in (0, 1), got {tail_tolerance}")));
        }
        Self::with_truncation(d, params, truncation_for_tail(d, tail_tolerance))
    }

    /// From the Lagrange multiplier `beta`: `d = 4 beta mu`.
    pub fn from_beta(beta: f64, params: OscillatorParams, tail_tolerance: f64) -> Result<Self> {
        Self::new(4.0 * beta * params.mu, params, tail_tolerance)
    }

    pub fn with_truncation(d: f64, params: OscillatorParams, truncation: usize) -> Result<Self> {
        check_d(d)?;
        if truncation == 0 {
            return Err(MfiError::Domain("truncation must be at least 1".into()));
        }
        Ok(Self { d, truncation, s: shape_parameter(d), params })
    }

    pub fn weights(&self) -> Vec<f64> {
        geometric_weights(self.d, self.truncation)
    }

    /// `e^{-d N}`, the mass beyond the truncation.
    pub fn tail_mass(&self) -> f64 {
        (-self.d * self.truncation as f64).exp()
    }

    pub fn fisher(&self) -> f64 {
        gibbs_fisher(self.d, self.params.mu)
    }

    pub fn risk(&self) -> f64 {
        gibbs_risk(self.d, self.params.mu)
    }

    /// Default grid for the mixture density: the ground-state grid of an
    /// oscillator with scale `s mu`.
    pub fn grid(&self, count: usize) -> Grid {
        let widened = OscillatorParams { mu: self.s * self.params.mu, m: self.params.m };
        crate::grid::default_grid_with_count(&widened, 0, count)
    }

    pub fn density_series(&self, grid: Grid) -> GridFunction {
        mixture_density_series_on(Execution::default(), self.d, &self.params, self.truncation, grid)
    }

    pub fn density_closed(&self, grid: Grid) -> GridFunction {
        let (d, params) = (self.d, self.params);
        GridFunction::from_real_fn(grid, move |x| mixture_density_closed(d, &params, x))
            .expect("Gaussian samples are finite")
    }
}

fn geometric_weights(d: f64, n: usize) -> Vec<f64> {
    let head = -(-d).exp_m1();
    (0..n).map(|k| head * (-d * k as f64).exp()).collect()
}

/// `p_n = (1 - e^{-d}) e^{-d n}` for `n = 0..N`.
pub fn gibbs_weights(d: f64, n: usize) -> Result<Vec<f64>> {
    check_d(d)?;
    if n == 0 {
        return Err(MfiError::Domain("need at least one weight".into()));
    }
    Ok(geometric_weights(d, n))
}

/// Truncated mixture density `sum_{n<N} p_n psi_n(x)^2`.
pub fn mixture_density_series(d: f64, params: &OscillatorParams, n: usize, x: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let psi = basis::eigenstates_upto(n - 1, x, params);
    let terms: Vec<f64> = geometric_weights(d, n).iter().zip(&psi).map(|(w, v)| w * v * v).collect();
    pairwise_sum(&terms)
}

/// [`mixture_density_series`] at every grid point.
pub fn mixture_density_series_on(
    exec: Execution,
    d: f64,
    params: &OscillatorParams,
    n: usize,
    grid: Grid,
) -> GridFunction {
    let values = exec.map_indexed(grid.count(), |i| mixture_density_series(d, params, n, grid.x(i)));
    GridFunction::from_real(grid, values).expect("finite series")
}

/// `sqrt(s mu / pi) exp(-s mu (x - m)^2)`.
pub fn mixture_density_closed(d: f64, params: &OscillatorParams, x: f64) -> f64 {
    let a = shape_parameter(d) * params.mu;
    (a / std::f64::consts::PI).sqrt() * (-a * (x - params.m).powi(2)).exp()
}

/// Fisher information of the mixture density, `2 s mu = 2 mu tanh(d/2)`.
pub fn gibbs_fisher(d: f64, mu: f64) -> f64 {
    2.0 * shape_parameter(d) * mu
}

/// Variance of the mixture density, `1 / (2 s mu)`.
pub fn gibbs_risk(d: f64, mu: f64) -> f64 {
    1.0 / (2.0 * shape_parameter(d) * mu)
}

/// Ensemble average of the eigenstate Fisher information,
/// `sum p_n (4n + 2) mu = 2 mu / s`. This is the quantity held fixed by the
/// entropy maximization; it differs from [`gibbs_fisher`], the Fisher
/// information of the mixed density, and the two multiply to `4 mu^2`.
pub fn ensemble_mean_eigen_fisher(d: f64, mu: f64) -> f64 {
    2.0 * mu / shape_parameter(d)
}

/// Which constraints the random perturbations respect.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbationMode {
    /// Total probability and mean eigenstate Fisher information both fixed.
    Constrained,
    /// Only total probability fixed.
    NormalizationOnly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyCheck {
    pub d: f64,
    pub truncation: usize,
    /// Largest relative change `|delta_n| / p_n`.
    pub perturbation_scale: f64,
    pub samples: usize,
    pub seed: u64,
    pub mode: PerturbationMode,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyCheckOutcome {
    pub passed: bool,
    /// Largest entropy change seen over all samples.
    pub max_increase: f64,
}

/// Entropy may not rise by more than this for the check to pass.
pub const ENTROPY_TOLERANCE: f64 = 1e-12;

/// Checks that the geometric weights are a constrained entropy maximum,
/// using 256 constrained perturbations.
pub fn entropy_maximizer_check(d: f64, truncation: usize, perturbation_scale: f64) -> Result<bool> {
    let check = EntropyCheck {
        d,
        truncation,
        perturbation_scale,
        samples: 256,
        seed: 0,
        mode: PerturbationMode::Constrained,
    };
    Ok(run_entropy_check(&check)?.passed)
}

pub fn run_entropy_check(check: &EntropyCheck) -> Result<EntropyCheckOutcome> {
    let p = gibbs_weights(check.d, check.truncation)?;
    if !(check.perturbation_scale > 0.0 && check.perturbation_scale < 1.0) {
        return Err(MfiError::Domain(format!(
            "perturbation scale must lie in (0, 1), got {}",
            check.perturbation_scale
        )));
    }
    let info: Vec<f64> = (0..p.len()).map(|n| (4 * n + 2) as f64).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(check.seed);
    let mut max_increase = f64::NEG_INFINITY;
    for _ in 0..check.samples {
        let raw: Vec<f64> = p.iter().map(|pn| pn * rng.random_range(-1.0..1.0)).collect();
        let delta = project(&raw, &p, &info, check.mode);
        let worst = delta.iter().zip(&p).fold(0.0f64, |m, (dn, pn)| m.max(dn.abs() / pn));
        if worst == 0.0 {
            continue;
        }
        let scale = check.perturbation_scale / worst;
        let change = entropy_change(&p, &delta.iter().map(|dn| dn * scale).collect::<Vec<_>>());
        max_increase = max_increase.max(change);
    }
    Ok(EntropyCheckOutcome { passed: max_increase <= ENTROPY_TOLERANCE, max_increase })
}

// Removes the components of `raw` along p*1 (and p*info) in the p-weighted
// inner product, so that sum(delta) = 0 (and sum(delta * info) = 0).
fn project(raw: &[f64], p: &[f64], info: &[f64], mode: PerturbationMode) -> Vec<f64> {
    let s0: f64 = pairwise_sum(p);
    let r0: f64 = pairwise_sum(raw);
    match mode {
        PerturbationMode::NormalizationOnly => raw.iter().zip(p).map(|(r, pn)| r - pn * r0 / s0).collect(),
        PerturbationMode::Constrained => {
            let s1 = pairwise_sum(&p.iter().zip(info).map(|(a, b)| a * b).collect::<Vec<_>>());
            let s2 = pairwise_sum(&p.iter().zip(info).map(|(a, b)| a * b * b).collect::<Vec<_>>());
            let r1 = pairwise_sum(&raw.iter().zip(info).map(|(a, b)| a * b).collect::<Vec<_>>());
            let det = s0 * s2 - s1 * s1;
            let l0 = (r0 * s2 - r1 * s1) / det;
            let l1 = (s0 * r1 - s1 * r0) / det;
            raw.iter().zip(p).zip(info).map(|((r, pn), i)| r - pn * (l0 + l1 * i)).collect()
        }
    }
}

// H(p + delta) - H(p), term by term:
// -(p+d) ln(p+d) + p ln p = -d ln p - (p+d) ln(1 + d/p).
fn entropy_change(p: &[f64], delta: &[f64]) -> f64 {
    let terms: Vec<f64> =
        p.iter().zip(delta).map(|(pn, dn)| -dn * pn.ln() - (pn + dn) * (dn / pn).ln_1p()).collect();
    pairwise_sum(&terms)
}
