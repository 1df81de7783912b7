//! Two-state superpositions `sqrt(p) psi_low + exp(i alpha) sqrt(1-p) psi_high`.
//!
//! Only pairs two quanta apart interfere in the Fisher information and the
//! second moment; for `(0, 2)` the physical-image minimum sits at
//! `p = 1/2 + 1/sqrt(6)`, `alpha = 0`, with value `(6 - 2 sqrt 6) mu`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{self, OscillatorParams};
use crate::error::{MfiError, Result};
use crate::exec::Execution;
use crate::fisher::{closed_form_eigen_fisher, gradient_element, risk_element};
use crate::grid::{Grid, GridFunction};

/// Agreement required between the analytic minimizer and the search.
pub const MINIMIZER_AGREEMENT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuperpositionSpec {
    /// Weight of the lower state.
    pub p: f64,
    /// Relative phase of the upper state.
    pub alpha: f64,
    pub k_low: usize,
    pub k_high: usize,
    pub params: OscillatorParams,
}

impl SuperpositionSpec {
    pub fn new(p: f64, alpha: f64, k_low: usize, k_high: usize, params: OscillatorParams) -> Result<Self> {
        let spec = Self { p, alpha, k_low, k_high, params };
        spec.validate()?;
        Ok(spec)
    }

    /// The `(0, 2)` pair.
    pub fn ground_pair(p: f64, alpha: f64, params: OscillatorParams) -> Result<Self> {
        Self::new(p, alpha, 0, 2, params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(MfiError::Domain(format!("p must lie in [0, 1], got {}", self.p)));
        }
        if !self.alpha.is_finite() {
            return Err(MfiError::Domain(format!("alpha must be finite, got {}", self.alpha)));
        }
        if self.k_low >= self.k_high {
            return Err(MfiError::Domain(format!(
                "need k_low < k_high, got ({}, {})",
                self.k_low, self.k_high
            )));
        }
        Ok(())
    }

    /// Whether the pair couples through the two-step band of `v` and `w`.
    pub fn interferes(&self) -> bool {
        self.k_high == self.k_low + 2
    }

    fn cross_weight(&self) -> f64 {
        2.0 * (self.p * (1.0 - self.p)).sqrt() * self.alpha.cos()
    }
}

/// Finite coefficient vector over the eigenbasis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    coefficients: Vec<Complex64>,
    params: OscillatorParams,
}

impl StateVector {
    pub fn new(coefficients: Vec<Complex64>, params: OscillatorParams) -> Result<Self> {
        let norm: f64 = coefficients.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(MfiError::Normalization { integral: norm, tolerance: 1e-12 });
        }
        Ok(Self { coefficients, params })
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn params(&self) -> &OscillatorParams {
        &self.params
    }

    fn quadratic_form(&self, element: impl Fn(usize, usize) -> f64) -> f64 {
        let c = &self.coefficients;
        let mut acc = 0.0;
        for j in 0..c.len() {
            for k in 0..c.len() {
                acc += (c[j].conj() * c[k]).re * element(j, k);
            }
        }
        acc
    }

    /// `4 integral |psi'|^2` from the gradient matrix.
    pub fn fisher(&self) -> f64 {
        self.quadratic_form(|j, k| gradient_element(j, k, self.params.mu))
    }

    /// `integral (x - m) |psi|^2`.
    pub fn mean_offset(&self) -> f64 {
        let mu = self.params.mu;
        self.quadratic_form(|j, k| if j.abs_diff(k) == 1 { (j.max(k) as f64 / (2.0 * mu)).sqrt() } else { 0.0 })
    }

    /// `integral (x - m)^2 |psi|^2`.
    pub fn second_moment(&self) -> f64 {
        self.quadratic_form(|j, k| risk_element(j, k, self.params.mu))
    }

    pub fn variance(&self) -> f64 {
        self.second_moment() - self.mean_offset().powi(2)
    }

    /// Samples the state on `grid`.
    pub fn synthesize(&self, grid: Grid) -> GridFunction {
        self.synthesize_with(Execution::default(), grid)
    }

    pub fn synthesize_with(&self, exec: Execution, grid: Grid) -> GridFunction {
        let n_max = self.coefficients.len().saturating_sub(1);
        GridFunction::from_fn_with(exec, grid, |x| {
            basis::eigenstates_upto(n_max, x, &self.params)
                .iter()
                .zip(&self.coefficients)
                .map(|(psi, c)| c * psi)
                .sum()
        })
        .expect("finite coefficients give finite samples")
    }
}

/// Coefficient vector `sqrt(p)` at `k_low`, `exp(i alpha) sqrt(1-p)` at `k_high`.
pub fn superpose(spec: &SuperpositionSpec) -> Result<StateVector> {
    spec.validate()?;
    let mut coefficients = vec![Complex64::new(0.0, 0.0); spec.k_high + 1];
    coefficients[spec.k_low] = Complex64::new(spec.p.sqrt(), 0.0);
    coefficients[spec.k_high] = Complex64::from_polar((1.0 - spec.p).sqrt(), spec.alpha);
    Ok(StateVector { coefficients, params: spec.params })
}

/// `p I_low + (1-p) I_high + 2 sqrt(p(1-p)) cos(alpha) w_{low,high}`.
pub fn fisher_closed(spec: &SuperpositionSpec) -> f64 {
    let mu = spec.params.mu;
    spec.p * closed_form_eigen_fisher(spec.k_low, mu)
        + (1.0 - spec.p) * closed_form_eigen_fisher(spec.k_high, mu)
        + spec.cross_weight() * gradient_element(spec.k_low, spec.k_high, mu)
}

/// Variance of `|psi|^2`: the second moment about `m` from the risk matrix,
/// less the squared mean shift that adjacent pairs (`k_high = k_low + 1`)
/// pick up. For every other pair the mean stays at `m`.
pub fn variance_closed(spec: &SuperpositionSpec) -> f64 {
    let mu = spec.params.mu;
    let second = spec.p * risk_element(spec.k_low, spec.k_low, mu)
        + (1.0 - spec.p) * risk_element(spec.k_high, spec.k_high, mu)
        + spec.cross_weight() * risk_element(spec.k_low, spec.k_high, mu);
    let shift = if spec.k_high == spec.k_low + 1 {
        spec.cross_weight() * (spec.k_high as f64 / (2.0 * mu)).sqrt()
    } else {
        0.0
    };
    second - shift * shift
}

/// Minimum of [`fisher_closed`] over `p` in `[0, 1]` and `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FisherMinimum {
    pub p_min: f64,
    /// Normalized to `[0, pi]`.
    pub alpha_min: f64,
    pub value: f64,
    /// Derivative-free search result used as the cross-check.
    pub search_p: f64,
    pub search_value: f64,
}

/// Minimizes the superposition Fisher information for a pair.
///
/// With cross coefficient `W = w_{low,high}` the function of `p` at the best
/// phase is `p A + (1-p) B - 2 |W| sqrt(p(1-p))`, whose minimum is the lower
/// eigenvalue of `[[A, W], [W, B]]`; `p` is the squared first component of
/// its eigenvector. For `(0, 2)` that is the root of `12 p^2 - 12 p + 1 = 0`
/// above one half. A golden-section search over a half period of phases
/// confirms the value.
pub fn minimize_fisher(k_low: usize, k_high: usize, mu: f64) -> Result<FisherMinimum> {
    let params = OscillatorParams::with_mu(mu)?;
    let probe = SuperpositionSpec::new(1.0, 0.0, k_low, k_high, params)?;
    let a = closed_form_eigen_fisher(k_low, mu);
    let b = closed_form_eigen_fisher(k_high, mu);
    let w = gradient_element(k_low, k_high, mu);

    let (p_min, alpha_min, value) = if w == 0.0 {
        if a <= b {
            (1.0, 0.0, a)
        } else {
            (0.0, 0.0, b)
        }
    } else {
        let half_gap = 0.5 * (b - a);
        let radius = half_gap.hypot(w);
        let p = 0.5 + 0.5 * half_gap / radius;
        let alpha = if w < 0.0 { 0.0 } else { PI };
        (p, alpha, 0.5 * (a + b) - radius)
    };

    let objective = |p: f64, alpha: f64| fisher_closed(&SuperpositionSpec { p, alpha, ..probe });
    let mut best = (f64::INFINITY, 0.0);
    for i in 0..=64 {
        let alpha = PI * i as f64 / 64.0;
        let f = |p: f64| objective(p, alpha);
        for (p, v) in [golden_section(&f, 0.0, 1.0, 1e-12), (0.0, f(0.0)), (1.0, f(1.0))] {
            if v < best.0 {
                best = (v, p);
            }
        }
    }
    let (search_value, search_p) = best;
    if (search_value - value).abs() > MINIMIZER_AGREEMENT * value.abs().max(1.0) {
        return Err(MfiError::Contract(format!(
            "superposition minimum: closed form {value} vs search {search_value}"
        )));
    }
    Ok(FisherMinimum { p_min, alpha_min, value, search_p, search_value })
}

/// Golden-section minimization of a unimodal `f` on `[lo, hi]`.
pub(crate) fn golden_section(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// One sample of the two Figure 1 curves, in units of `4 mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Figure1Row {
    pub p: f64,
    #[serde(rename = "IF_alpha0_over_4mu")]
    pub in_phase: f64,
    #[serde(rename = "IF_alphahalfpi_over_4mu")]
    pub quadrature: f64,
}

impl Figure1Row {
    pub const HEADER: [&'static str; 3] = ["p", "IF_alpha0_over_4mu", "IF_alphahalfpi_over_4mu"];
}

/// `I_F(p, 0)` and `I_F(p, pi/2)` for the `(0, 2)` pair on `p_count`
/// uniformly spaced `p` in `[0, 1]`.
pub fn figure1_scan(mu: f64, p_count: usize) -> Result<Vec<Figure1Row>> {
    figure1_scan_with(Execution::default(), mu, p_count)
}

pub fn figure1_scan_with(exec: Execution, mu: f64, p_count: usize) -> Result<Vec<Figure1Row>> {
    let params = OscillatorParams::with_mu(mu)?;
    if p_count < 2 {
        return Err(MfiError::Domain(format!("need at least 2 samples, got {p_count}")));
    }
    let unit = 4.0 * mu;
    Ok(exec.map_indexed(p_count, |i| {
        let p = if i + 1 == p_count { 1.0 } else { i as f64 / (p_count - 1) as f64 };
        let at = |alpha| fisher_closed(&SuperpositionSpec { p, alpha, k_low: 0, k_high: 2, params }) / unit;
        Figure1Row { p, in_phase: at(0.0), quadrature: at(PI / 2.0) }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fisher::{fisher_of_amplitude, moments};
    use crate::grid::default_grid_for;

    fn unit() -> OscillatorParams {
        OscillatorParams::standard()
    }

    #[test]
    fn superpose_examples() {
        let s = superpose(&SuperpositionSpec::ground_pair(1.0, 2.0, unit()).unwrap()).unwrap();
        assert_eq!(s.coefficients()[0], Complex64::new(1.0, 0.0));
        assert!(s.coefficients()[2].norm() == 0.0);

        let h = 0.5f64.sqrt();
        let s = superpose(&SuperpositionSpec::ground_pair(0.5, 0.0, unit()).unwrap()).unwrap();
        assert_eq!(s.coefficients(), &[Complex64::new(h, 0.0), Complex64::new(0.0, 0.0), Complex64::new(h, 0.0)]);

        let s = superpose(&SuperpositionSpec::ground_pair(0.5, PI, unit()).unwrap()).unwrap();
        assert!((s.coefficients()[2] - Complex64::new(-h, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn invalid_specs() {
        assert!(SuperpositionSpec::ground_pair(1.2, 0.0, unit()).is_err());
        assert!(SuperpositionSpec::ground_pair(-0.1, 0.0, unit()).is_err());
        assert!(SuperpositionSpec::new(0.5, 0.0, 2, 2, unit()).is_err());
        let bad = SuperpositionSpec { p: 1.5, alpha: 0.0, k_low: 0, k_high: 2, params: unit() };
        assert!(matches!(superpose(&bad), Err(MfiError::Domain(_))));
    }

    #[test]
    fn fisher_closed_examples() {
        let at = |p, alpha| fisher_closed(&SuperpositionSpec::ground_pair(p, alpha, unit()).unwrap());
        assert_eq!(at(1.0, 0.0), 2.0);
        let p_min = 0.5 + 6f64.powf(-0.5);
        assert!((at(p_min, 0.0) - (6.0 - 2.0 * 6f64.sqrt())).abs() < 1e-12);
        assert!((at(0.4, PI / 2.0) - 6.8).abs() < 1e-12);
    }

    #[test]
    fn variance_closed_examples() {
        let at = |p, alpha| variance_closed(&SuperpositionSpec::ground_pair(p, alpha, unit()).unwrap());
        assert_eq!(at(1.0, 0.3), 0.5);
        let p_min = 0.5 + 6f64.powf(-0.5);
        assert!((at(p_min, 0.0) - (1.5 - 6f64.powf(-0.5))).abs() < 1e-12);
        assert!((at(0.5, PI / 2.0) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn closed_forms_match_state_vector() {
        for &(lo, hi) in &[(0, 1), (0, 2), (1, 3), (2, 5)] {
            for &p in &[0.0, 0.2, 0.77, 1.0] {
                for &alpha in &[0.0, 1.1, PI, 5.0] {
                    let spec = SuperpositionSpec::new(p, alpha, lo, hi, OscillatorParams::with_mu(1.7).unwrap()).unwrap();
                    let s = superpose(&spec).unwrap();
                    assert!((s.fisher() - fisher_closed(&spec)).abs() < 1e-12);
                    assert!((s.variance() - variance_closed(&spec)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn closed_forms_match_grid_quadrature() {
        let pairs = [(0, 2), (0, 1)];
        let ps = [0.0, 0.25, 0.5, 0.9082482904638630, 1.0];
        let alphas = [0.0, 0.9, PI / 2.0, 2.5, PI];
        for &(lo, hi) in &pairs {
            let params = OscillatorParams::new(1.4, 0.6).unwrap();
            let grid = default_grid_for(&params, hi);
            for &p in &ps {
                for &alpha in &alphas {
                    let spec = SuperpositionSpec::new(p, alpha, lo, hi, params).unwrap();
                    let psi = superpose(&spec).unwrap().synthesize(grid);
                    let f = fisher_of_amplitude(&psi).unwrap();
                    let var = moments(&psi.abs_sq()).variance;
                    let (fc, vc) = (fisher_closed(&spec), variance_closed(&spec));
                    assert!(((f - fc) / fc).abs() < 1e-8, "fisher {lo},{hi} p={p} a={alpha}");
                    assert!(((var - vc) / vc).abs() < 1e-8, "var {lo},{hi} p={p} a={alpha}");
                }
            }
        }
    }

    #[test]
    fn minimize_ground_pair() {
        let m = minimize_fisher(0, 2, 1.0).unwrap();
        assert!((m.p_min - 0.9082483).abs() < 1e-6);
        assert_eq!(m.alpha_min, 0.0);
        assert!((m.value - 1.1010205).abs() < 1e-6);
        assert!((m.value - (6.0 - 2.0 * 6f64.sqrt())).abs() < 1e-14);
        // root of 12 p^2 - 12 p + 1
        assert!((12.0 * m.p_min * m.p_min - 12.0 * m.p_min + 1.0).abs() < 1e-12);
        assert!((m.search_value - m.value).abs() < 1e-9);
        assert!((m.search_p - m.p_min).abs() < 1e-6);
    }

    #[test]
    fn minimize_scales_with_mu() {
        let m = minimize_fisher(0, 2, 2.5).unwrap();
        assert!((m.value - 2.5 * (6.0 - 2.0 * 6f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn minimize_non_interfering_pair() {
        let m = minimize_fisher(0, 1, 1.0).unwrap();
        assert_eq!((m.p_min, m.value), (1.0, 2.0));
    }

    #[test]
    fn minimize_excited_pair_against_grid_search() {
        let m = minimize_fisher(1, 3, 1.0).unwrap();
        assert!(m.value < 6.0);
        let params = unit();
        let mut brute = f64::INFINITY;
        for i in 0..=2000 {
            for j in 0..64 {
                let spec = SuperpositionSpec {
                    p: i as f64 / 2000.0,
                    alpha: 2.0 * PI * j as f64 / 64.0,
                    k_low: 1,
                    k_high: 3,
                    params,
                };
                brute = brute.min(fisher_closed(&spec));
            }
        }
        assert!(brute >= m.value - 1e-12 && brute - m.value < 1e-5);
    }

    #[test]
    fn figure1_endpoints_and_shape() {
        let rows = figure1_scan(1.0, 101).unwrap();
        assert_eq!(rows.len(), 101);
        let (first, last) = (rows[0], rows[100]);
        assert_eq!((first.p, first.in_phase, first.quadrature), (0.0, 2.5, 2.5));
        assert_eq!((last.p, last.in_phase, last.quadrature), (1.0, 0.5, 0.5));
        for r in &rows {
            assert!((r.quadrature - (2.5 - 2.0 * r.p)).abs() < 1e-12);
            assert!(r.in_phase <= r.quadrature + 1e-15);
        }
        assert!(figure1_scan(1.0, 1).is_err());
    }

    #[test]
    fn figure1_sequential_equals_parallel() {
        let a = figure1_scan_with(Execution::Sequential, 1.3, 513).unwrap();
        let b = figure1_scan_with(Execution::Parallel, 1.3, 513).unwrap();
        assert_eq!(a, b);
    }
}
