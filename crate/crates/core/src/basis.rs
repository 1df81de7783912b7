//! Hermite polynomials and the normalized harmonic-oscillator eigenfunctions
//!
//! ```text
//! psi_n(x) = (sqrt(mu) / (2^n n! sqrt(pi)))^(1/2) exp(-mu (x-m)^2 / 2) H_n(sqrt(mu) (x-m))
//! ```
//!
//! The eigenfunctions are never built from `H_n` directly. They are produced
//! by the normalized three-term recurrence
//! `psi_{n+1} = sqrt(2 mu / (n+1)) (x-m) psi_n - sqrt(n / (n+1)) psi_{n-1}`,
//! which has no `2^n n!` factor to overflow.

use serde::{Deserialize, Serialize};

use crate::error::{MfiError, Result};

/// Largest eigenstate index the command-line tools accept.
pub const MAX_EIGEN_INDEX: usize = 64;

/// Scale `mu` (inverse-variance units) and center `m` of the oscillator family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorParams {
    pub mu: f64,
    pub m: f64,
}

impl OscillatorParams {
    pub fn new(mu: f64, m: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(MfiError::InvalidParams(format!("mu must be positive and finite, got {mu}")));
        }
        if !m.is_finite() {
            return Err(MfiError::InvalidParams(format!("m must be finite, got {m}")));
        }
        Ok(Self { mu, m })
    }

    /// `mu = 1`, `m = 0`.
    pub fn standard() -> Self {
        Self { mu: 1.0, m: 0.0 }
    }

    pub fn with_mu(mu: f64) -> Result<Self> {
        Self::new(mu, 0.0)
    }
}

/// Dimensionless eigenvalue `n + 1/2`.
pub fn epsilon(n: usize) -> f64 {
    n as f64 + 0.5
}

/// Physicists' Hermite polynomial `H_n(x)` by upward recurrence.
pub fn hermite(n: usize, x: f64) -> Result<f64> {
    let mut prev = 1.0_f64;
    if n == 0 {
        return Ok(prev);
    }
    let mut cur = 2.0 * x;
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    if cur.is_finite() {
        Ok(cur)
    } else {
        Err(MfiError::Range(format!("H_{n}({x}) overflows f64")))
    }
}

/// Values `psi_0(x), .., psi_{n_max}(x)`.
pub fn eigenstates_upto(n_max: usize, x: f64, params: &OscillatorParams) -> Vec<f64> {
    let t = x - params.m;
    let mut out = Vec::with_capacity(n_max + 1);
    let ground = (params.mu / std::f64::consts::PI).powf(0.25) * (-0.5 * params.mu * t * t).exp();
    out.push(ground);
    if n_max == 0 {
        return out;
    }
    let mut prev = ground;
    let mut cur = (2.0 * params.mu).sqrt() * t * ground;
    out.push(cur);
    for n in 1..n_max {
        let nf = n as f64;
        let next = (2.0 * params.mu / (nf + 1.0)).sqrt() * t * cur - (nf / (nf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

/// `psi_n(x)`.
pub fn eigenstate_value(n: usize, x: f64, params: &OscillatorParams) -> f64 {
    eigenstates_upto(n, x, params)[n]
}

/// `d psi_n / dx = -sqrt((n+1) mu / 2) psi_{n+1} + sqrt(n mu / 2) psi_{n-1}`.
pub fn eigenstate_derivative(n: usize, x: f64, params: &OscillatorParams) -> f64 {
    let psi = eigenstates_upto(n + 1, x, params);
    let nf = n as f64;
    let up = -((nf + 1.0) * params.mu / 2.0).sqrt() * psi[n + 1];
    if n == 0 {
        up
    } else {
        up + (nf * params.mu / 2.0).sqrt() * psi[n - 1]
    }
}

/// Residual of the position identity
/// `mu (x-m) psi_n = sqrt((n+1) mu / 2) psi_{n+1} + sqrt(n mu / 2) psi_{n-1}`.
pub fn position_recursion_check(n: usize, x: f64, params: &OscillatorParams) -> f64 {
    let psi = eigenstates_upto(n + 1, x, params);
    let nf = n as f64;
    let lhs = params.mu * (x - params.m) * psi[n];
    let lower = if n == 0 { 0.0 } else { (nf * params.mu / 2.0).sqrt() * psi[n - 1] };
    lhs - ((nf + 1.0) * params.mu / 2.0).sqrt() * psi[n + 1] - lower
}
