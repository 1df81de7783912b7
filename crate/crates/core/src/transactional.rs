//! Fisher information at a fixed risk.
//!
//! In the physical image every strategy shares the oscillator scale `mu`. In
//! the transactional image every strategy shares the variance `r`, and `mu`
//! is eliminated through the state's own variance formula. Because Fisher
//! information scales like `mu` and variance like `1/mu`, the transactional
//! value of any strategy is `(I_F * var) / r`, a Cramer-Rao product over `r`.

use std::cmp::Ordering;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::basis::{epsilon, OscillatorParams};
use crate::error::{MfiError, Result};
use crate::exec::Execution;
use crate::fisher::{closed_form_eigen_fisher, FisherImage};
use crate::gibbs::{gibbs_fisher, gibbs_risk, shape_parameter};
use crate::superposition::{self, fisher_closed, golden_section, variance_closed, SuperpositionSpec};

/// Agreement required between the vertex analysis and the grid search.
pub const TRANSACTIONAL_AGREEMENT: f64 = 1e-9;

/// Relative gap under which neighbouring report entries count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StrategyKind {
    Eigenstate { n: usize },
    Superposition { p: f64, alpha: f64, k_low: usize, k_high: usize },
    Gibbs { d: f64 },
}

impl StrategyKind {
    /// The `(0, 2)` superposition.
    pub fn ground_pair(p: f64, alpha: f64) -> Self {
        StrategyKind::Superposition { p, alpha, k_low: 0, k_high: 2 }
    }

    pub fn label(&self) -> &'static str {
        match self {
            StrategyKind::Eigenstate { .. } => "eigen",
            StrategyKind::Superposition { .. } => "super",
            StrategyKind::Gibbs { .. } => "gibbs",
        }
    }

    /// Parameters as `key=value` pairs separated by spaces.
    pub fn params_string(&self) -> String {
        match self {
            StrategyKind::Eigenstate { n } => format!("n={n}"),
            StrategyKind::Superposition { p, alpha, k_low, k_high } => {
                format!("p={p} alpha={alpha} k={k_low},{k_high}")
            }
            StrategyKind::Gibbs { d } => format!("d={d}"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            StrategyKind::Eigenstate { .. } => Ok(()),
            StrategyKind::Superposition { .. } => self.spec(OscillatorParams::standard()).map(|_| ()),
            StrategyKind::Gibbs { d } => {
                if d.is_finite() && d > 0.0 {
                    Ok(())
                } else {
                    Err(MfiError::Domain(format!("d must be positive and finite, got {d}")))
                }
            }
        }
    }

    // gibbs < superposition < eigenstate, then by parameters
    fn tie_key(&self) -> (u8, [f64; 4]) {
        match *self {
            StrategyKind::Gibbs { d } => (0, [d, 0.0, 0.0, 0.0]),
            StrategyKind::Superposition { p, alpha, k_low, k_high } => (1, [k_low as f64, k_high as f64, p, alpha]),
            StrategyKind::Eigenstate { n } => (2, [n as f64, 0.0, 0.0, 0.0]),
        }
    }

    fn spec(&self, params: OscillatorParams) -> Result<SuperpositionSpec> {
        match *self {
            StrategyKind::Superposition { p, alpha, k_low, k_high } => {
                SuperpositionSpec::new(p, alpha, k_low, k_high, params)
            }
            _ => Err(MfiError::Domain("not a superposition".into())),
        }
    }

    /// Fisher information at scale `mu`.
    pub fn physical_fisher(&self, mu: f64) -> Result<f64> {
        Ok(match *self {
            StrategyKind::Eigenstate { n } => closed_form_eigen_fisher(n, mu),
            StrategyKind::Superposition { .. } => fisher_closed(&self.spec(OscillatorParams::with_mu(mu)?)?),
            StrategyKind::Gibbs { d } => {
                self.validate()?;
                gibbs_fisher(d, mu)
            }
        })
    }

    /// Variance at scale `mu`.
    pub fn variance(&self, mu: f64) -> Result<f64> {
        Ok(match *self {
            StrategyKind::Eigenstate { n } => epsilon(n) / mu,
            StrategyKind::Superposition { .. } => variance_closed(&self.spec(OscillatorParams::with_mu(mu)?)?),
            StrategyKind::Gibbs { d } => {
                self.validate()?;
                gibbs_risk(d, mu)
            }
        })
    }
}

/// A strategy held at fixed risk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyDescriptor {
    pub kind: StrategyKind,
    pub risk: f64,
}

fn check_risk(r: f64) -> Result<()> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(MfiError::Domain(format!("risk must be positive and finite, got {r}")))
    }
}

/// The `mu` at which the strategy's variance equals `desc.risk`.
pub fn mu_for_risk(desc: &StrategyDescriptor) -> Result<f64> {
    check_risk(desc.risk)?;
    desc.kind.validate()?;
    let r = desc.risk;
    Ok(match desc.kind {
        StrategyKind::Eigenstate { n } => (2 * n + 1) as f64 / (2.0 * r),
        StrategyKind::Superposition { .. } => desc.kind.variance(1.0)? / r,
        StrategyKind::Gibbs { d } => 1.0 / (2.0 * shape_parameter(d) * r),
    })
}

/// `(4 / r) eps_n^2 = (2n + 1)^2 / r`.
pub fn transactional_eigen_fisher(n: usize, r: f64) -> f64 {
    let k = (2 * n + 1) as f64;
    k * k / r
}

/// Fixed-risk Fisher information of the `(0, 2)` superposition,
/// `(4 / r) ((p eps_0 + (1-p) eps_2)^2 - 2 cos^2(alpha) p (1-p))`.
pub fn transactional_superposition_fisher(p: f64, alpha: f64, r: f64) -> f64 {
    let e = p * epsilon(0) + (1.0 - p) * epsilon(2);
    let c = alpha.cos();
    4.0 * (e * e - 2.0 * c * c * p * (1.0 - p)) / r
}

/// Fixed-risk Fisher information of any pair: `I_F(mu) var(mu) / r`.
pub fn transactional_pair_fisher(p: f64, alpha: f64, k_low: usize, k_high: usize, r: f64) -> Result<f64> {
    check_risk(r)?;
    let spec = SuperpositionSpec::new(p, alpha, k_low, k_high, OscillatorParams::standard())?;
    if k_low == 0 && k_high == 2 {
        return Ok(transactional_superposition_fisher(p, alpha, r));
    }
    Ok(fisher_closed(&spec) * variance_closed(&spec) / r)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransactionalMinimum {
    pub p_min: f64,
    pub value: f64,
    /// Minimum over `p` for each sampled phase `2 pi j / 64`.
    pub per_alpha: Vec<(f64, f64, f64)>,
    /// Brute-force `(p, alpha)` grid result.
    pub search_p: f64,
    pub search_value: f64,
}

/// Minimizes the fixed-risk Fisher information of the `(0, 2)` pair over
/// `p` for every phase.
///
/// At fixed `c = cos(alpha)` the objective is `(4/r) q(p)` with
/// `q(p) = (4 + 2c^2) p^2 - (10 + 2c^2) p + 25/4`, whose vertex
/// `(5 + c^2) / (4 + 2c^2)` is never below one, so the minimum on `[0, 1]`
/// is at `p = 1` with value `1/r` for every phase. A 2001 x 64 grid search
/// over `(p, alpha)` confirms it.
pub fn transactional_minimum(r: f64) -> Result<TransactionalMinimum> {
    check_risk(r)?;
    let per_alpha: Vec<(f64, f64, f64)> = (0..64)
        .map(|j| {
            let alpha = 2.0 * PI * j as f64 / 64.0;
            let (p, _) = pair_vertex(0, alpha);
            (alpha, p, transactional_superposition_fisher(p, alpha, r))
        })
        .collect();
    let (p_min, value) = per_alpha
        .iter()
        .fold((1.0, f64::INFINITY), |acc, &(_, p, v)| if v < acc.1 { (p, v) } else { acc });

    let rows = Execution::default().map_indexed(64, |j| {
        let alpha = 2.0 * PI * j as f64 / 64.0;
        (0..=2000).fold((f64::INFINITY, 0.0), |acc, i| {
            let p = i as f64 / 2000.0;
            let v = transactional_superposition_fisher(p, alpha, r);
            if v < acc.0 {
                (v, p)
            } else {
                acc
            }
        })
    });
    let (search_value, search_p) =
        rows.iter().fold((f64::INFINITY, 0.0), |acc, &(v, p)| if v < acc.0 { (v, p) } else { acc });
    if (search_value - value).abs() > TRANSACTIONAL_AGREEMENT * value.abs().max(1.0) {
        return Err(MfiError::Contract(format!(
            "fixed-risk minimum: vertex analysis {value} vs grid search {search_value}"
        )));
    }
    Ok(TransactionalMinimum { p_min, value, per_alpha, search_p, search_value })
}

// Minimizer over p in [0, 1] of the fixed-risk objective for the pair
// (k, k + 2) at phase alpha. With S^2 = (k+1)(k+2) the objective is
// proportional to (4 + c^2 S^2) p^2 - (4 eps_{k+2} + c^2 S^2) p + eps_{k+2}^2.
fn pair_vertex(k_low: usize, alpha: f64) -> (f64, f64) {
    let c2 = alpha.cos().powi(2);
    let s2 = ((k_low + 1) * (k_low + 2)) as f64;
    let e = epsilon(k_low + 2);
    let a = 4.0 + c2 * s2;
    let b = 4.0 * e + c2 * s2;
    let p = (b / (2.0 * a)).clamp(0.0, 1.0);
    (p, a * p * p - b * p + e * e)
}

/// Fixed-risk minimum `(p, alpha, value)` for any pair. The best phase is
/// always `alpha = 0`: the cross term only lowers the variance product.
pub fn transactional_pair_minimum(k_low: usize, k_high: usize, r: f64) -> Result<(f64, f64, f64)> {
    check_risk(r)?;
    SuperpositionSpec::new(1.0, 0.0, k_low, k_high, OscillatorParams::standard())?;
    if k_high == k_low + 2 {
        let (p, q) = pair_vertex(k_low, 0.0);
        return Ok((p, 0.0, 4.0 * q / r));
    }
    let f = |p: f64| transactional_pair_fisher(p, 0.0, k_low, k_high, r).unwrap_or(f64::INFINITY);
    let n: usize = 2000;
    let best = (0..=n).min_by(|&a, &b| f(a as f64 / n as f64).total_cmp(&f(b as f64 / n as f64))).unwrap_or(n);
    let lo = (best.saturating_sub(1)) as f64 / n as f64;
    let hi = ((best + 1).min(n)) as f64 / n as f64;
    let (p, v) = golden_section(&f, lo, hi, 1e-13);
    let (p, v) = [(p, v), (lo, f(lo)), (hi, f(hi))].into_iter().fold((p, v), |acc, c| if c.1 < acc.1 { c } else { acc });
    Ok((p, 0.0, v))
}

/// How superpositions are evaluated in an ordering report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuperpositionMode {
    /// At the `p` and `alpha` given by the caller.
    #[default]
    CallerFixed,
    /// At the minimizer of the requested image.
    OwnMinimizer,
}

/// The common parameter of an image: `mu` (physical) or `r` (transactional).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CommonScale {
    pub mu: Option<f64>,
    pub risk: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankedStrategy {
    /// Strategy as evaluated (superpositions carry the `p`, `alpha` used).
    pub kind: StrategyKind,
    pub image: FisherImage,
    /// `mu` in the physical image, `r` in the transactional one.
    pub mu_or_r: f64,
    pub fisher: f64,
    /// Variance of the strategy.
    pub risk: f64,
    /// `var * I_F / 4`: expected squared displacement times expected
    /// `-d^2/dx^2`; independent of `mu`.
    pub product: f64,
    pub tied_with_previous: bool,
}

fn common_value(image: FisherImage, scale: CommonScale) -> Result<f64> {
    let (wanted, other, name) = match image {
        FisherImage::Physical => (scale.mu, scale.risk, "mu"),
        FisherImage::Transactional => (scale.risk, scale.mu, "r"),
    };
    if other.is_some() {
        return Err(MfiError::Config(format!("{image} image takes only a common {name}; both mu and r were given")));
    }
    let v = wanted.ok_or_else(|| MfiError::Config(format!("{image} image needs a common {name}")))?;
    if !(v.is_finite() && v > 0.0) {
        return Err(MfiError::Config(format!("common {name} must be positive and finite, got {v}")));
    }
    Ok(v)
}

fn evaluate(kind: StrategyKind, image: FisherImage, value: f64, mode: SuperpositionMode) -> Result<RankedStrategy> {
    kind.validate()?;
    let kind = match (kind, mode) {
        (StrategyKind::Superposition { k_low, k_high, .. }, SuperpositionMode::OwnMinimizer) => {
            let (p, alpha) = match image {
                FisherImage::Physical => {
                    let m = superposition::minimize_fisher(k_low, k_high, value)?;
                    (m.p_min, m.alpha_min)
                }
                FisherImage::Transactional => {
                    let (p, alpha, _) = transactional_pair_minimum(k_low, k_high, value)?;
                    (p, alpha)
                }
            };
            StrategyKind::Superposition { p, alpha, k_low, k_high }
        }
        _ => kind,
    };
    let (fisher, risk) = match image {
        FisherImage::Physical => (kind.physical_fisher(value)?, kind.variance(value)?),
        FisherImage::Transactional => {
            let fisher = match kind {
                StrategyKind::Eigenstate { n } => transactional_eigen_fisher(n, value),
                StrategyKind::Superposition { p, alpha, k_low, k_high } => {
                    transactional_pair_fisher(p, alpha, k_low, k_high, value)?
                }
                StrategyKind::Gibbs { .. } => 1.0 / value,
            };
            (fisher, value)
        }
    };
    Ok(RankedStrategy {
        kind,
        image,
        mu_or_r: value,
        fisher,
        risk,
        product: 0.25 * fisher * risk,
        tied_with_previous: false,
    })
}

fn compare(a: &RankedStrategy, b: &RankedStrategy) -> Ordering {
    a.fisher.total_cmp(&b.fisher).then_with(|| {
        let (ra, ka) = a.kind.tie_key();
        let (rb, kb) = b.kind.tie_key();
        ra.cmp(&rb).then_with(|| {
            ka.iter().zip(&kb).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
        })
    })
}

/// Strategies sorted by ascending Fisher information in the requested image.
///
/// Ties (exact, or within [`TIE_TOLERANCE`] relative) are ordered gibbs,
/// superposition, eigenstate and then by parameters.
pub fn ordering_report(
    strategies: &[StrategyKind],
    image: FisherImage,
    scale: CommonScale,
    mode: SuperpositionMode,
) -> Result<Vec<RankedStrategy>> {
    ordering_report_with(Execution::default(), strategies, image, scale, mode)
}

pub fn ordering_report_with(
    exec: Execution,
    strategies: &[StrategyKind],
    image: FisherImage,
    scale: CommonScale,
    mode: SuperpositionMode,
) -> Result<Vec<RankedStrategy>> {
    let value = common_value(image, scale)?;
    let mut rows =
        exec.map_slice(strategies, |&k| evaluate(k, image, value, mode)).into_iter().collect::<Result<Vec<_>>>()?;
    // Snap near-ties onto the smaller value's bucket before sorting so the
    // kind order decides them.
    rows.sort_by(|a, b| a.fisher.total_cmp(&b.fisher));
    let mut bucket = Vec::with_capacity(rows.len());
    let mut anchor = f64::NAN;
    for r in &rows {
        if !(anchor.is_finite() && (r.fisher - anchor).abs() <= TIE_TOLERANCE * anchor.abs().max(r.fisher.abs())) {
            anchor = r.fisher;
        }
        bucket.push(anchor);
    }
    let mut keyed: Vec<(f64, RankedStrategy)> = bucket.into_iter().zip(rows).collect();
    keyed.sort_by(|(ba, a), (bb, b)| ba.total_cmp(bb).then_with(|| compare(a, b)));
    let mut out: Vec<RankedStrategy> = Vec::with_capacity(keyed.len());
    let mut prev_bucket = f64::NAN;
    for (b, mut r) in keyed {
        r.tied_with_previous = b == prev_bucket;
        prev_bucket = b;
        out.push(r);
    }
    Ok(out)
}
