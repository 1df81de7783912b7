use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use mfi_core::fisher::{
    closed_form_eigen_fisher, cramer_rao_product, fisher_of_amplitude, fisher_of_density, gradient_matrix_w,
    min_eigenvalue, risk_matrix_v, DEFAULT_DENSITY_FLOOR,
};
use mfi_core::fourier::fourier_transform;
use mfi_core::gibbs::{gibbs_fisher, gibbs_risk, GibbsEnsemble, DEFAULT_TAIL_TOLERANCE};
use mfi_core::grid::{default_grid_for, integrate, Grid};
use mfi_core::superposition::{figure1_scan, fisher_closed, minimize_fisher, superpose, variance_closed, SuperpositionSpec};
use mfi_core::transactional::{
    ordering_report, transactional_eigen_fisher, transactional_minimum, CommonScale, StrategyKind, SuperpositionMode,
};
use mfi_core::variational::{discrete_spectrum, solve_mfi, ConstraintSet};
use mfi_core::{Complex64, FisherImage, GridFunction, OscillatorParams};

type Check = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn p_min_exact() -> f64 {
    0.5 + 1.0 / 6f64.sqrt()
}

fn eigenstate_fisher() -> Check {
    let mut worst = 0.0_f64;
    for mu in [0.5, 1.0, 2.0] {
        let params = OscillatorParams::with_mu(mu).map_err(err)?;
        for n in 0..=20 {
            let psi = GridFunction::eigenstate(default_grid_for(&params, n), n, &params);
            let exact = closed_form_eigen_fisher(n, mu);
            let rel = (fisher_of_amplitude(&psi).map_err(err)? - exact).abs() / exact;
            worst = worst.max(rel);
        }
    }
    ensure(worst <= 1e-8, format!("max relative error {worst:.2e} over n<=20, mu in {{0.5,1,2}} (limit 1e-8)"))
}

fn superposition_minimum() -> Check {
    let m = minimize_fisher(0, 2, 1.0).map_err(err)?;
    let dp = (m.p_min - 0.9082483).abs();
    let dv = (m.value - 1.1010205).abs();
    ensure(
        dp <= 1e-6 && dv <= 1e-6 && m.value < 2.0,
        format!("p_min {:.9} (|diff| {dp:.1e}), value {:.9} (|diff| {dv:.1e}), below ground value 2", m.p_min, m.value),
    )
}

fn figure_one() -> Check {
    let rows = figure1_scan(1.0, 10001).map_err(err)?;
    let (first, last) = (rows[0], rows[rows.len() - 1]);
    let ends = [first.in_phase - 2.5, first.quadrature - 2.5, last.in_phase - 0.5, last.quadrature - 0.5]
        .iter()
        .fold(0.0_f64, |a, v| a.max(v.abs()));
    let affine = rows.iter().map(|r| (r.quadrature - (2.5 - 2.0 * r.p)).abs()).fold(0.0_f64, f64::max);
    let best = rows.iter().min_by(|a, b| a.in_phase.total_cmp(&b.in_phase)).ok_or("empty scan")?;
    let reference = minimize_fisher(0, 2, 1.0).map_err(err)?.value;
    let dmin = (4.0 * best.in_phase - reference).abs();
    ensure(
        ends <= 1e-12 && affine <= 1e-12 && dmin <= 1e-6,
        format!(
            "endpoint error {ends:.1e}, quadrature-curve affine deviation {affine:.1e} (limit 1e-12), sampled minimum {:.8} at p={:.4} vs {reference:.8} (|diff| {dmin:.1e})",
            best.in_phase, best.p
        ),
    )
}

fn no_interference() -> Check {
    let params = OscillatorParams::standard();
    let f = |p: f64, a: f64| SuperpositionSpec::new(p, a, 0, 1, params).map(|s| fisher_closed(&s));
    let (mut spread, mut affine) = (0.0_f64, 0.0_f64);
    let (f0, f1) = (f(0.0, 0.0).map_err(err)?, f(1.0, 0.0).map_err(err)?);
    for i in 0..=20 {
        let p = i as f64 / 20.0;
        let values = (0..64).map(|j| f(p, 2.0 * PI * j as f64 / 64.0)).collect::<Result<Vec<_>, _>>().map_err(err)?;
        let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
        spread = spread.max(hi - lo);
        affine = affine.max((values[0] - (p * f1 + (1.0 - p) * f0)).abs());
    }
    ensure(
        spread <= 1e-12 && affine <= 1e-12,
        format!("phase spread {spread:.1e} over 64 phases, affine deviation {affine:.1e} (limit 1e-12)"),
    )
}

fn fixed_variance() -> Check {
    let m = minimize_fisher(0, 2, 1.0).map_err(err)?;
    let spec = SuperpositionSpec::ground_pair(m.p_min, 0.0, OscillatorParams::standard()).map_err(err)?;
    let product = fisher_closed(&spec) * variance_closed(&spec);
    let target = 11.0 - 4.0 * 6f64.sqrt();
    let d = (product - target).abs();
    ensure(d <= 1e-6 && product > 1.0, format!("I_F * var = {product:.9} vs 11-4*sqrt(6) = {target:.9} (|diff| {d:.1e}), above 1"))
}

fn gibbs_closed_form() -> Check {
    let params = OscillatorParams::standard();
    let (mut sup, mut fisher_rel, mut product) = (0.0_f64, 0.0_f64, 0.0_f64);
    for d in [0.5, 1.0, 2.0] {
        let ens = GibbsEnsemble::new(d, params, DEFAULT_TAIL_TOLERANCE).map_err(err)?;
        if ens.tail_mass() > 1e-12 {
            return Err(format!("tail bound {} above 1e-12 at d={d}", ens.tail_mass()));
        }
        let grid = ens.grid(4096);
        let series = ens.density_series(grid);
        let closed = ens.density_closed(grid);
        sup = sup.max(series.values().iter().zip(closed.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max));
        let fisher = fisher_of_density(&closed, DEFAULT_DENSITY_FLOOR).map_err(err)?;
        fisher_rel = fisher_rel.max((fisher - ens.fisher()).abs() / ens.fisher());
        product = product.max((gibbs_fisher(d, 1.0) * gibbs_risk(d, 1.0) - 1.0).abs());
    }
    ensure(
        sup <= 1e-10 && fisher_rel <= 1e-6 && product <= f64::EPSILON,
        format!(
            "series sup error {sup:.1e} (limit 1e-10), density Fisher relative error {fisher_rel:.1e} (limit 1e-6), |I_FG*r_G - 1| = {product:.1e}"
        ),
    )
}

fn transactional_identities() -> Check {
    for r in [0.5, 1.0, 2.0] {
        for n in 0..=20 {
            let k = (2 * n + 1) as f64;
            if transactional_eigen_fisher(n, r) != k * k / r {
                return Err(format!("eigenstate {n} at r={r} is not (2n+1)^2/r"));
            }
        }
    }
    let mut worst = 0.0_f64;
    for r in [0.5, 1.0, 2.0] {
        let m = transactional_minimum(r).map_err(err)?;
        if m.p_min != 1.0 || (m.value - 1.0 / r).abs() > 1e-12 / r {
            return Err(format!("r={r}: minimum ({}, {}) instead of (1, {})", m.p_min, m.value, 1.0 / r));
        }
        worst = worst.max((m.search_value - m.value).abs());
    }
    ensure(worst <= 1e-6, format!("(2n+1)^2/r exact for n<=20; minima (1, 1/r) with grid-search gap {worst:.1e} (limit 1e-6)"))
}

fn order_divergence() -> Check {
    let set = [
        StrategyKind::Eigenstate { n: 0 },
        StrategyKind::ground_pair(p_min_exact(), 0.0),
        StrategyKind::Gibbs { d: 1.0 },
    ];
    let physical =
        ordering_report(&set, FisherImage::Physical, CommonScale { mu: Some(1.0), risk: None }, SuperpositionMode::CallerFixed)
            .map_err(err)?;
    let labels: Vec<_> = physical.iter().map(|r| r.kind.label()).collect();
    let strict = physical.windows(2).all(|w| w[0].fisher < w[1].fisher);
    if labels != ["gibbs", "super", "eigen"] || !strict {
        return Err(format!("physical order {labels:?}"));
    }
    for r in [0.5, 1.0, 2.0] {
        let scale = CommonScale { mu: None, risk: Some(r) };
        let rep = ordering_report(&set, FisherImage::Transactional, scale, SuperpositionMode::OwnMinimizer).map_err(err)?;
        if !rep.iter().all(|x| (x.fisher - 1.0 / r).abs() <= 1e-12 / r) || !rep[1..].iter().all(|x| x.tied_with_previous) {
            return Err(format!("no transactional tie at r={r}: {:?}", rep.iter().map(|x| x.fisher).collect::<Vec<_>>()));
        }
    }
    ensure(
        true,
        format!(
            "physical: gibbs {:.6} < super {:.6} < ground {:.6}; transactional: three-way tie at 1/r for r in {{0.5,1,2}}",
            physical[0].fisher, physical[1].fisher, physical[2].fisher
        ),
    )
}

fn variational_recovery() -> Check {
    let grid = Grid::new(-12.0, 12.0, 2048).map_err(err)?;
    let spectrum = discrete_spectrum(&grid, 1.0, 0.0, 6).map_err(err)?;
    let eps_err = spectrum.iter().enumerate().map(|(n, e)| (e.epsilon - (n as f64 + 0.5)).abs()).fold(0.0_f64, f64::max);
    let mut cross = 0.0_f64;
    for e in &spectrum {
        cross = cross.max((fisher_of_amplitude(&e.psi).map_err(err)? - 4.0 * e.epsilon).abs());
    }
    let mut overlap = f64::INFINITY;
    let mut fisher_rel = 0.0_f64;
    for r in [0.5, 2.0] {
        let sol = solve_mfi(&ConstraintSet::new(0.0, r).map_err(err)?, &grid, 0).map_err(err)?;
        let params = OscillatorParams::with_mu(0.5 / r).map_err(err)?;
        let exact = GridFunction::eigenstate(grid, 0, &params);
        overlap = overlap.min(integrate(&sol.psi.conj_mul(&exact).map_err(err)?).norm());
        fisher_rel = fisher_rel.max((fisher_of_amplitude(&sol.psi).map_err(err)? * r - 1.0).abs());
    }
    ensure(
        eps_err <= 1e-4 && cross <= 1e-4 && overlap >= 0.999 && fisher_rel <= 0.01,
        format!(
            "max |eps_n - (n+1/2)| {eps_err:.1e} (limit 1e-4), |4 mu eps_n - I_F| {cross:.1e} (limit 1e-4), solver overlap {overlap:.6} (min 0.999), I_F*r off by {fisher_rel:.1e} (limit 1e-2)"
        ),
    )
}

fn duality_and_conservation() -> Check {
    let params = OscillatorParams::standard();
    let grid = Grid::self_dual(4096).map_err(err)?;
    let (mut ft_err, mut plancherel) = (0.0_f64, 0.0_f64);
    for n in 0..=10 {
        let psi = GridFunction::eigenstate(grid, n, &params);
        let hat = fourier_transform(&psi).map_err(err)?;
        let expected = psi.scale(Complex64::new(0.0, -1.0).powu(n as u32));
        ft_err = ft_err.max(hat.l2_distance(&expected).map_err(err)?);
        let (a, b) = (integrate(&psi.abs_sq()).re, integrate(&hat.abs_sq()).re);
        plancherel = plancherel.max((a - b).abs() / a);
    }

    let mut balance = 0.0_f64;
    for i in 0..=20 {
        let p = i as f64 / 20.0;
        let total = |a: f64| {
            SuperpositionSpec::ground_pair(p, a, params).map(|s| fisher_closed(&s) + 4.0 * variance_closed(&s))
        };
        let t0 = total(0.0).map_err(err)?;
        for j in 1..64 {
            balance = balance.max((total(2.0 * PI * j as f64 / 64.0).map_err(err)? - t0).abs());
        }
    }

    let mut products = Vec::new();
    for mu in [0.5, 1.0, 2.0] {
        let q = OscillatorParams::with_mu(mu).map_err(err)?;
        for n in 0..=20 {
            products.push(cramer_rao_product(&GridFunction::eigenstate(default_grid_for(&q, n), n, &q)).map_err(err)?);
        }
        for (k_low, k_high) in [(0, 1), (0, 2), (1, 3), (2, 5)] {
            for i in 0..=4 {
                for alpha in [0.0, PI / 3.0, PI / 2.0, PI] {
                    let spec = SuperpositionSpec::new(i as f64 / 4.0, alpha, k_low, k_high, q).map_err(err)?;
                    products.push(fisher_closed(&spec) * variance_closed(&spec));
                    let psi = superpose(&spec).map_err(err)?.synthesize(default_grid_for(&q, k_high));
                    products.push(cramer_rao_product(&psi).map_err(err)?);
                }
            }
        }
        for d in [0.1, 0.5, 1.0, 2.0, 5.0] {
            products.push(gibbs_fisher(d, mu) * gibbs_risk(d, mu));
        }
    }
    let cr_min = products.iter().copied().fold(f64::INFINITY, f64::min);

    let mut psd = f64::INFINITY;
    for mu in [0.5, 1.0, 2.0] {
        for n_max in [2, 10, 20] {
            psd = psd.min(min_eigenvalue(&risk_matrix_v(n_max, mu))).min(min_eigenvalue(&gradient_matrix_w(n_max, mu)));
        }
    }
    ensure(
        ft_err <= 1e-6 && plancherel <= 1e-10 && balance <= 1e-12 && cr_min >= 1.0 - 1e-9 && psd >= -1e-10,
        format!(
            "FT phase error {ft_err:.1e} (limit 1e-6), Plancherel {plancherel:.1e} (limit 1e-10), balance spread {balance:.1e} (limit 1e-12), min Cramer-Rao product {cr_min:.12} over {} states, min v/w eigenvalue {psd:.1e}",
            products.len()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("eigenstate Fisher information", eigenstate_fisher),
        ("superposition minimum", superposition_minimum),
        ("Figure 1 reproduction", figure_one),
        ("no-interference pair", no_interference),
        ("fixed-variance comparison", fixed_variance),
        ("Gibbs closed form", gibbs_closed_form),
        ("transactional identities", transactional_identities),
        ("order divergence", order_divergence),
        ("variational recovery", variational_recovery),
        ("duality and conservation", duality_and_conservation),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (tag, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("[{tag}] {:>2} {name}: {detail} ({:.2}s)", i + 1, t.elapsed().as_secs_f64());
    }
    println!("{}/{} criteria passed in {:.1}s", criteria.len() - failed, criteria.len(), start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
