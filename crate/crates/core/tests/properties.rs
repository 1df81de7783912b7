use std::f64::consts::PI;

use mfi_core::basis::{eigenstate_derivative, eigenstate_value, epsilon, hermite, position_recursion_check};
use mfi_core::fisher::{
    closed_form_eigen_fisher, fisher_of_amplitude, gradient_matrix_w, min_eigenvalue, moments, risk_matrix_v,
};
use mfi_core::fourier::fourier_transform;
use mfi_core::gibbs::{gibbs_fisher, gibbs_risk, gibbs_weights, shape_parameter};
use mfi_core::grid::{integrate, Grid};
use mfi_core::superposition::{fisher_closed, superpose, variance_closed, SuperpositionSpec};
use mfi_core::transactional::{
    mu_for_risk, ordering_report, transactional_eigen_fisher, transactional_pair_fisher,
    transactional_superposition_fisher, CommonScale, StrategyDescriptor, StrategyKind, SuperpositionMode,
};
use mfi_core::variational::second_variation;
use mfi_core::{Complex64, FisherImage, GridFunction, OscillatorParams};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = OscillatorParams> {
    (0.2f64..5.0, -3.0f64..3.0).prop_map(|(mu, m)| OscillatorParams::new(mu, m).unwrap())
}

fn pair() -> impl Strategy<Value = (usize, usize)> {
    (0usize..6, 1usize..4).prop_map(|(a, d)| (a, a + d))
}

fn strategy_kind() -> impl Strategy<Value = StrategyKind> {
    prop_oneof![
        (0usize..8).prop_map(|n| StrategyKind::Eigenstate { n }),
        (0.0f64..=1.0, 0.0f64..2.0 * PI, pair())
            .prop_map(|(p, alpha, (k_low, k_high))| StrategyKind::Superposition { p, alpha, k_low, k_high }),
        (0.05f64..10.0).prop_map(|d| StrategyKind::Gibbs { d }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn eigenstate_parity(n in 0usize..40, t in -6.0f64..6.0, p in params()) {
        let a = eigenstate_value(n, p.m + t / p.mu.sqrt(), &p);
        let b = eigenstate_value(n, p.m - t / p.mu.sqrt(), &p);
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((a - sign * b).abs() <= 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn derivative_forms_agree(n in 0usize..40, t in -8.0f64..8.0, p in params()) {
        let x = p.m + t / p.mu.sqrt();
        let ladder = eigenstate_derivative(n, x, &p);
        let previous = if n == 0 { 0.0 } else { eigenstate_value(n - 1, x, &p) };
        let direct = -p.mu * (x - p.m) * eigenstate_value(n, x, &p) + (2.0 * n as f64 * p.mu).sqrt() * previous;
        prop_assert!((ladder - direct).abs() <= 1e-10 * p.mu.max(1.0));
    }

    #[test]
    fn position_identity(n in 0usize..=40, t in -10.0f64..10.0, p in params()) {
        let r = position_recursion_check(n, p.m + t / p.mu.sqrt(), &p);
        prop_assert!(r.abs() <= 1e-10 * p.mu.max(1.0));
    }

    #[test]
    fn hermite_recurrence(n in 1usize..30, x in -4.0f64..4.0) {
        let lhs = hermite(n + 1, x).unwrap();
        let rhs = 2.0 * x * hermite(n, x).unwrap() - 2.0 * n as f64 * hermite(n - 1, x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(rhs.abs()).max(1.0));
    }

    #[test]
    fn eigen_fisher_scales_with_mu(n in 0usize..64, mu in 0.01f64..100.0, c in 0.01f64..100.0) {
        let a = closed_form_eigen_fisher(n, c * mu);
        let b = c * closed_form_eigen_fisher(n, mu);
        prop_assert!((a - b).abs() <= 4.0 * f64::EPSILON * a);
    }

    #[test]
    fn lemma_matrices_psd(n_max in 1usize..24, mu in 0.1f64..10.0) {
        let v = risk_matrix_v(n_max, mu);
        let w = gradient_matrix_w(n_max, mu);
        prop_assert!(min_eigenvalue(&v) >= -1e-10);
        prop_assert!(min_eigenvalue(&w) >= -1e-10);
        let balance = &w + &v * (4.0 * mu * mu);
        for i in 0..=n_max {
            for j in 0..=n_max {
                let want = if i == j { (8 * i + 4) as f64 * mu } else { 0.0 };
                prop_assert!((balance[(i, j)] - want).abs() <= 1e-10 * mu * (n_max as f64 + 1.0));
            }
        }
    }

    #[test]
    fn interference_balance(p in 0.0f64..=1.0, a in 0.0f64..2.0 * PI, b in 0.0f64..2.0 * PI, mu in 0.2f64..5.0) {
        let params = OscillatorParams::with_mu(mu).unwrap();
        let total = |alpha| {
            let s = SuperpositionSpec::ground_pair(p, alpha, params).unwrap();
            fisher_closed(&s) + 4.0 * mu * mu * variance_closed(&s)
        };
        let want = 8.0 * mu * (p * epsilon(0) + (1.0 - p) * epsilon(2));
        prop_assert!((total(a) - total(b)).abs() <= 1e-12 * want.max(1.0));
        prop_assert!((total(a) - want).abs() <= 1e-12 * want.max(1.0));
    }

    #[test]
    fn phase_reflection(p in 0.0f64..=1.0, alpha in 0.0f64..2.0 * PI, (k_low, k_high) in pair()) {
        let params = OscillatorParams::standard();
        let f = |a| fisher_closed(&SuperpositionSpec::new(p, a, k_low, k_high, params).unwrap());
        prop_assert!((f(alpha) - f(2.0 * PI - alpha)).abs() <= 1e-12 * f(alpha));
    }

    #[test]
    fn non_interfering_pairs_affine_and_phase_free(
        p in 0.0f64..=1.0, alpha in 0.0f64..2.0 * PI, k_low in 0usize..8, gap in prop::sample::select(vec![1usize, 3, 4, 5]),
    ) {
        let params = OscillatorParams::standard();
        let k_high = k_low + gap;
        let f = |p, a| fisher_closed(&SuperpositionSpec::new(p, a, k_low, k_high, params).unwrap());
        let affine = p * f(1.0, 0.0) + (1.0 - p) * f(0.0, 0.0);
        prop_assert!((f(p, alpha) - affine).abs() <= 1e-12 * affine);
    }

    #[test]
    fn cramer_rao_for_superpositions(
        p in 0.0f64..=1.0, alpha in 0.0f64..2.0 * PI, (k_low, k_high) in pair(), mu in 0.2f64..5.0,
    ) {
        let params = OscillatorParams::with_mu(mu).unwrap();
        let spec = SuperpositionSpec::new(p, alpha, k_low, k_high, params).unwrap();
        prop_assert!(fisher_closed(&spec) * variance_closed(&spec) >= 1.0 - 1e-9);
        let state = superpose(&spec).unwrap();
        prop_assert!((state.fisher() - fisher_closed(&spec)).abs() <= 1e-12 * state.fisher());
    }

    #[test]
    fn gibbs_identities(d in 1e-3f64..40.0, mu in 0.01f64..100.0) {
        let s = shape_parameter(d);
        prop_assert!(s > 0.0 && s < 1.0 || d > 36.0);
        prop_assert!(gibbs_fisher(d, mu) <= 2.0 * mu);
        prop_assert!((gibbs_fisher(d, mu) * gibbs_risk(d, mu) - 1.0).abs() <= f64::EPSILON);
        prop_assert!(gibbs_fisher(d * 1.01, mu) > gibbs_fisher(d, mu) || d > 36.0);
        prop_assert!(gibbs_fisher(d, mu * 1.01) > gibbs_fisher(d, mu));
    }

    #[test]
    fn gibbs_weights_are_geometric(d in 0.05f64..10.0, n in 1usize..200) {
        let w = gibbs_weights(d, n).unwrap();
        let total: f64 = w.iter().sum();
        prop_assert!((total - (1.0 - (-d * n as f64).exp())).abs() <= 1e-13);
        for pair in w.windows(2).filter(|p| p[1] > f64::MIN_POSITIVE) {
            prop_assert!((pair[1] / pair[0] - (-d).exp()).abs() <= 1e-12);
        }
    }

    #[test]
    fn transactional_consistency(n in 0usize..64, r in 0.01f64..100.0) {
        let mu = mu_for_risk(&StrategyDescriptor { kind: StrategyKind::Eigenstate { n }, risk: r }).unwrap();
        let a = closed_form_eigen_fisher(n, mu);
        let b = transactional_eigen_fisher(n, r);
        prop_assert!((a - b).abs() <= 2.0 * f64::EPSILON * b);
    }

    #[test]
    fn fixed_risk_superposition_matches_physical(p in 0.0f64..=1.0, alpha in 0.0f64..2.0 * PI, r in 0.05f64..20.0) {
        let kind = StrategyKind::ground_pair(p, alpha);
        let mu = mu_for_risk(&StrategyDescriptor { kind, risk: r }).unwrap();
        let physical = kind.physical_fisher(mu).unwrap();
        let fixed = transactional_superposition_fisher(p, alpha, r);
        prop_assert!((physical - fixed).abs() <= 1e-12 * fixed);
    }

    #[test]
    fn fixed_risk_cramer_rao_floor(kind in strategy_kind(), r in 0.05f64..20.0) {
        let scale = CommonScale { mu: None, risk: Some(r) };
        let row = ordering_report(&[kind], FisherImage::Transactional, scale, SuperpositionMode::CallerFixed).unwrap();
        prop_assert!(row[0].fisher * r >= 1.0 - 1e-9);
        if let StrategyKind::Superposition { p, alpha, k_low, k_high } = kind {
            let direct = transactional_pair_fisher(p, alpha, k_low, k_high, r).unwrap();
            prop_assert_eq!(row[0].fisher, direct);
        }
    }

    #[test]
    fn ordering_is_sorted_and_permutation_invariant(
        kinds in prop::collection::vec(strategy_kind(), 0..12), mu in 0.2f64..5.0, rot in 0usize..12,
    ) {
        let scale = CommonScale { mu: Some(mu), risk: None };
        let a = ordering_report(&kinds, FisherImage::Physical, scale, SuperpositionMode::CallerFixed).unwrap();
        prop_assert!(a.windows(2).all(|w| w[0].fisher <= w[1].fisher * (1.0 + 1e-12)));
        let mut rotated = kinds.clone();
        if !rotated.is_empty() {
            let k = rot % rotated.len();
            rotated.rotate_left(k);
        }
        let b = ordering_report(&rotated, FisherImage::Physical, scale, SuperpositionMode::CallerFixed).unwrap();
        prop_assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn plancherel_for_random_states(coef in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..8)) {
        let grid = Grid::self_dual(1024).unwrap();
        let p = OscillatorParams::standard();
        let mut f = GridFunction::from_real(grid, vec![0.0; grid.count()]).unwrap();
        for (n, &(re, im)) in coef.iter().enumerate() {
            f = f.add(&GridFunction::eigenstate(grid, n, &p).scale(Complex64::new(re, im))).unwrap();
        }
        let g = fourier_transform(&f).unwrap();
        let (a, b) = (integrate(&f.abs_sq()).re, integrate(&g.abs_sq()).re);
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1e-300));
    }

    #[test]
    fn synthesized_superposition_matches_closed_forms(
        p in 0.0f64..=1.0, alpha in 0.0f64..2.0 * PI, (k_low, k_high) in pair(),
    ) {
        let params = OscillatorParams::standard();
        let spec = SuperpositionSpec::new(p, alpha, k_low, k_high, params).unwrap();
        let grid = mfi_core::grid::default_grid_for(&params, k_high);
        let psi = superpose(&spec).unwrap().synthesize(grid);
        let fisher = fisher_of_amplitude(&psi).unwrap();
        prop_assert!((fisher - fisher_closed(&spec)).abs() <= 1e-8 * fisher);
        let variance = moments(&psi.abs_sq()).variance;
        prop_assert!((variance - variance_closed(&spec)).abs() <= 1e-8 * variance);
    }

    #[test]
    fn second_variation_nonnegative(coef in prop::collection::vec(-1.0f64..1.0, 1..6)) {
        let p = OscillatorParams::standard();
        let grid = mfi_core::grid::default_grid_for(&p, 6);
        let mut delta = GridFunction::from_real(grid, vec![0.0; grid.count()]).unwrap();
        for (n, &c) in coef.iter().enumerate() {
            delta = delta.add(&GridFunction::eigenstate(grid, n, &p).scale(Complex64::from(c))).unwrap();
        }
        let w = gradient_matrix_w(coef.len() - 1, 1.0);
        let expected: f64 = (0..coef.len()).flat_map(|i| (0..coef.len()).map(move |j| (i, j)))
            .map(|(i, j)| coef[i] * coef[j] * w[(i, j)])
            .sum();
        let v = second_variation(&delta);
        prop_assert!(v >= 0.0);
        prop_assert!((v - expected).abs() <= 1e-8 * expected.max(1.0));
    }
}
