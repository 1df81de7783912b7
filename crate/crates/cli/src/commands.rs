use std::path::{Path, PathBuf};

use mfi_core::basis::{eigenstate_derivative, eigenstate_value, epsilon, MAX_EIGEN_INDEX};
use mfi_core::fisher::{closed_form_eigen_fisher, fisher_of_amplitude, moments};
use mfi_core::gibbs::GibbsEnsemble;
use mfi_core::grid::{default_grid_with_count, integrate, Grid};
use mfi_core::superposition::{figure1_scan, Figure1Row};
use mfi_core::transactional::{ordering_report, CommonScale, SuperpositionMode};
use mfi_core::variational::{discrete_spectrum, solve_mfi_with, ConstraintSet, SolverOptions, TraceRow};
use mfi_core::{FisherImage, GridFunction, MfiError, OscillatorParams};

use crate::error::CliError;
use crate::output::{emit, write_text, Cell, Table};
use crate::plot::figure1_svg;
use crate::spec_file::parse_strategies;
use crate::RunConfig;

/// Relative gap between quadrature and closed-form Fisher information
/// tolerated before `eigen` reports a contract violation.
const EIGEN_AGREEMENT: f64 = 1e-6;

fn params(cfg: &RunConfig) -> Result<OscillatorParams, CliError> {
    Ok(OscillatorParams::new(cfg.mu.unwrap_or(1.0), cfg.m)?)
}

fn grid_for(cfg: &RunConfig, params: &OscillatorParams, n_max: usize) -> Result<Grid, CliError> {
    match cfg.half_width {
        Some(w) => Ok(Grid::centered(params.m, w, cfg.grid_count)?),
        None => {
            Grid::new(params.m - 1.0, params.m + 1.0, cfg.grid_count)?;
            Ok(default_grid_with_count(params, n_max, cfg.grid_count))
        }
    }
}

pub fn eigen(cfg: &RunConfig, n: usize, samples: Option<&Path>) -> Result<(), CliError> {
    if n > MAX_EIGEN_INDEX {
        return Err(CliError::Usage(format!("n={n} exceeds the supported maximum {MAX_EIGEN_INDEX}")));
    }
    let p = params(cfg)?;
    let grid = grid_for(cfg, &p, n)?;
    let psi = GridFunction::eigenstate(grid, n, &p);
    let quadrature = fisher_of_amplitude(&psi)?;
    let fisher = closed_form_eigen_fisher(n, p.mu);
    if (quadrature - fisher).abs() > EIGEN_AGREEMENT * fisher {
        return Err(MfiError::Contract(format!(
            "quadrature Fisher information {quadrature} differs from {fisher} beyond {EIGEN_AGREEMENT:e} relative; widen or refine the grid"
        ))
        .into());
    }
    let mo = moments(&psi.abs_sq());
    let variance = epsilon(n) / p.mu;
    let mut table = Table::new(&[
        "n",
        "mu",
        "m",
        "fisher",
        "fisher_quadrature",
        "mean_quadrature",
        "variance",
        "variance_quadrature",
        "cramer_rao_product",
        "image",
    ]);
    table.push(vec![
        n.into(),
        p.mu.into(),
        p.m.into(),
        fisher.into(),
        quadrature.into(),
        mo.mean.into(),
        variance.into(),
        mo.variance.into(),
        (fisher * variance).into(),
        FisherImage::Physical.to_string().into(),
    ]);
    if let Some(path) = samples {
        let mut s = Table::new(&["x", "psi", "dpsi"]);
        for x in grid.points() {
            s.push(vec![x.into(), eigenstate_value(n, x, &p).into(), eigenstate_derivative(n, x, &p).into()]);
        }
        emit(&s, cfg.format, Some(path))?;
    }
    emit(&table, cfg.format, cfg.out.as_deref())
}

pub fn figure1(cfg: &RunConfig, points: usize, plot: Option<&Path>) -> Result<(), CliError> {
    let rows = figure1_scan(cfg.mu.unwrap_or(1.0), points)?;
    let mut table = Table::new(&Figure1Row::HEADER);
    for r in &rows {
        table.push(vec![r.p.into(), r.in_phase.into(), r.quadrature.into()]);
    }
    if let Some(path) = plot {
        write_text(path, &figure1_svg(&rows))?;
    }
    emit(&table, cfg.format, cfg.out.as_deref())
}

pub fn gibbs(cfg: &RunConfig, ds: &[f64], tail_tolerance: f64) -> Result<(), CliError> {
    let p = params(cfg)?;
    let mut table = Table::new(&["d", "s", "IFG", "rG", "product"]);
    for &d in ds {
        let ens = GibbsEnsemble::new(d, p, tail_tolerance)?;
        let (fisher, risk) = (ens.fisher(), ens.risk());
        table.push(vec![d.into(), ens.s.into(), fisher.into(), risk.into(), (fisher * risk).into()]);
    }
    emit(&table, cfg.format, cfg.out.as_deref())
}

pub fn order(
    cfg: &RunConfig,
    spec: &Path,
    image: FisherImage,
    risk: Option<f64>,
    mode: SuperpositionMode,
) -> Result<(), CliError> {
    let text = std::fs::read_to_string(spec)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", spec.display())))?;
    let strategies = parse_strategies(&text).map_err(|e| CliError::Usage(format!("{}: {e}", spec.display())))?;
    let scale = match image {
        FisherImage::Physical => CommonScale { mu: Some(cfg.mu.unwrap_or(1.0)), risk },
        FisherImage::Transactional => CommonScale { mu: cfg.mu, risk },
    };
    let rows = ordering_report(&strategies, image, scale, mode)?;
    let mut table = Table::new(&["kind", "params", "image", "mu_or_r", "fisher", "risk", "product", "tied"]);
    for r in &rows {
        table.push(vec![
            r.kind.label().into(),
            r.kind.params_string().into(),
            r.image.to_string().into(),
            r.mu_or_r.into(),
            r.fisher.into(),
            r.risk.into(),
            r.product.into(),
            r.tied_with_previous.into(),
        ]);
    }
    emit(&table, cfg.format, cfg.out.as_deref())
}

pub struct SolveArgs {
    pub risk: f64,
    pub mean: Option<f64>,
    pub count: usize,
    pub trace: Option<PathBuf>,
    pub max_iterations: usize,
    pub tolerance: f64,
}

pub fn solve(cfg: &RunConfig, args: SolveArgs) -> Result<(), CliError> {
    let mean = args.mean.unwrap_or(cfg.m);
    let constraints = ConstraintSet::new(mean, args.risk)?;
    if args.count == 0 {
        return Err(CliError::Usage("count must be at least 1".into()));
    }
    if !(args.tolerance.is_finite() && args.tolerance > 0.0) {
        return Err(CliError::Usage(format!("tolerance must be positive, got {}", args.tolerance)));
    }
    let mu = cfg.mu.unwrap_or(constraints.gaussian_mu());
    let target = OscillatorParams::new(constraints.gaussian_mu(), mean)?;
    let grid = grid_for(cfg, &target, args.count - 1)?;
    let options = SolverOptions {
        max_iterations: args.max_iterations,
        tolerance: args.tolerance,
        record_trace: args.trace.is_some(),
    };
    let sol = solve_mfi_with(&constraints, &grid, cfg.seed, &options)?;
    if let Some(path) = &args.trace {
        let mut t = Table::new(&TraceRow::HEADER);
        for r in &sol.trace {
            t.push(vec![
                r.iter.into(),
                r.fisher.into(),
                r.norm_residual.into(),
                r.mean_residual.into(),
                r.risk_residual.into(),
            ]);
        }
        emit(&t, cfg.format, Some(path))?;
    }
    let spectrum = discrete_spectrum(&grid, mu, mean, args.count)?;
    let exact = GridFunction::eigenstate(grid, 0, &target);
    let overlap = integrate(&sol.psi.conj_mul(&exact)?).norm();
    let fisher = fisher_of_amplitude(&sol.psi)?;
    let mo = moments(&sol.psi.abs_sq());

    let mut columns: Vec<String> = [
        "risk",
        "mean",
        "fisher",
        "discrete_fisher",
        "variance",
        "cramer_rao_product",
        "overlap",
        "iterations",
        "gradient_norm",
        "spectrum_mu",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    columns.extend((0..args.count).map(|n| format!("epsilon_{n}")));
    let mut table = Table::new(&columns);
    let mut row: Vec<Cell> = vec![
        args.risk.into(),
        mo.mean.into(),
        fisher.into(),
        sol.fisher.into(),
        mo.variance.into(),
        (fisher * mo.variance).into(),
        overlap.into(),
        sol.iterations.into(),
        sol.gradient_norm.into(),
        mu.into(),
    ];
    row.extend(spectrum.iter().map(|e| Cell::from(e.epsilon)));
    table.push(row);
    emit(&table, cfg.format, cfg.out.as_deref())
}
