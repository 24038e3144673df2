use std::collections::BTreeMap;

use bertrand_core::quantum_analytic::{radial_eigenfunction, radial_energy};
use bertrand_core::quantum_numeric::{
    build_radial_operator, continuum_threshold, default_grid, observed_order, refinement_study, residual_check,
    solve_bound_states, RadialGrid,
};
use bertrand_core::{Family, ModelSpec};
use clap::Args;
use rayon::prelude::*;
use serde_json::json;

use crate::config::{deformation, Defaults, ModelArgs, ModelKind, OutputArgs, RunConfig};
use crate::error::CliError;
use crate::output::{Cell, Report};
use crate::Outcome;

pub const COLUMNS: [&str; 12] = [
    "family",
    "deformation",
    "l",
    "n_r",
    "energy",
    "closed_form",
    "relative_error",
    "residual",
    "extrapolated",
    "extrapolated_error",
    "observed_order",
    "flat_energy",
];

/// Largest spread of extrapolated energies within a degenerate level that
/// still counts as degenerate.
pub const DEGENERACY_TOLERANCE: f64 = 2e-5;

const DEFAULTS: Defaults = Defaults { lambda: &[0.02], eta: &[0.5], xi: 0.0, zeta: 0.0 };

#[derive(Debug, Args)]
pub struct RadialArgs {
    #[arg(long, value_enum)]
    pub model: ModelKind,
    #[command(flatten)]
    pub params: ModelArgs,
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    /// Angular momenta, comma-separated.
    #[arg(long, value_delimiter = ',', default_values_t = [0, 1, 2])]
    pub l: Vec<usize>,
    /// Bound states per angular momentum.
    #[arg(long, default_value_t = 4)]
    pub states: usize,
    /// Grid nodes; the default grid is sized from the closed-form tails.
    #[arg(long)]
    pub npts: Option<usize>,
    /// Skip the three-grid refinement (no extrapolation or order).
    #[arg(long)]
    pub no_refine: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

struct Level {
    n_r: usize,
    energy: f64,
    closed: f64,
    residual: f64,
    extrapolated: Option<f64>,
    order: Option<f64>,
    flat: f64,
}

struct Run {
    model: ModelSpec,
    l: usize,
    npts: usize,
    levels: Vec<Level>,
    truncated: bool,
}

fn solve(model: &ModelSpec, l: usize, args: &RadialArgs) -> Result<Run, CliError> {
    let mut grid = default_grid(model, l, args.states)?;
    if let Some(npts) = args.npts {
        grid = RadialGrid::new(model, grid.r_min, grid.r_max, npts)?;
    }
    let op = build_radial_operator(model, l, &grid)?;
    let found = solve_bound_states(&op, args.states, continuum_threshold(model)?)?;
    let count = found.states.len();
    let study = if args.no_refine || count == 0 {
        None
    } else {
        // ladder npts/2, npts, 2·npts around the working grid
        let coarse = RadialGrid::new(model, grid.r_min, grid.r_max, grid.npts / 2 + 1)?;
        Some(refinement_study(model, l, count, &coarse, 3)?)
    };
    let flat_model = model.flat();
    let mut levels = Vec::with_capacity(count);
    for (n_r, state) in found.states.iter().enumerate() {
        let closed = radial_energy(model, n_r, l)?;
        let residual = residual_check(&op, |r| radial_eigenfunction(model, n_r, l, r), closed)?;
        let (extrapolated, order) = match &study {
            Some(s) => (Some(s.extrapolated[n_r]), Some(observed_order(s.energies[0][n_r], s.energies[1][n_r], s.energies[2][n_r]))),
            None => (None, None),
        };
        levels.push(Level {
            n_r,
            energy: state.energy,
            closed,
            residual,
            extrapolated,
            order,
            flat: radial_energy(&flat_model, n_r, l)?,
        });
    }
    Ok(Run { model: *model, l, npts: grid.npts, levels, truncated: found.truncated })
}

/// Degenerate levels share `2n_r + l` (oscillator) or `n_r + l` (Coulomb).
fn degeneracy_spread(runs: &[Run]) -> f64 {
    let mut groups: BTreeMap<(u64, usize), Vec<f64>> = BTreeMap::new();
    for run in runs {
        let key_n = |n_r: usize| match run.model.family {
            Family::TaubNut { .. } => n_r + run.l,
            _ => 2 * n_r + run.l,
        };
        for lv in &run.levels {
            let e = lv.extrapolated.unwrap_or(lv.energy);
            groups.entry((deformation(&run.model).to_bits(), key_n(lv.n_r))).or_default().push(e);
        }
    }
    groups
        .values()
        .filter(|g| g.len() > 1)
        .map(|g| g.iter().map(|e| (e / g[0] - 1.0).abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max)
}

pub fn run(args: RadialArgs) -> Result<Outcome, CliError> {
    if !matches!(args.model, ModelKind::Darboux3 | ModelKind::Taubnut) {
        return Err(CliError::Usage("radial supports the darboux3 and taubnut models".into()));
    }
    if args.states == 0 || args.l.is_empty() {
        return Err(CliError::Usage("--states and --l must be non-empty".into()));
    }
    let models = args.params.models(args.model, args.dim, &DEFAULTS)?;
    let jobs: Vec<(ModelSpec, usize)> = models.iter().flat_map(|m| args.l.iter().map(move |&l| (*m, l))).collect();
    let runs = jobs.par_iter().map(|(m, l)| solve(m, *l, &args)).collect::<Result<Vec<_>, _>>()?;

    let config = RunConfig {
        command: "radial",
        models: models.clone(),
        settings: json!({
            "l": args.l, "states": args.states, "npts": runs.iter().map(|r| r.npts).collect::<Vec<_>>(),
            "refine": !args.no_refine,
        }),
        seed: args.output.seed,
        format: args.output.format,
    };
    let mut report = Report::new(config, &COLUMNS);
    let mut max_error: f64 = 0.0;
    let mut max_extrapolated: f64 = 0.0;
    let (mut order_lo, mut order_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for run in &runs {
        for lv in &run.levels {
            let err = (lv.energy / lv.closed - 1.0).abs();
            let xerr = lv.extrapolated.map(|x| (x / lv.closed - 1.0).abs());
            max_error = max_error.max(err);
            if let Some(x) = xerr {
                max_extrapolated = max_extrapolated.max(x);
            }
            if let Some(p) = lv.order {
                order_lo = order_lo.min(p);
                order_hi = order_hi.max(p);
            }
            let opt = |v: Option<f64>| v.map_or(Cell::from(""), Cell::from);
            report.push_row(vec![
                Cell::from(run.model.name()),
                deformation(&run.model).into(),
                run.l.into(),
                lv.n_r.into(),
                lv.energy.into(),
                lv.closed.into(),
                err.into(),
                lv.residual.into(),
                opt(lv.extrapolated),
                opt(xerr),
                opt(lv.order),
                lv.flat.into(),
            ]);
        }
    }
    let spread = degeneracy_spread(&runs);
    let truncated: Vec<String> = runs
        .iter()
        .filter(|r| r.truncated)
        .map(|r| format!("{} l={}: {} of {} states", r.model.name(), r.l, r.levels.len(), args.states))
        .collect();
    report.push_meta("max_relative_error", max_error);
    if !args.no_refine {
        report.push_meta("max_extrapolated_error", max_extrapolated);
        report.push_meta("observed_order_range", json!([order_lo, order_hi]));
    }
    report.push_meta(
        "degeneracy",
        json!({ "spread": spread, "bound": DEGENERACY_TOLERANCE, "passed": spread <= DEGENERACY_TOLERANCE }),
    );
    report.push_meta("truncated", json!(truncated));
    report.emit(&args.output)?;
    if !truncated.is_empty() {
        return Ok(Outcome::Failed(format!("fewer bound states than requested: {}", truncated.join("; "))));
    }
    if spread > DEGENERACY_TOLERANCE {
        return Ok(Outcome::Failed(format!("degeneracy spread {spread:.2e} exceeds {DEGENERACY_TOLERANCE:e}")));
    }
    Ok(Outcome::Success)
}
