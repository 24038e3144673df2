use bertrand_core::classical::{detect_closure, integrate_trajectory, Closure, PhaseState, Termination};
use bertrand_core::ModelSpec;
use clap::Args;
use serde_json::json;

use crate::config::{Defaults, ModelArgs, ModelKind, OutputArgs, RunConfig};
use crate::error::CliError;
use crate::output::{Cell, Report};
use crate::Outcome;

const DEFAULTS: Defaults = Defaults { lambda: &[0.05], eta: &[0.5], xi: 0.01, zeta: 0.01 };

#[derive(Debug, Args)]
pub struct TrajectoryArgs {
    #[arg(long, value_enum)]
    pub model: ModelKind,
    #[command(flatten)]
    pub params: ModelArgs,
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    /// Initial position, comma-separated. Defaults to `(1, 0, …)`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub q: Vec<f64>,
    /// Initial momentum. Defaults to `(0, 0.5, 0, …)` for the oscillators
    /// and `(0, 0.8, 0, …)` for the Coulomb systems.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub p: Vec<f64>,
    #[arg(long, default_value_t = 100.0)]
    pub t_end: f64,
    /// Integrator tolerance; ledger drifts are reported in units of it.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Phase-space distance that counts as a return.
    #[arg(long, default_value_t = 1e-6)]
    pub closure_tol: f64,
    /// Write every `stride`-th accepted step (the last step is always kept).
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn initial_state(args: &TrajectoryArgs, model: &ModelSpec) -> Result<PhaseState, CliError> {
    let n = model.dim;
    let unit = |i: usize, v: f64| -> Vec<f64> { (0..n).map(|j| if j == i { v } else { 0.0 }).collect() };
    let q = if args.q.is_empty() { unit(0, 1.0) } else { args.q.clone() };
    let p = if args.p.is_empty() { unit(1, if model.is_coulomb() { 0.8 } else { 0.5 }) } else { args.p.clone() };
    if q.len() != n || p.len() != n {
        return Err(CliError::Usage(format!("--q and --p need {n} components each for --dim {n}")));
    }
    let s = PhaseState::new(q, p)?;
    model.check_state_radius(s.radius())?;
    Ok(s)
}

pub fn run(args: TrajectoryArgs) -> Result<Outcome, CliError> {
    let models = args.params.models(args.model, args.dim, &DEFAULTS)?;
    let [model] = models.as_slice() else {
        return Err(CliError::Usage("trajectory takes a single parameter value".into()));
    };
    if !(args.t_end > 0.0 && args.t_end.is_finite()) {
        return Err(CliError::Usage(format!("--t-end {} must be positive", args.t_end)));
    }
    let valid = args.tol > 0.0 && args.tol < 1.0 && args.closure_tol > 0.0 && args.stride > 0;
    if !valid {
        return Err(CliError::Usage("--tol must lie in (0, 1); --closure-tol and --stride must be positive".into()));
    }
    let s0 = initial_state(&args, model)?;
    let traj = integrate_trajectory(model, &s0, args.t_end, args.tol)?;
    let closure = detect_closure(&traj, args.closure_tol)?;

    let config = RunConfig {
        command: "trajectory",
        models: vec![*model],
        settings: json!({
            "q0": s0.q, "p0": s0.p, "t_end": args.t_end, "tol": args.tol,
            "closure_tol": args.closure_tol, "stride": args.stride,
        }),
        seed: args.output.seed,
        format: args.output.format,
    };
    let n = model.dim;
    let mut columns: Vec<String> = vec!["t".into()];
    columns.extend((1..=n).map(|i| format!("q{i}")));
    columns.extend((1..=n).map(|i| format!("p{i}")));
    columns.extend(traj.ledger_names.iter().cloned());
    let column_refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut report = Report::new(config, &column_refs);

    let drifts = traj.drifts();
    let max_drift = traj.max_drift();
    report.push_meta("steps", traj.len());
    report.push_meta("termination", serde_json::to_value(&traj.termination)?);
    report.push_meta("closure", serde_json::to_value(closure)?);
    report.push_meta("drifts", serde_json::Value::Object(drifts.iter().map(|(k, v)| (k.clone(), (*v).into())).collect()));
    report.push_meta("max_drift_over_tol", max_drift / args.tol);

    let last = traj.len() - 1;
    for i in (0..traj.len()).filter(|&i| i % args.stride == 0 || i == last) {
        let s = &traj.states[i];
        let mut row: Vec<Cell> = vec![traj.times[i].into()];
        row.extend(s.q.iter().chain(&s.p).map(|&x| Cell::from(x)));
        row.extend(traj.ledger[i].iter().map(|&x| Cell::from(x)));
        report.push_row(row);
    }
    report.emit(&args.output)?;

    match &traj.termination {
        Termination::Completed => {
            if let Closure::Closed { period, .. } = closure {
                eprintln!("closed orbit, period {period:.9}, max drift {:.2}·tol", max_drift / args.tol);
            }
            Ok(Outcome::Success)
        }
        other => Ok(Outcome::Failed(format!("integration stopped early, partial output written: {other:?}"))),
    }
}
