use bertrand_core::classical::{
    declared_integrals, fradkin_component, hamiltonian, independence_rank, scaled_poisson_bracket, Anchor,
    PhaseFunction, PhaseState, StateSampler,
};
use bertrand_core::geometry::{scalar_curvature_closed, scalar_curvature_general};
use bertrand_core::quantum_analytic::spectrum_table;
use bertrand_core::{Family, ModelSpec};
use clap::Args;
use rayon::prelude::*;

use crate::config::{parameter_label, Defaults, ModelArgs, ModelKind, OutputArgs, RunConfig};
use crate::error::CliError;
use crate::output::{Cell, Report};
use crate::Outcome;

pub const COLUMNS: [&str; 8] = ["family", "parameters", "dim", "check", "measured", "relation", "bound", "passed"];

pub const BRACKET_TOLERANCE: f64 = 1e-10;
pub const RANK_FRACTION: f64 = 0.95;
pub const TRACE_TOLERANCE: f64 = 1e-12;
pub const CURVATURE_TOLERANCE: f64 = 1e-10;
pub const LIMIT_TOLERANCE: f64 = 1e-6;
pub const REDUCTION_TOLERANCE: f64 = 1e-13;
/// Deformation used for the flat-limit checks.
const SMALL: f64 = 1e-9;

const DEFAULTS: Defaults = Defaults { lambda: &[0.05], eta: &[0.5], xi: 0.01, zeta: 0.01 };

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Family to check; all four when omitted.
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    #[command(flatten)]
    pub params: ModelArgs,
    #[arg(long, value_delimiter = ',', default_values_t = [2, 3, 4])]
    pub dim: Vec<usize>,
    /// Sampled phase-space points per model.
    #[arg(long, default_value_t = 100)]
    pub states: usize,
    /// Negate the potential term of the Fradkin tensor and Runge–Lenz vector
    /// to confirm that the bracket check can fail.
    #[arg(long, hide = true)]
    pub tamper: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub measured: f64,
    /// `true` when `measured` must not exceed `bound`, `false` when it must
    /// reach it.
    pub upper: bool,
    pub bound: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: &'static str, measured: f64, bound: f64) -> Self {
        Check { name, measured, upper: true, bound, passed: measured <= bound }
    }

    fn at_least(name: &'static str, measured: f64, bound: f64) -> Self {
        Check { name, measured, upper: false, bound, passed: measured >= bound }
    }

    fn failed(mut self) -> Self {
        self.passed = false;
        self
    }
}

/// Worst `|{A, B}| / (1 + ‖∇A‖‖∇B‖)` over the pairs; `None` when a bracket
/// could not be evaluated.
fn worst_bracket<'a>(pairs: impl Iterator<Item = (&'a PhaseFunction, &'a PhaseFunction)>, s: &PhaseState) -> Option<f64> {
    let mut worst: f64 = 0.0;
    for (a, b) in pairs {
        let (v, scale) = scaled_poisson_bracket(a, b, s).ok()?;
        worst = worst.max(v.abs() / scale);
    }
    Some(worst)
}

fn all_pairs(set: &[PhaseFunction]) -> impl Iterator<Item = (&PhaseFunction, &PhaseFunction)> {
    set.iter().enumerate().flat_map(move |(i, a)| set[i + 1..].iter().map(move |b| (a, b)))
}

fn tamper(f: PhaseFunction) -> PhaseFunction {
    match f {
        PhaseFunction::Fradkin { .. } | PhaseFunction::RungeLenz { .. } => PhaseFunction::tampered(f).expect("tamperable"),
        other => other,
    }
}

fn scaled(model: &ModelSpec, factor: f64) -> ModelSpec {
    let family = match model.family {
        Family::DarbouxIII { lambda } => Family::DarbouxIII { lambda: lambda * factor },
        Family::TaubNut { eta } => Family::TaubNut { eta: eta * factor },
        Family::DarbouxIIIXi { lambda, xi } => Family::DarbouxIIIXi { lambda: lambda * factor, xi: xi * factor },
        Family::DarbouxIV { eta, zeta } => Family::DarbouxIV { eta: eta * factor, zeta: zeta * factor },
    };
    ModelSpec { family, ..*model }
}

/// The undeformed Hamiltonian written out directly.
fn textbook_flat(model: &ModelSpec, s: &PhaseState) -> f64 {
    let p2: f64 = s.p.iter().map(|x| x * x).sum();
    let r = s.radius();
    if model.is_coulomb() {
        0.5 * p2 - model.k / r
    } else {
        0.5 * (p2 + model.omega * model.omega * r * r)
    }
}

/// One-parameter family obtained by switching off `ξ` or `ζ`.
fn reduced(model: &ModelSpec) -> Option<(ModelSpec, ModelSpec)> {
    match model.family {
        Family::DarbouxIIIXi { lambda, .. } => Some((
            ModelSpec { family: Family::DarbouxIIIXi { lambda, xi: 0.0 }, ..*model },
            ModelSpec { family: Family::DarbouxIII { lambda }, ..*model },
        )),
        Family::DarbouxIV { eta, .. } => Some((
            ModelSpec { family: Family::DarbouxIV { eta, zeta: 0.0 }, ..*model },
            ModelSpec { family: Family::TaubNut { eta }, ..*model },
        )),
        _ => None,
    }
}

/// Runs every check that applies to `model` on `states` sampled points.
pub fn check_model(model: &ModelSpec, states: usize, seed: u64, tampered: bool) -> Result<Vec<Check>, CliError> {
    let dim = model.dim;
    let mut integrals = declared_integrals(model);
    if tampered {
        integrals = integrals.into_iter().map(tamper).collect();
    }
    let h = integrals[0].clone();
    let chain = |anchor| -> Vec<PhaseFunction> {
        std::iter::once(h.clone()).chain((2..=dim).map(|m| PhaseFunction::Casimir { m, anchor })).collect()
    };
    let (upper, lower) = (chain(Anchor::Upper), chain(Anchor::Lower));
    let diagonal: Vec<PhaseFunction> = match model.family {
        Family::DarbouxIII { .. } => (0..dim)
            .map(|i| PhaseFunction::fradkin(model, i, i).map(|f| if tampered { tamper(f) } else { f }))
            .collect::<Result<_, _>>()?,
        _ => Vec::new(),
    };
    let mut rank_set = upper.clone();
    rank_set.extend((2..dim).map(|m| PhaseFunction::Casimir { m, anchor: Anchor::Lower }));
    let extra = match model.family {
        Family::DarbouxIII { .. } => Some(PhaseFunction::fradkin(model, 0, 0)?),
        Family::TaubNut { .. } => Some(PhaseFunction::runge_lenz(model, 0)?),
        _ => None,
    };
    rank_set.extend(extra);
    let expected_rank = rank_set.len();

    let near_flat = scaled(model, SMALL);
    let mut sampler = StateSampler::new(model, seed);
    let (mut bracket, mut bracket_ok) = (0.0f64, true);
    let (mut trace, mut limit, mut reduction) = (0.0f64, 0.0f64, 0.0f64);
    let mut full_rank = 0usize;
    for _ in 0..states {
        let s = sampler.sample();
        let pairs = integrals[1..]
            .iter()
            .map(|f| (&h, f))
            .chain(all_pairs(&upper))
            .chain(all_pairs(&lower))
            .chain(all_pairs(&diagonal));
        match worst_bracket(pairs, &s) {
            Some(w) => bracket = bracket.max(w),
            None => bracket_ok = false,
        }
        if independence_rank(&rank_set, &s)? == expected_rank {
            full_rank += 1;
        }
        if let Family::DarbouxIII { .. } = model.family {
            let tr: f64 = (0..dim).map(|i| fradkin_component(model, &s, i, i)).sum::<Result<f64, _>>()?;
            let hv = hamiltonian(model, &s)?;
            trace = trace.max((tr - 2.0 * hv).abs() / (1.0 + hv.abs()));
        }
        let flat = textbook_flat(model, &s);
        limit = limit.max((hamiltonian(&near_flat, &s)? - flat).abs() / (1.0 + flat.abs()));
        if let Some((two, one)) = reduced(model) {
            let b = hamiltonian(&one, &s)?;
            reduction = reduction.max((hamiltonian(&two, &s)? - b).abs() / (1.0 + b.abs()));
        }
    }

    let mut checks = Vec::new();
    let c = Check::at_most("brackets", bracket, BRACKET_TOLERANCE);
    checks.push(if bracket_ok { c } else { c.failed() });
    checks.push(Check::at_least("rank", full_rank as f64 / states.max(1) as f64, RANK_FRACTION));
    if let Family::DarbouxIII { .. } = model.family {
        checks.push(Check::at_most("fradkin_trace", trace, TRACE_TOLERANCE));
    }
    checks.push(Check::at_most("curvature", curvature_deviation(model)?, CURVATURE_TOLERANCE));
    checks.push(Check::at_most("flat_limit", limit, LIMIT_TOLERANCE));
    if reduced(model).is_some() {
        checks.push(Check::at_most("reduction", reduction, REDUCTION_TOLERANCE));
    }
    if matches!(model.family, Family::DarbouxIII { .. } | Family::TaubNut { .. }) {
        checks.push(Check::at_most("spectrum_limit", spectrum_limit(model)?, LIMIT_TOLERANCE));
    }
    Ok(checks)
}

/// Closed-form against general conformal curvature on 100 log-spaced radii
/// in `[10⁻³, min(100, 0.999 r_s)]`.
fn curvature_deviation(model: &ModelSpec) -> Result<f64, CliError> {
    let r_hi = model.singular_radius().map_or(100.0, |rs| (0.999 * rs).min(100.0));
    let (a, b) = (1e-3f64.ln(), r_hi.ln());
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let r = (a + (b - a) * i as f64 / 99.0).exp();
        let g = scalar_curvature_general(model, r)?;
        let c = scalar_curvature_closed(model, r)?;
        worst = worst.max((g - c).abs() / c.abs().max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

/// Levels at a vanishing deformation against the undeformed values.
fn spectrum_limit(model: &ModelSpec) -> Result<f64, CliError> {
    let levels = if model.is_coulomb() { 5 } else { 25 };
    let table = spectrum_table(&scaled(model, SMALL), levels)?;
    Ok(table.iter().map(|e| (e.energy / e.flat_energy - 1.0).abs()).fold(0.0, f64::max))
}

pub fn run(args: VerifyArgs) -> Result<Outcome, CliError> {
    if args.states == 0 {
        return Err(CliError::Usage("--states must be positive".into()));
    }
    let kinds = args.model.map_or(ModelKind::ALL.to_vec(), |k| vec![k]);
    let mut models = Vec::new();
    for kind in kinds {
        for &dim in &args.dim {
            models.extend(args.params.models(kind, dim, &DEFAULTS)?);
        }
    }
    let seed = args.output.seed;
    let results = models
        .par_iter()
        .enumerate()
        .map(|(i, m)| check_model(m, args.states, seed.wrapping_add(i as u64), args.tamper))
        .collect::<Result<Vec<_>, _>>()?;

    let config = RunConfig {
        command: "verify",
        models: models.clone(),
        settings: serde_json::json!({ "states": args.states, "tampered": args.tamper }),
        seed,
        format: args.output.format,
    };
    let mut report = Report::new(config, &COLUMNS);
    let mut failures = Vec::new();
    for (model, checks) in models.iter().zip(results) {
        for c in checks {
            if !c.passed {
                failures.push(format!("{} N={} {}", model.name(), model.dim, c.name));
            }
            report.push_row(vec![
                Cell::from(model.name()),
                parameter_label(model).into(),
                model.dim.into(),
                c.name.into(),
                c.measured.into(),
                Cell::from(if c.upper { "<=" } else { ">=" }),
                c.bound.into(),
                c.passed.into(),
            ]);
        }
    }
    let total = report.rows.len();
    report.push_meta("checks", total);
    report.push_meta("failed", failures.len());
    report.emit(&args.output)?;
    if failures.is_empty() {
        Ok(Outcome::Success)
    } else {
        Ok(Outcome::Failed(format!("{} of {total} checks failed: {}", failures.len(), failures.join(", "))))
    }
}
