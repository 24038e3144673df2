use bertrand_core::quantum_analytic::{spectrum_table, QuantumNumbers};
use clap::Args;
use rayon::prelude::*;

use crate::config::{deformation, Defaults, ModelArgs, ModelKind, OutputArgs, RunConfig};
use crate::error::CliError;
use crate::output::{Cell, Report};
use crate::Outcome;

pub const COLUMNS: [&str; 7] = ["family", "deformation", "n", "energy", "degeneracy", "threshold", "flat_energy"];

const DEFAULTS: Defaults = Defaults { lambda: &[0.0, 0.01, 0.02, 0.04], eta: &[0.0, 0.2, 0.4, 0.6, 1.0], xi: 0.0, zeta: 0.0 };

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long, value_enum)]
    pub model: ModelKind,
    #[command(flatten)]
    pub params: ModelArgs,
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    /// Highest level: `n` for the oscillator, principal number `n_r + l`
    /// for the Coulomb system. Defaults to 25 and 3 respectively.
    #[arg(long)]
    pub nmax: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn run(args: SpectrumArgs) -> Result<Outcome, CliError> {
    let models = args.params.models(args.model, args.dim, &DEFAULTS)?;
    let nmax = args.nmax.unwrap_or(if args.model == ModelKind::Taubnut { 3 } else { 25 });
    let tables = models.par_iter().map(|m| spectrum_table(m, nmax)).collect::<Result<Vec<_>, _>>()?;

    let config = RunConfig {
        command: "spectrum",
        models: models.clone(),
        settings: serde_json::json!({ "nmax": nmax }),
        seed: args.output.seed,
        format: args.output.format,
    };
    let mut report = Report::new(config, &COLUMNS);
    for (model, table) in models.iter().zip(tables) {
        for entry in table {
            let n = match entry.quantum_numbers {
                QuantumNumbers::Oscillator { n } => n,
                QuantumNumbers::Coulomb { principal } => principal,
            };
            report.push_row(vec![
                Cell::from(model.name()),
                deformation(model).into(),
                n.into(),
                entry.energy.into(),
                entry.degeneracy.into(),
                entry.threshold.into(),
                entry.flat_energy.into(),
            ]);
        }
    }
    report.emit(&args.output)?;
    Ok(Outcome::Success)
}
