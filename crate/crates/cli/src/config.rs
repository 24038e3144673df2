use std::path::PathBuf;

use bertrand_core::{Family, ModelSpec};
use clap::{Args, ValueEnum};
use serde::Serialize;

use crate::error::CliError;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "BERTRAND_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Darboux3,
    Taubnut,
    Darboux3xi,
    Darboux4,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Darboux3, ModelKind::Taubnut, ModelKind::Darboux3xi, ModelKind::Darboux4];

    fn oscillator(self) -> bool {
        matches!(self, ModelKind::Darboux3 | ModelKind::Darboux3xi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; defaults to `$BERTRAND_OUT_DIR/<command>.<ext>` or stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

/// Model parameters. `--lambda` and `--eta` take comma-separated lists and
/// define the sweep; `--xi` and `--zeta` are fixed.
#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lambda: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub eta: Vec<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub xi: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub zeta: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
}

/// Fallback sweeps when a flag is omitted.
pub struct Defaults<'a> {
    pub lambda: &'a [f64],
    pub eta: &'a [f64],
    pub xi: f64,
    pub zeta: f64,
}

impl ModelArgs {
    /// One model per value of the sweep parameter, in the order given.
    pub fn models(&self, kind: ModelKind, dim: usize, defaults: &Defaults) -> Result<Vec<ModelSpec>, CliError> {
        let reject = |flag: &str| Err(CliError::Usage(format!("--{flag} does not apply to model {}", kind_name(kind))));
        if kind.oscillator() && !self.eta.is_empty() {
            return reject("eta");
        }
        if !kind.oscillator() && !self.lambda.is_empty() {
            return reject("lambda");
        }
        if kind != ModelKind::Darboux3xi && self.xi.is_some() {
            return reject("xi");
        }
        if kind != ModelKind::Darboux4 && self.zeta.is_some() {
            return reject("zeta");
        }
        let pick = |given: &[f64], fallback: &[f64]| if given.is_empty() { fallback.to_vec() } else { given.to_vec() };
        let xi = self.xi.unwrap_or(defaults.xi);
        let zeta = self.zeta.unwrap_or(defaults.zeta);
        let families: Vec<Family> = match kind {
            ModelKind::Darboux3 => pick(&self.lambda, defaults.lambda).into_iter().map(|lambda| Family::DarbouxIII { lambda }).collect(),
            ModelKind::Taubnut => pick(&self.eta, defaults.eta).into_iter().map(|eta| Family::TaubNut { eta }).collect(),
            ModelKind::Darboux3xi => pick(&self.lambda, defaults.lambda)
                .into_iter()
                .map(|lambda| Family::DarbouxIIIXi { lambda, xi })
                .collect(),
            ModelKind::Darboux4 => pick(&self.eta, defaults.eta).into_iter().map(|eta| Family::DarbouxIV { eta, zeta }).collect(),
        };
        families
            .into_iter()
            .map(|family| {
                let m = ModelSpec::new(family, dim).with_omega(self.omega).with_k(self.k).with_hbar(self.hbar);
                m.validate()?;
                Ok(m)
            })
            .collect()
    }
}

fn kind_name(kind: ModelKind) -> String {
    kind.to_possible_value().map(|v| v.get_name().to_owned()).unwrap_or_default()
}

/// Value of the sweep parameter (`λ` or `η`).
pub fn deformation(model: &ModelSpec) -> f64 {
    model.family.parameters()[0].1
}

/// `lambda=0.05 xi=0.01`.
pub fn parameter_label(model: &ModelSpec) -> String {
    model
        .family
        .parameters()
        .iter()
        .map(|(name, v)| format!("{name}={v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Fully resolved settings of one run, embedded in every output file. The
/// output path is left out so that reruns into different files compare
/// byte for byte.
#[derive(Debug, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub models: Vec<ModelSpec>,
    pub settings: serde_json::Value,
    pub seed: u64,
    pub format: Format,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args() -> ModelArgs {
        ModelArgs { lambda: vec![], eta: vec![], xi: None, zeta: None, omega: 1.0, k: 1.0, hbar: 1.0 }
    }

    const D: Defaults = Defaults { lambda: &[0.0, 0.01], eta: &[0.5], xi: 0.01, zeta: 0.02 };

    #[test]
    fn defaults_fill_the_sweep() {
        let m = args().models(ModelKind::Darboux3, 3, &D).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(deformation(&m[1]), 0.01);
        let m = args().models(ModelKind::Darboux4, 2, &D).unwrap();
        assert_eq!(parameter_label(&m[0]), "eta=0.5 zeta=0.02");
    }

    #[test]
    fn foreign_flags_are_rejected() {
        let mut a = args();
        a.eta = vec![0.1];
        assert!(matches!(a.models(ModelKind::Darboux3, 3, &D), Err(CliError::Usage(_))));
        let mut a = args();
        a.xi = Some(0.1);
        assert!(a.models(ModelKind::Taubnut, 3, &D).is_err());
    }

    #[test]
    fn invalid_values_surface_as_model_errors() {
        let mut a = args();
        a.lambda = vec![-0.1];
        assert!(matches!(a.models(ModelKind::Darboux3, 3, &D), Err(CliError::Model(_))));
    }
}
