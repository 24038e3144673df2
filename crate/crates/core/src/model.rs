//! Model catalogue shared by every other module.

use serde::Serialize;

use crate::error::{Error, Result};

/// Smallest radius accepted for the Coulomb-type families, whose curvature
/// and potential diverge at the origin.
pub const COULOMB_R_MIN: f64 = 1e-12;

/// Two-parameter families reject points with `1 − ξr⁴` (resp. `1 − ζr²`)
/// below this value.
pub const SINGULARITY_GUARD: f64 = 1e-9;

/// The four Hamiltonian families with their deformation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family")]
pub enum Family {
    /// Oscillator on the Darboux III space, `ds² = (1 + λr²) dq²`.
    #[serde(rename = "darboux3")]
    DarbouxIII { lambda: f64 },
    /// Coulomb system on the reduced Taub–NUT space, `ds² = (1 + η/r) dq²`.
    #[serde(rename = "taubnut")]
    TaubNut { eta: f64 },
    /// Two-parameter oscillator, `ds² = (1 + λr² + ξr⁴) / (1 − ξr⁴)² dq²`.
    #[serde(rename = "darboux3xi")]
    DarbouxIIIXi { lambda: f64, xi: f64 },
    /// Two-parameter Coulomb system on the Darboux IV space,
    /// `ds² = (η + r + ηζr²) / ((1 − ζr²)² r) dq²`.
    #[serde(rename = "darboux4")]
    DarbouxIV { eta: f64, zeta: f64 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::DarbouxIII { .. } => "darboux3",
            Family::TaubNut { .. } => "taubnut",
            Family::DarbouxIIIXi { .. } => "darboux3xi",
            Family::DarbouxIV { .. } => "darboux4",
        }
    }

    /// True for the Coulomb-type families (singular at the origin).
    pub fn is_coulomb(&self) -> bool {
        matches!(self, Family::TaubNut { .. } | Family::DarbouxIV { .. })
    }

    /// Same family with all deformation parameters set to zero.
    pub fn flat(&self) -> Family {
        match self {
            Family::DarbouxIII { .. } => Family::DarbouxIII { lambda: 0.0 },
            Family::TaubNut { .. } => Family::TaubNut { eta: 0.0 },
            Family::DarbouxIIIXi { .. } => Family::DarbouxIIIXi { lambda: 0.0, xi: 0.0 },
            Family::DarbouxIV { .. } => Family::DarbouxIV { eta: 0.0, zeta: 0.0 },
        }
    }

    /// Deformation parameters by name, in declaration order.
    pub fn parameters(&self) -> Vec<(&'static str, f64)> {
        match *self {
            Family::DarbouxIII { lambda } => vec![("lambda", lambda)],
            Family::TaubNut { eta } => vec![("eta", eta)],
            Family::DarbouxIIIXi { lambda, xi } => vec![("lambda", lambda), ("xi", xi)],
            Family::DarbouxIV { eta, zeta } => vec![("eta", eta), ("zeta", zeta)],
        }
    }
}

/// A fully specified model: family, coupling constants and dimension.
///
/// `omega` is read by the oscillator families and `k` by the Coulomb ones;
/// both default to 1, as does `hbar`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelSpec {
    #[serde(flatten)]
    pub family: Family,
    pub omega: f64,
    pub k: f64,
    pub hbar: f64,
    pub dim: usize,
}

impl ModelSpec {
    pub fn new(family: Family, dim: usize) -> Self {
        ModelSpec { family, omega: 1.0, k: 1.0, hbar: 1.0, dim }
    }

    pub fn darboux_iii(lambda: f64, dim: usize) -> Self {
        Self::new(Family::DarbouxIII { lambda }, dim)
    }

    pub fn taub_nut(eta: f64, dim: usize) -> Self {
        Self::new(Family::TaubNut { eta }, dim)
    }

    pub fn darboux_iii_xi(lambda: f64, xi: f64, dim: usize) -> Self {
        Self::new(Family::DarbouxIIIXi { lambda, xi }, dim)
    }

    pub fn darboux_iv(eta: f64, zeta: f64, dim: usize) -> Self {
        Self::new(Family::DarbouxIV { eta, zeta }, dim)
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn with_k(mut self, k: f64) -> Self {
        self.k = k;
        self
    }

    pub fn with_hbar(mut self, hbar: f64) -> Self {
        self.hbar = hbar;
        self
    }

    /// Same couplings and dimension with the deformation switched off.
    pub fn flat(&self) -> Self {
        ModelSpec { family: self.family.flat(), ..*self }
    }

    pub fn name(&self) -> &'static str {
        self.family.name()
    }

    pub fn is_coulomb(&self) -> bool {
        self.family.is_coulomb()
    }

    /// Rejects negative deformations, `N < 2`, non-positive `ħ`, `ω` or `k`.
    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::InvalidParameter(format!("dimension N = {} must be >= 2", self.dim)));
        }
        for (name, value) in [("hbar", self.hbar), ("omega", self.omega), ("k", self.k)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} = {value} must be positive")));
            }
        }
        for (name, value) in self.family.parameters() {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "deformation {name} = {value} must be finite and non-negative"
                )));
            }
        }
        Ok(())
    }

    /// Radius of the metric singularity of the two-parameter families.
    pub fn singular_radius(&self) -> Option<f64> {
        match self.family {
            Family::DarbouxIIIXi { xi, .. } if xi > 0.0 => Some(xi.powf(-0.25)),
            Family::DarbouxIV { zeta, .. } if zeta > 0.0 => Some(zeta.powf(-0.5)),
            _ => None,
        }
    }

    /// Distance-like margin `1 − ξr⁴` or `1 − ζr²` to the metric singularity;
    /// `None` for the one-parameter families.
    pub fn singularity_margin(&self, r: f64) -> Option<f64> {
        match self.family {
            Family::DarbouxIIIXi { xi, .. } => Some(1.0 - xi * r.powi(4)),
            Family::DarbouxIV { zeta, .. } => Some(1.0 - zeta * r * r),
            _ => None,
        }
    }

    /// Domain guard for geometric quantities, which need `r > 0`.
    pub fn check_radius(&self, r: f64) -> Result<()> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::Domain(format!("radius r = {r} must be positive")));
        }
        self.check_state_radius(r)
    }

    /// Domain guard for phase-space functions: the oscillator families are
    /// regular at `r = 0`, the Coulomb ones are not.
    pub fn check_state_radius(&self, r: f64) -> Result<()> {
        if !r.is_finite() {
            return Err(Error::Domain(format!("radius r = {r} is not finite")));
        }
        if self.is_coulomb() && r < COULOMB_R_MIN {
            return Err(Error::Domain(format!(
                "{}: radius r = {r:e} below {COULOMB_R_MIN:e} (origin is singular)",
                self.name()
            )));
        }
        if let Some(margin) = self.singularity_margin(r) {
            if margin < SINGULARITY_GUARD {
                return Err(Error::Domain(format!(
                    "{}: radius r = {r} at or beyond the metric singularity (margin {margin:e})",
                    self.name()
                )));
            }
        }
        Ok(())
    }
}
