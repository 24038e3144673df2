//! Classical Hamiltonians, their integrals of motion, and the numerical
//! machinery that checks superintegrability: exact Poisson brackets,
//! functional-independence ranks, trajectory integration and orbit closure.

mod functions;
mod integrator;
mod closure;
mod sampler;

pub use closure::{detect_closure, Closure};
pub use functions::{
    angular_integral, declared_integrals, fradkin_component, hamiltonian, independence_rank,
    poisson_bracket, runge_lenz_component, scaled_poisson_bracket, singular_values, Anchor,
    PhaseFunction, RANK_TOLERANCE,
};
pub use integrator::{integrate_trajectory, IntegratorOptions, Termination, Trajectory};
pub use sampler::StateSampler;

use serde::Serialize;

use crate::error::{Error, Result};

/// Canonical coordinates `(q, p) ∈ ℝᴺ × ℝᴺ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseState {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

impl PhaseState {
    pub fn new(q: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if q.len() != p.len() {
            return Err(Error::InvalidParameter(format!(
                "position has {} components, momentum {}",
                q.len(),
                p.len()
            )));
        }
        Ok(PhaseState { q, p })
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn radius(&self) -> f64 {
        self.q.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// `(q₁…q_N, p₁…p_N)`.
    pub fn to_vec(&self) -> Vec<f64> {
        self.q.iter().chain(&self.p).copied().collect()
    }

    pub fn from_slice(z: &[f64]) -> Self {
        let n = z.len() / 2;
        PhaseState { q: z[..n].to_vec(), p: z[n..].to_vec() }
    }
}
