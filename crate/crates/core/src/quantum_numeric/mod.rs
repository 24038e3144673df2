//! Finite-difference eigensolver for the radial conformal-Laplacian
//! Hamiltonians, used as an independent check of the closed-form spectra.
//!
//! At angular momentum `l` the radial function `φ(r)` of the conformally
//! flat metric `f(r)² dq²` obeys
//!
//! ```text
//! −(ħ²/2) f⁻²[φ'' + ((N−1)/r + (N−2)f'/f) φ' − l(l+N−2)/r² φ]
//!     + U φ + ħ²(N−2)R/(8(N−1)) φ = E φ.
//! ```
//!
//! In the geodesic radius `s = ∫ f dr` and with `v = (f r)^{(N−1)/2} φ` this
//! becomes `−(ħ²/2) v_ss + V v = E v`, which is discretized with the
//! three-point stencil on a grid uniform in `s`. See [`potential_terms`].

mod grid;
mod operator;
pub mod tridiag;

pub use grid::{arc_length, radius_from_arc_length, RadialGrid, DEFAULT_R_MIN};
pub use operator::{build_radial_operator, potential_terms, PotentialTerms, RadialOperator};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{conformal_factor, measure_weight};
use crate::model::{Family, ModelSpec};
use crate::quantum_analytic::{oscillator_threshold, radial_eigenfunction};

/// Default node count of oscillator grids.
pub const DEFAULT_NPTS: usize = 4000;
/// Target arc-length spacing of Coulomb grids in units of `ħ²/k`.
pub const COULOMB_SPACING: f64 = 0.005;
/// Boundary value of the analytic eigenfunction, relative to its maximum,
/// below which the box is large enough.
pub const TAIL_TOLERANCE: f64 = 1e-12;
/// Oscillator states within this fraction of the threshold are discarded.
pub const THRESHOLD_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundState {
    pub index: usize,
    pub energy: f64,
    pub l: usize,
    /// `‖(S − E)v‖ / ‖v‖`.
    pub residual: f64,
    /// Unit-norm eigenvector of the symmetric matrix on interior nodes.
    #[serde(skip)]
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundStates {
    pub states: Vec<BoundState>,
    /// Box states at or above the threshold margin.
    pub artifacts: Vec<f64>,
    /// Fewer than the requested number of states fell below the cutoff.
    pub truncated: bool,
}

impl BoundStates {
    pub fn energies(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.energy).collect()
    }
}

/// Bottom of the continuous spectrum.
pub fn continuum_threshold(model: &ModelSpec) -> Result<f64> {
    match model.family {
        Family::DarbouxIII { lambda } => Ok(oscillator_threshold(lambda, model.omega)),
        Family::TaubNut { .. } => Ok(0.0),
        _ => Err(Error::Unsupported(format!("quantization of {} is not modelled", model.name()))),
    }
}

/// The `count` lowest eigenvalues of the operator, filtered to those
/// strictly below `threshold − 10⁻³|threshold|`.
pub fn solve_bound_states(op: &RadialOperator, count: usize, threshold: f64) -> Result<BoundStates> {
    if count == 0 {
        return Err(Error::InvalidParameter("at least one state must be requested".into()));
    }
    let cutoff = if threshold.is_finite() { threshold - THRESHOLD_MARGIN * threshold.abs() } else { threshold };
    let mut states = Vec::new();
    let mut artifacts = Vec::new();
    for k in 0..count.min(op.dim()) {
        let energy = tridiag::eigenvalue(&op.diag, &op.offdiag, k);
        if energy >= cutoff {
            artifacts.push(energy);
            continue;
        }
        let vector = tridiag::eigenvector(&op.diag, &op.offdiag, energy);
        let sv = op.apply(&vector);
        let residual = sv.iter().zip(&vector).map(|(a, v)| (a - energy * v).powi(2)).sum::<f64>().sqrt();
        states.push(BoundState { index: k, energy, l: op.l, residual, vector });
    }
    let truncated = states.len() < count;
    Ok(BoundStates { states, artifacts, truncated })
}

/// `‖(S − E)v‖ / ‖S v‖` for an analytic radial profile `φ` sampled at the
/// grid nodes and mapped by the same weight, `vᵢ = √(f^{N−1} rᵢ^{N−1}) φ(rᵢ)`.
///
/// The stencil at the first and last interior nodes uses the sampled
/// boundary values, so the result is the local truncation error of the
/// scheme rather than the mismatch with the homogeneous boundary condition.
pub fn residual_check<F>(op: &RadialOperator, analytic: F, energy: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let model = &op.model;
    let sample = |r: f64| -> Result<f64> {
        let f = conformal_factor(model, r)?.f;
        Ok((measure_weight(model, r)? / f).sqrt() * analytic(r)?)
    };
    let radii = &op.grid.radii;
    let v = op
        .grid
        .interior()
        .iter()
        .zip(&op.weight)
        .map(|(&r, w)| Ok(w * analytic(r)?))
        .collect::<Result<Vec<f64>>>()?;
    let mut sv = op.apply(&v);
    let coupling = -0.5 * model.hbar * model.hbar / (op.grid.h * op.grid.h);
    let last = sv.len() - 1;
    sv[0] += coupling * sample(radii[0])?;
    sv[last] += coupling * sample(radii[radii.len() - 1])?;
    let num = sv.iter().zip(&v).map(|(a, b)| (a - energy * b).powi(2)).sum::<f64>().sqrt();
    let den = sv.iter().map(|a| a * a).sum::<f64>().sqrt();
    Ok(num / den)
}

/// `|v(r)|/max|v|` of the closed-form state `(n_r, l)` at `r`, where
/// `v = √(measure / f) · φ`.
fn relative_tail(model: &ModelSpec, n_r: usize, l: usize, r_max: f64) -> Result<f64> {
    let v = |r: f64| -> Result<f64> {
        let f = conformal_factor(model, r)?.f;
        Ok((measure_weight(model, r)? / f).sqrt() * radial_eigenfunction(model, n_r, l, r)?.abs())
    };
    let samples = 2000;
    let mut peak: f64 = 0.0;
    for i in 1..=samples {
        peak = peak.max(v(r_max * i as f64 / samples as f64)?);
    }
    Ok(v(r_max)? / peak)
}

/// Default grid for the lowest `count` states at angular momentum `l`.
///
/// The box starts at `20√(ħ/ω)` (oscillator) or `60ħ²M/k` (Coulomb, with
/// `M` for the highest state) and grows by 25% until the closed-form
/// eigenfunction of the highest state has decayed below [`TAIL_TOLERANCE`].
/// Oscillator grids use [`DEFAULT_NPTS`] nodes; Coulomb grids keep the
/// arc-length spacing at [`COULOMB_SPACING`]`·ħ²/k`.
pub fn default_grid(model: &ModelSpec, l: usize, count: usize) -> Result<RadialGrid> {
    model.validate()?;
    if count == 0 {
        return Err(Error::InvalidParameter("at least one state must be requested".into()));
    }
    let n_top = count - 1;
    let mut r_max = match model.family {
        Family::DarbouxIII { .. } => 20.0 * (model.hbar / model.omega).sqrt(),
        Family::TaubNut { .. } => {
            let m = (n_top + l) as f64 + (model.dim as f64 - 1.0) / 2.0;
            60.0 * model.hbar * model.hbar * m / model.k
        }
        _ => return Err(Error::Unsupported(format!("quantization of {} is not modelled", model.name()))),
    };
    for _ in 0..60 {
        if relative_tail(model, n_top, l, r_max)? < TAIL_TOLERANCE {
            break;
        }
        r_max *= 1.25;
    }
    let npts = if model.is_coulomb() {
        let span = arc_length(model, r_max)? - arc_length(model, DEFAULT_R_MIN)?;
        let h = COULOMB_SPACING * model.hbar * model.hbar / model.k;
        DEFAULT_NPTS.max((span / h).ceil() as usize + 1)
    } else {
        DEFAULT_NPTS
    };
    RadialGrid::new(model, DEFAULT_R_MIN, r_max, npts)
}

/// Lowest `count` bound states at angular momentum `l` on the default grid.
pub fn solve_radial(model: &ModelSpec, l: usize, count: usize) -> Result<BoundStates> {
    let grid = default_grid(model, l, count)?;
    let op = build_radial_operator(model, l, &grid)?;
    solve_bound_states(&op, count, continuum_threshold(model)?)
}

/// Removes the `h²` term from two eigenvalues on grids with spacing `h`
/// and `h/2`.
pub fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

/// Least-squares slope of `ln|error|` against `ln h`.
pub fn convergence_exponent(h: &[f64], errors: &[f64]) -> f64 {
    let xs: Vec<f64> = h.iter().map(|x| x.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.abs().ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Observed order `log₂(|E₀ − E₁| / |E₁ − E₂|)` from three grids with
/// spacings `h`, `h/2`, `h/4`. Unlike a fit against the exact value it is
/// blind to the `h`-independent shift caused by the inner wall at `r_min`.
pub fn observed_order(coarse: f64, mid: f64, fine: f64) -> f64 {
    ((coarse - mid) / (mid - fine)).abs().log2()
}

/// Eigenvalues of the same states on successively halved grids.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinementStudy {
    pub l: usize,
    pub npts: Vec<usize>,
    pub h: Vec<f64>,
    /// `energies[g][k]`: state `k` on grid `g`.
    pub energies: Vec<Vec<f64>>,
    /// Richardson values from the two finest grids.
    pub extrapolated: Vec<f64>,
}

pub fn refinement_study(model: &ModelSpec, l: usize, count: usize, base: &RadialGrid, levels: usize) -> Result<RefinementStudy> {
    if levels < 2 {
        return Err(Error::InvalidParameter("a refinement study needs at least two grids".into()));
    }
    let threshold = continuum_threshold(model)?;
    let mut grid = base.clone();
    let mut study = RefinementStudy { l, npts: vec![], h: vec![], energies: vec![], extrapolated: vec![] };
    for g in 0..levels {
        if g > 0 {
            grid = grid.refined(model)?;
        }
        let op = build_radial_operator(model, l, &grid)?;
        let states = solve_bound_states(&op, count, threshold)?;
        if states.truncated {
            return Err(Error::Domain(format!("only {} of {count} states are bound on the grid", states.states.len())));
        }
        study.npts.push(grid.npts);
        study.h.push(grid.h);
        study.energies.push(states.energies());
    }
    let (c, f) = (&study.energies[levels - 2], &study.energies[levels - 1]);
    study.extrapolated = c.iter().zip(f).map(|(&c, &f)| richardson(c, f)).collect();
    Ok(study)
}
