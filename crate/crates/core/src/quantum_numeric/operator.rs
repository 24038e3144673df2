use serde::Serialize;

use super::grid::RadialGrid;
use crate::error::{Error, Result};
use crate::geometry::{conformal_factor, curvature_from_conformal, measure_weight};
use crate::model::{Family, ModelSpec};

/// Pieces of the effective potential at one node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialTerms {
    /// `ħ² l(l+N−2) / (2r²f²)`.
    pub centrifugal: f64,
    /// The classical potential `U(r)`.
    pub external: f64,
    /// Conformal coupling `ħ²(N−2)R / (8(N−1))`.
    pub curvature: f64,
    /// `(ħ²/2)(σ_s² + σ_ss)` with `σ = ((N−1)/2) ln(f r)`, from removing the
    /// first-derivative term.
    pub liouville: f64,
}

impl PotentialTerms {
    pub fn total(&self) -> f64 {
        self.centrifugal + self.external + self.curvature + self.liouville
    }
}

fn external_potential(model: &ModelSpec, r: f64) -> f64 {
    match model.family {
        Family::DarbouxIII { lambda } => model.omega * model.omega * r * r / (2.0 * (1.0 + lambda * r * r)),
        Family::TaubNut { eta } => -model.k / (eta + r),
        Family::DarbouxIIIXi { lambda, xi } => {
            model.omega * model.omega * r * r / (2.0 * (1.0 + lambda * r * r + xi * r.powi(4)))
        }
        Family::DarbouxIV { eta, zeta } => -model.k * (1.0 + zeta * r * r) / (eta + r + eta * zeta * r * r),
    }
}

/// Effective potential of the radial equation in Liouville normal form.
pub fn potential_terms(model: &ModelSpec, l: usize, r: f64) -> Result<PotentialTerms> {
    let c = conformal_factor(model, r)?;
    let n = model.dim as f64;
    let hb2 = model.hbar * model.hbar;
    let big_l = (l as f64) * (l as f64 + n - 2.0);
    let a = (n - 1.0) / 2.0;
    let (f, df, d2f) = (c.f, c.df, c.d2f);
    let sigma_r = a * (df / f + 1.0 / r);
    let sigma_s = sigma_r / f;
    let sigma_rr = a * (d2f / f - df * df / (f * f) - 1.0 / (r * r));
    let sigma_ss = (sigma_rr - sigma_r * df / f) / (f * f);
    Ok(PotentialTerms {
        centrifugal: hb2 * big_l / (2.0 * r * r * f * f),
        external: external_potential(model, r),
        curvature: hb2 * (n - 2.0) * curvature_from_conformal(&c, model.dim) / (8.0 * (n - 1.0)),
        liouville: 0.5 * hb2 * (sigma_s * sigma_s + sigma_ss),
    })
}

/// Conformal-Laplacian Hamiltonian restricted to angular momentum `l`,
/// discretized on the interior nodes of `grid` as a symmetric tridiagonal
/// matrix acting on `v = weight · φ`.
#[derive(Debug, Clone)]
pub struct RadialOperator {
    pub model: ModelSpec,
    pub l: usize,
    pub grid: RadialGrid,
    pub diag: Vec<f64>,
    /// `offdiag[i]` couples interior nodes `i` and `i + 1`.
    pub offdiag: Vec<f64>,
    /// `√(f^{N−1} r^{N−1})`, the square root of the measure density per unit
    /// arc length, at interior nodes.
    pub weight: Vec<f64>,
    pub potential: Vec<f64>,
}

pub fn build_radial_operator(model: &ModelSpec, l: usize, grid: &RadialGrid) -> Result<RadialOperator> {
    model.validate()?;
    if !matches!(model.family, Family::DarbouxIII { .. } | Family::TaubNut { .. }) {
        return Err(Error::Unsupported(format!("no radial quantum model for {}", model.name())));
    }
    let h = grid.h;
    let kin = model.hbar * model.hbar / (h * h);
    let interior = grid.interior();
    let mut potential = Vec::with_capacity(interior.len());
    let mut weight = Vec::with_capacity(interior.len());
    for &r in interior {
        potential.push(potential_terms(model, l, r)?.total());
        let f = conformal_factor(model, r)?.f;
        weight.push((measure_weight(model, r)? / f).sqrt());
    }
    let diag = potential.iter().map(|v| kin + v).collect();
    let offdiag = vec![-0.5 * kin; interior.len().saturating_sub(1)];
    Ok(RadialOperator { model: *model, l, grid: grid.clone(), diag, offdiag, weight, potential })
}

impl RadialOperator {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// `S·v` for the symmetric matrix.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * v[i];
                if i > 0 {
                    acc += self.offdiag[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    acc += self.offdiag[i] * v[i + 1];
                }
                acc
            })
            .collect()
    }

    /// Bands `(lower, diag, upper)` of the operator acting on `φ` itself,
    /// `A = W^{−1/2} S W^{1/2}` with `W = diag(weight²)`.
    pub fn unsymmetrized(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let w = &self.weight;
        let lower = (0..self.offdiag.len()).map(|i| self.offdiag[i] * w[i] / w[i + 1]).collect();
        let upper = (0..self.offdiag.len()).map(|i| self.offdiag[i] * w[i + 1] / w[i]).collect();
        (lower, self.diag.clone(), upper)
    }

    /// Largest relative entry of `W·A − Aᵀ·W`, which vanishes when `A` is
    /// self-adjoint for the discrete measure `W`.
    pub fn self_adjointness_defect(&self) -> f64 {
        let (lower, _, upper) = self.unsymmetrized();
        let w2: Vec<f64> = self.weight.iter().map(|w| w * w).collect();
        (0..upper.len())
            .map(|i| {
                // (W·A)_{i,i+1} against (Aᵀ·W)_{i,i+1} = A_{i+1,i} W_{i+1}
                let a = w2[i] * upper[i];
                let b = lower[i] * w2[i + 1];
                (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curvature_term_closed_forms() {
        // r = 1, λ = 0.1, N = 3, ħ = ω = 1
        let m = ModelSpec::darboux_iii(0.1, 3);
        let t = potential_terms(&m, 0, 1.0).unwrap();
        assert!((t.external - 1.0 / 2.2).abs() < 1e-15);
        let closed = -0.1 * (6.0 + 0.3) / (8.0 * 1.1f64.powi(3));
        assert!((t.curvature - closed).abs() < 1e-14, "{} vs {closed}", t.curvature);
        assert_eq!(t.centrifugal, 0.0);
        let t1 = potential_terms(&m, 2, 1.0).unwrap();
        assert!((t1.centrifugal - 6.0 / (2.0 * 1.1)).abs() < 1e-14);

        // Taub–NUT at r = 1, η = 0.5, N = 4
        let m = ModelSpec::taub_nut(0.5, 4);
        let t = potential_terms(&m, 0, 1.0).unwrap();
        let closed = 0.5 * 2.0 * (4.0 * 1.0 + 3.0 * 0.5 * 2.0) / (32.0 * 1.5f64.powi(3));
        assert!((t.curvature - closed).abs() < 1e-14);
        assert!((t.external + 1.0 / 1.5).abs() < 1e-15);
    }

    #[test]
    fn liouville_term_flat_limit() {
        // flat space: σ = ((N−1)/2) ln r gives (N−1)(N−3)/(8r²) with ħ = 1
        for n in 2..6 {
            let m = ModelSpec::darboux_iii(0.0, n);
            let t = potential_terms(&m, 0, 0.7).unwrap();
            let expect = ((n - 1) as f64) * (n as f64 - 3.0) / (8.0 * 0.49);
            assert!((t.liouville - expect).abs() < 1e-13);
            assert_eq!(t.curvature, 0.0);
        }
    }

    #[test]
    fn symmetric_witness() {
        let m = ModelSpec::darboux_iii(0.02, 3);
        let g = RadialGrid::new(&m, 1e-6, 20.0, 2001).unwrap();
        let op = build_radial_operator(&m, 1, &g).unwrap();
        assert_eq!(op.dim(), 1999);
        assert!(op.self_adjointness_defect() < 1e-12);
        assert!(build_radial_operator(&ModelSpec::darboux_iv(0.1, 0.1, 3), 0, &g).is_err());
    }
}
