use nalgebra::DMatrix;

use super::PhaseState;
use crate::dual::{gradient, Dual, Scalar};
use crate::error::{Error, Result};
use crate::model::{Family, ModelSpec};

/// Singular values below `RANK_TOLERANCE · σ_max` count as zero.
pub const RANK_TOLERANCE: f64 = 1e-8;

fn norm2<S: Scalar>(v: &[S]) -> S {
    v.iter().fold(S::zero(), |acc, &x| acc + x * x)
}

/// `H = T(q, p) + U(q)` for each family, generic over the scalar type.
pub(crate) fn hamiltonian_generic<S: Scalar>(model: &ModelSpec, q: &[S], p: &[S]) -> S {
    let q2 = norm2(q);
    let p2 = norm2(p);
    match model.family {
        Family::DarbouxIII { lambda } => {
            (p2 + q2 * (model.omega * model.omega)) / ((q2 * lambda + 1.0) * 2.0)
        }
        Family::TaubNut { eta } => {
            let r = q2.sqrt();
            let den = r + eta;
            r * p2 / (den * 2.0) - S::cst(model.k) / den
        }
        Family::DarbouxIIIXi { lambda, xi } => {
            let q4 = q2 * q2;
            let a = q2 * lambda + q4 * xi + 1.0;
            let b = S::cst(1.0) - q4 * xi;
            (b * b * p2 + q2 * (model.omega * model.omega)) / (a * 2.0)
        }
        Family::DarbouxIV { eta, zeta } => {
            let r = q2.sqrt();
            let a = r + q2 * (eta * zeta) + eta;
            let b = S::cst(1.0) - q2 * zeta;
            b * b * r * p2 / (a * 2.0) - (q2 * zeta + 1.0) * model.k / a
        }
    }
}

/// Which end of the index range an angular-momentum Casimir is anchored to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Anchor {
    /// `C^(m) = Σ_{1≤i<j≤m} L_ij²`.
    Upper,
    /// `C_(m) = Σ_{N−m<i<j≤N} L_ij²`.
    Lower,
}

fn casimir_generic<S: Scalar>(q: &[S], p: &[S], m: usize, anchor: Anchor) -> S {
    let n = q.len();
    let range = match anchor {
        Anchor::Upper => 0..m,
        Anchor::Lower => n - m..n,
    };
    let mut acc = S::zero();
    for i in range.clone() {
        for j in i + 1..range.end {
            let l = q[i] * p[j] - q[j] * p[i];
            acc = acc + l * l;
        }
    }
    acc
}

/// Sign `+1` gives the conserved quantity; `−1` flips the deformation or
/// potential term and serves as a sensitivity control for the checks.
fn fradkin_generic<S: Scalar>(model: &ModelSpec, q: &[S], p: &[S], i: usize, j: usize, sign: f64) -> S {
    let Family::DarbouxIII { lambda } = model.family else { unreachable!() };
    let h = hamiltonian_generic(model, q, p);
    p[i] * p[j] - (h * (2.0 * lambda) - model.omega * model.omega) * (q[i] * q[j]) * sign
}

fn runge_lenz_generic<S: Scalar>(model: &ModelSpec, q: &[S], p: &[S], i: usize, sign: f64) -> S {
    let Family::TaubNut { eta } = model.family else { unreachable!() };
    let h = hamiltonian_generic(model, q, p);
    let r = norm2(q).sqrt();
    let mut acc = S::zero();
    for j in 0..q.len() {
        acc = acc + p[j] * (q[j] * p[i] - q[i] * p[j]);
    }
    acc + q[i] / r * (h * eta + model.k) * sign
}

/// A smooth function on phase space with exact first derivatives.
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseFunction {
    Hamiltonian(ModelSpec),
    /// Angular-momentum Casimir `C^(m)` or `C_(m)`.
    Casimir { m: usize, anchor: Anchor },
    /// Deformed Demkov–Fradkin tensor component `I_ij` (Darboux III only).
    Fradkin { model: ModelSpec, i: usize, j: usize },
    /// Deformed Runge–Lenz component `R_i` (Taub–NUT only).
    RungeLenz { model: ModelSpec, i: usize },
    Position(usize),
    Momentum(usize),
    /// Fradkin or Runge–Lenz with the sign of its potential term flipped.
    /// Not conserved; used to check that the suites can fail.
    Tampered(Box<PhaseFunction>),
}

impl PhaseFunction {
    pub fn hamiltonian(model: &ModelSpec) -> Self {
        PhaseFunction::Hamiltonian(*model)
    }

    pub fn casimir(dim: usize, m: usize, anchor: Anchor) -> Result<Self> {
        if !(2..=dim).contains(&m) {
            return Err(Error::Index(format!("Casimir index m = {m} outside 2..={dim}")));
        }
        Ok(PhaseFunction::Casimir { m, anchor })
    }

    pub fn fradkin(model: &ModelSpec, i: usize, j: usize) -> Result<Self> {
        if !matches!(model.family, Family::DarbouxIII { .. }) {
            return Err(Error::Unsupported(format!("Fradkin tensor is defined for darboux3, not {}", model.name())));
        }
        if i >= model.dim || j >= model.dim {
            return Err(Error::Index(format!("Fradkin index ({i}, {j}) outside 0..{}", model.dim)));
        }
        Ok(PhaseFunction::Fradkin { model: *model, i, j })
    }

    pub fn runge_lenz(model: &ModelSpec, i: usize) -> Result<Self> {
        if !matches!(model.family, Family::TaubNut { .. }) {
            return Err(Error::Unsupported(format!("Runge-Lenz vector is defined for taubnut, not {}", model.name())));
        }
        if i >= model.dim {
            return Err(Error::Index(format!("Runge-Lenz index {i} outside 0..{}", model.dim)));
        }
        Ok(PhaseFunction::RungeLenz { model: *model, i })
    }

    pub fn tampered(self) -> Result<Self> {
        match self {
            PhaseFunction::Fradkin { .. } | PhaseFunction::RungeLenz { .. } => Ok(PhaseFunction::Tampered(Box::new(self))),
            other => Err(Error::Unsupported(format!("cannot tamper with {}", other.name()))),
        }
    }

    /// Label used in reports, with 1-based indices.
    pub fn name(&self) -> String {
        match self {
            PhaseFunction::Hamiltonian(m) => format!("H[{}]", m.name()),
            PhaseFunction::Casimir { m, anchor: Anchor::Upper } => format!("C^({m})"),
            PhaseFunction::Casimir { m, anchor: Anchor::Lower } => format!("C_({m})"),
            PhaseFunction::Fradkin { i, j, .. } => format!("I_{}{}", i + 1, j + 1),
            PhaseFunction::RungeLenz { i, .. } => format!("R_{}", i + 1),
            PhaseFunction::Position(i) => format!("q_{}", i + 1),
            PhaseFunction::Momentum(i) => format!("p_{}", i + 1),
            PhaseFunction::Tampered(inner) => format!("tampered {}", inner.name()),
        }
    }

    fn model(&self) -> Option<&ModelSpec> {
        match self {
            PhaseFunction::Hamiltonian(m) | PhaseFunction::Fradkin { model: m, .. } | PhaseFunction::RungeLenz { model: m, .. } => Some(m),
            PhaseFunction::Tampered(inner) => inner.model(),
            _ => None,
        }
    }

    fn eval_signed<S: Scalar>(&self, q: &[S], p: &[S], sign: f64) -> S {
        match self {
            PhaseFunction::Hamiltonian(m) => hamiltonian_generic(m, q, p),
            PhaseFunction::Casimir { m, anchor } => casimir_generic(q, p, *m, *anchor),
            PhaseFunction::Fradkin { model, i, j } => fradkin_generic(model, q, p, *i, *j, sign),
            PhaseFunction::RungeLenz { model, i } => runge_lenz_generic(model, q, p, *i, sign),
            PhaseFunction::Position(i) => q[*i],
            PhaseFunction::Momentum(i) => p[*i],
            PhaseFunction::Tampered(inner) => inner.eval_signed(q, p, -sign),
        }
    }

    /// Unchecked evaluation on any scalar type.
    pub fn eval<S: Scalar>(&self, q: &[S], p: &[S]) -> S {
        self.eval_signed(q, p, 1.0)
    }

    fn check(&self, s: &PhaseState) -> Result<()> {
        let dim = s.dim();
        let needed = match self {
            PhaseFunction::Casimir { m, .. } => *m,
            PhaseFunction::Position(i) | PhaseFunction::Momentum(i) => i + 1,
            _ => 0,
        };
        if needed > dim {
            return Err(Error::Index(format!("{} needs at least {needed} dimensions, state has {dim}", self.name())));
        }
        if let Some(model) = self.model() {
            if model.dim != dim {
                return Err(Error::InvalidParameter(format!("model dimension {} but state dimension {dim}", model.dim)));
            }
            model.check_state_radius(s.radius())?;
        }
        Ok(())
    }

    pub fn value(&self, s: &PhaseState) -> Result<f64> {
        self.check(s)?;
        Ok(self.eval(&s.q, &s.p))
    }

    /// Exact gradient `(∂/∂q₁ … ∂/∂q_N, ∂/∂p₁ … ∂/∂p_N)`.
    pub fn gradient(&self, s: &PhaseState) -> Result<Vec<f64>> {
        self.check(s)?;
        let n = s.dim();
        let g = gradient(&s.to_vec(), |z: &[Dual]| self.eval(&z[..n], &z[n..]));
        if g.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain(format!("{} is not differentiable at this state", self.name())));
        }
        Ok(g)
    }
}

pub fn hamiltonian(model: &ModelSpec, s: &PhaseState) -> Result<f64> {
    PhaseFunction::hamiltonian(model).value(s)
}

pub fn angular_integral(s: &PhaseState, m: usize, anchor: Anchor) -> Result<f64> {
    PhaseFunction::casimir(s.dim(), m, anchor)?.value(s)
}

/// `I_ij = p_i p_j − (2λH − ω²) q_i q_j`, 0-based indices.
pub fn fradkin_component(model: &ModelSpec, s: &PhaseState, i: usize, j: usize) -> Result<f64> {
    PhaseFunction::fradkin(model, i, j)?.value(s)
}

/// `R_i = Σ_j p_j (q_j p_i − q_i p_j) + (q_i/|q|)(ηH + k)`, 0-based index.
pub fn runge_lenz_component(model: &ModelSpec, s: &PhaseState, i: usize) -> Result<f64> {
    PhaseFunction::runge_lenz(model, i)?.value(s)
}

/// `{A, B} = Σᵢ ∂A/∂qᵢ ∂B/∂pᵢ − ∂A/∂pᵢ ∂B/∂qᵢ`.
pub fn poisson_bracket(a: &PhaseFunction, b: &PhaseFunction, s: &PhaseState) -> Result<f64> {
    Ok(scaled_poisson_bracket(a, b, s)?.0)
}

/// Bracket together with the scale `1 + ‖∇A‖‖∇B‖` it should be compared to.
pub fn scaled_poisson_bracket(a: &PhaseFunction, b: &PhaseFunction, s: &PhaseState) -> Result<(f64, f64)> {
    let n = s.dim();
    let ga = a.gradient(s)?;
    let gb = b.gradient(s)?;
    let bracket = (0..n).map(|i| ga[i] * gb[n + i] - ga[n + i] * gb[i]).sum();
    let na = ga.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = gb.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok((bracket, 1.0 + na * nb))
}

/// Singular values (descending) of the `|fns| × 2N` gradient matrix.
pub fn singular_values(fns: &[PhaseFunction], s: &PhaseState) -> Result<Vec<f64>> {
    if fns.is_empty() {
        return Ok(Vec::new());
    }
    let cols = 2 * s.dim();
    let mut data = Vec::with_capacity(fns.len() * cols);
    for f in fns {
        data.extend(f.gradient(s)?);
    }
    let m = DMatrix::from_row_slice(fns.len(), cols, &data);
    let mut sv: Vec<f64> = m.svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// Numerical rank of the gradient matrix.
pub fn independence_rank(fns: &[PhaseFunction], s: &PhaseState) -> Result<usize> {
    let sv = singular_values(fns, s)?;
    let Some(&max) = sv.first() else { return Ok(0) };
    Ok(sv.iter().filter(|&&x| x > RANK_TOLERANCE * max).count())
}

/// Hamiltonian plus every integral of motion known in closed form for the
/// family. The two-parameter families only carry the angular Casimirs.
pub fn declared_integrals(model: &ModelSpec) -> Vec<PhaseFunction> {
    let n = model.dim;
    let mut out = vec![PhaseFunction::hamiltonian(model)];
    out.extend((2..=n).map(|m| PhaseFunction::Casimir { m, anchor: Anchor::Upper }));
    out.extend((2..n).map(|m| PhaseFunction::Casimir { m, anchor: Anchor::Lower }));
    match model.family {
        Family::DarbouxIII { .. } => {
            for i in 0..n {
                for j in i..n {
                    out.push(PhaseFunction::Fradkin { model: *model, i, j });
                }
            }
        }
        Family::TaubNut { .. } => out.extend((0..n).map(|i| PhaseFunction::RungeLenz { model: *model, i })),
        _ => {}
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::StateSampler;

    fn st(q: &[f64], p: &[f64]) -> PhaseState {
        PhaseState::new(q.to_vec(), p.to_vec()).unwrap()
    }

    #[test]
    fn hamiltonian_examples() {
        let s = st(&[0.0, 0.0, 0.0], &[0.3, -1.2, 0.5]);
        let p2 = 0.09 + 1.44 + 0.25;
        assert!((hamiltonian(&ModelSpec::darboux_iii(0.7, 3), &s).unwrap() - p2 / 2.0).abs() < 1e-15);
        let h = hamiltonian(&ModelSpec::darboux_iii(0.1, 2), &st(&[1.0, 0.0], &[0.0, 1.0])).unwrap();
        assert!((h - 10.0 / 11.0).abs() < 1e-15);
        let h = hamiltonian(&ModelSpec::taub_nut(0.0, 3), &st(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0])).unwrap();
        assert!((h + 0.5).abs() < 1e-15);
        assert!(hamiltonian(&ModelSpec::taub_nut(0.3, 3), &st(&[0.0; 3], &[1.0; 3])).is_err());
    }

    #[test]
    fn two_parameter_hamiltonians_reduce() {
        let mut sampler = StateSampler::new(&ModelSpec::taub_nut(0.5, 3), 7);
        for _ in 0..50 {
            let s = sampler.sample();
            let a = hamiltonian(&ModelSpec::darboux_iii_xi(0.3, 0.0, 3), &s).unwrap();
            let b = hamiltonian(&ModelSpec::darboux_iii(0.3, 3), &s).unwrap();
            assert_eq!(a, b);
            let a = hamiltonian(&ModelSpec::darboux_iv(0.5, 0.0, 3), &s).unwrap();
            let b = hamiltonian(&ModelSpec::taub_nut(0.5, 3), &s).unwrap();
            assert!((a - b).abs() <= 1e-15 * b.abs());
        }
    }

    #[test]
    fn angular_integral_examples() {
        let s = st(&[1.0, 0.0], &[0.0, 1.0]);
        assert_eq!(angular_integral(&s, 2, Anchor::Upper).unwrap(), 1.0);
        let radial = st(&[0.5, -1.0, 2.0], &[1.0, -2.0, 4.0]);
        for m in 2..=3 {
            assert_eq!(angular_integral(&radial, m, Anchor::Upper).unwrap(), 0.0);
            assert_eq!(angular_integral(&radial, m, Anchor::Lower).unwrap(), 0.0);
        }
        assert!(angular_integral(&s, 3, Anchor::Upper).is_err());
        assert!(angular_integral(&s, 1, Anchor::Lower).is_err());
        let mut sampler = StateSampler::new(&ModelSpec::darboux_iii(0.1, 3), 3);
        for _ in 0..50 {
            let s = sampler.sample();
            let up = angular_integral(&s, 3, Anchor::Upper).unwrap();
            let lo = angular_integral(&s, 3, Anchor::Lower).unwrap();
            assert!((up - lo).abs() <= 1e-14 * up);
        }
    }

    #[test]
    fn fradkin_examples() {
        let m = ModelSpec::darboux_iii(0.1, 2);
        let s = st(&[1.0, 0.0], &[0.0, 1.0]);
        assert_eq!(fradkin_component(&m, &s, 0, 1).unwrap(), 0.0);
        let flat = ModelSpec::darboux_iii(0.0, 3).with_omega(1.7);
        let s = st(&[0.3, -0.4, 1.1], &[0.9, 0.2, -0.6]);
        for i in 0..3 {
            for j in 0..3 {
                let v = fradkin_component(&flat, &s, i, j).unwrap();
                assert!((v - (s.p[i] * s.p[j] + 1.7 * 1.7 * s.q[i] * s.q[j])).abs() < 1e-14);
                assert_eq!(v, fradkin_component(&flat, &s, j, i).unwrap());
            }
        }
        assert!(fradkin_component(&flat, &s, 3, 0).is_err());
        assert!(fradkin_component(&ModelSpec::taub_nut(0.1, 3), &s, 0, 0).is_err());
    }

    #[test]
    fn trace_identity() {
        let m = ModelSpec::darboux_iii(0.25, 4).with_omega(1.3);
        let mut sampler = StateSampler::new(&m, 11);
        for _ in 0..100 {
            let s = sampler.sample();
            let tr: f64 = (0..4).map(|i| fradkin_component(&m, &s, i, i).unwrap()).sum();
            let h = hamiltonian(&m, &s).unwrap();
            assert!((tr / 2.0 - h).abs() <= 1e-12 * h.abs());
        }
    }

    #[test]
    fn runge_lenz_examples() {
        let kepler = ModelSpec::taub_nut(0.0, 3);
        let s = st(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]);
        for i in 0..3 {
            assert!(runge_lenz_component(&kepler, &s, i).unwrap().abs() < 1e-15);
        }
        let m = ModelSpec::taub_nut(0.6, 3).with_k(1.4);
        let radial = st(&[0.6, 0.0, 0.8], &[0.3, 0.0, 0.4]);
        let h = hamiltonian(&m, &radial).unwrap();
        for i in 0..3 {
            let expect = radial.q[i] / radial.radius() * (0.6 * h + 1.4);
            assert!((runge_lenz_component(&m, &radial, i).unwrap() - expect).abs() < 1e-14);
        }
        assert!(runge_lenz_component(&m, &st(&[0.0; 3], &[1.0; 3]), 0).is_err());
    }

    #[test]
    fn canonical_bracket() {
        let s = st(&[0.2, 0.4], &[-1.0, 0.5]);
        assert_eq!(poisson_bracket(&PhaseFunction::Position(0), &PhaseFunction::Momentum(0), &s).unwrap(), 1.0);
        assert_eq!(poisson_bracket(&PhaseFunction::Position(0), &PhaseFunction::Momentum(1), &s).unwrap(), 0.0);
    }

    #[test]
    fn bracket_matches_finite_differences() {
        let m = ModelSpec::taub_nut(0.5, 3);
        let h = PhaseFunction::hamiltonian(&m);
        let f = PhaseFunction::Casimir { m: 2, anchor: Anchor::Upper };
        let g = PhaseFunction::Position(2);
        let s = st(&[0.7, -0.3, 1.2], &[0.2, 0.9, -0.4]);
        let exact = poisson_bracket(&h, &g, &s).unwrap();
        // {H, q₃} = −∂H/∂p₃
        let e = 1e-6;
        let mut a = s.clone();
        let mut b = s.clone();
        a.p[2] += e;
        b.p[2] -= e;
        let fd = -(h.value(&a).unwrap() - h.value(&b).unwrap()) / (2.0 * e);
        assert!((exact - fd).abs() < 1e-8);
        assert!(poisson_bracket(&h, &f, &s).unwrap().abs() < 1e-14);
    }

    #[test]
    fn rank_examples() {
        let m = ModelSpec::darboux_iii(0.1, 3);
        let mut sampler = StateSampler::new(&m, 5);
        let s = sampler.sample();
        let mut set = vec![
            PhaseFunction::hamiltonian(&m),
            PhaseFunction::Casimir { m: 2, anchor: Anchor::Upper },
            PhaseFunction::Casimir { m: 3, anchor: Anchor::Upper },
            PhaseFunction::Casimir { m: 2, anchor: Anchor::Lower },
            PhaseFunction::fradkin(&m, 0, 0).unwrap(),
        ];
        assert_eq!(independence_rank(&set, &s).unwrap(), 5);
        set.push(set[1].clone());
        assert_eq!(independence_rank(&set, &s).unwrap(), 5);
        assert_eq!(independence_rank(&[], &s).unwrap(), 0);
    }

    #[test]
    fn declared_integral_counts() {
        assert_eq!(declared_integrals(&ModelSpec::darboux_iii(0.1, 3)).len(), 1 + 2 + 1 + 6);
        assert_eq!(declared_integrals(&ModelSpec::taub_nut(0.1, 3)).len(), 1 + 2 + 1 + 3);
        assert_eq!(declared_integrals(&ModelSpec::darboux_iv(0.1, 0.1, 2)).len(), 2);
    }

    #[test]
    fn tampering_breaks_conservation() {
        let m = ModelSpec::taub_nut(0.5, 3);
        let h = PhaseFunction::hamiltonian(&m);
        let r = PhaseFunction::runge_lenz(&m, 0).unwrap();
        let t = r.clone().tampered().unwrap();
        let s = st(&[0.7, -0.3, 1.2], &[0.2, 0.9, -0.4]);
        assert!(poisson_bracket(&h, &r, &s).unwrap().abs() < 1e-14);
        assert!(poisson_bracket(&h, &t, &s).unwrap().abs() > 1e-3);
        assert!(PhaseFunction::Position(0).tampered().is_err());
    }
}
