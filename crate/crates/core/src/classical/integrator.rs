use serde::Serialize;

use super::functions::{declared_integrals, PhaseFunction};
use super::PhaseState;
use crate::dual::gradient;
use crate::error::{Error, Result};
use crate::model::ModelSpec;

// Dormand–Prince 5(4) tableau; the system is autonomous so the nodes cᵢ are not needed.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Step-size controller and budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Steps shorter than `h_min · max(1, |t|)` abort the run.
    pub h_min: f64,
    pub max_steps: usize,
}

impl IntegratorOptions {
    pub fn with_tolerance(tol: f64) -> Self {
        IntegratorOptions { rtol: tol, atol: tol, h_min: 1e-14, max_steps: 5_000_000 }
    }
}

/// Why the integration stopped.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    StepCollapse { t: f64, h: f64, reason: String },
    StepBudget { t: f64 },
}

impl Termination {
    pub fn is_complete(&self) -> bool {
        matches!(self, Termination::Completed)
    }
}

/// Continuous extension over one accepted step.
#[derive(Debug, Clone)]
struct DenseSegment {
    t0: f64,
    h: f64,
    rc: [Vec<f64>; 5],
}

impl DenseSegment {
    fn eval(&self, t: f64) -> Vec<f64> {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let [r1, r2, r3, r4, r5] = &self.rc;
        (0..r1.len())
            .map(|i| r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i]))))
            .collect()
    }
}

/// Accepted steps of an adaptive integration together with the ledger of
/// conserved quantities evaluated at each of them.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub model: ModelSpec,
    pub times: Vec<f64>,
    pub states: Vec<PhaseState>,
    pub ledger_names: Vec<String>,
    /// `ledger[k][j]` is integral `j` at sample `k`.
    pub ledger: Vec<Vec<f64>>,
    pub termination: Termination,
    pub options: IntegratorOptions,
    segments: Vec<DenseSegment>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t_start(&self) -> f64 {
        self.times[0]
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Dense-output state at `t` inside the integrated span.
    pub fn interpolate(&self, t: f64) -> Result<PhaseState> {
        if self.segments.is_empty() || t < self.t_start() || t > self.t_end() {
            return Err(Error::Domain(format!(
                "t = {t} outside the integrated span [{}, {}]",
                self.t_start(),
                self.t_end()
            )));
        }
        let idx = self.times.partition_point(|&s| s <= t).clamp(1, self.segments.len()) - 1;
        Ok(PhaseState::from_slice(&self.segments[idx].eval(t)))
    }

    /// `max_t |F(t) − F(0)| / sup_t |F(t)|` for every ledger entry, falling
    /// back to absolute drift when `F` vanishes identically (to `10⁻⁸`).
    pub fn drifts(&self) -> Vec<(String, f64)> {
        self.ledger_names
            .iter()
            .enumerate()
            .map(|(j, name)| {
                let f0 = self.ledger[0][j];
                let sup = self.ledger.iter().map(|row| row[j].abs()).fold(0.0, f64::max);
                let dev = self.ledger.iter().map(|row| (row[j] - f0).abs()).fold(0.0, f64::max);
                let scale = if sup > 1e-8 { sup } else { 1.0 };
                (name.clone(), dev / scale)
            })
            .collect()
    }

    pub fn max_drift(&self) -> f64 {
        self.drifts().into_iter().map(|(_, d)| d).fold(0.0, f64::max)
    }

    /// Segment boundaries, for scanning dense output step by step.
    pub(crate) fn step_bounds(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.segments.iter().map(|s| (s.t0, s.t0 + s.h))
    }
}

/// Hamilton's equations `ż = (∂H/∂p, −∂H/∂q)` with exact derivatives.
pub(crate) fn vector_field(model: &ModelSpec, z: &[f64]) -> Result<Vec<f64>> {
    let n = z.len() / 2;
    let r = z[..n].iter().map(|x| x * x).sum::<f64>().sqrt();
    model.check_state_radius(r)?;
    let h = PhaseFunction::hamiltonian(model);
    let g = gradient(z, |w| h.eval(&w[..n], &w[n..]));
    if g.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain(format!("vector field not finite at r = {r}")));
    }
    let mut out = g[n..].to_vec();
    out.extend(g[..n].iter().map(|x| -x));
    Ok(out)
}

fn axpy(y: &[f64], h: f64, terms: &[(f64, &[f64])]) -> Vec<f64> {
    let mut out = y.to_vec();
    for (c, k) in terms {
        for (o, v) in out.iter_mut().zip(k.iter()) {
            *o += h * c * v;
        }
    }
    out
}

struct Stepper<'a> {
    model: &'a ModelSpec,
    opts: IntegratorOptions,
}

struct StepResult {
    y: Vec<f64>,
    k7: Vec<f64>,
    err: f64,
    rc: [Vec<f64>; 5],
}

impl Stepper<'_> {
    fn f(&self, y: &[f64]) -> Result<Vec<f64>> {
        vector_field(self.model, y)
    }

    fn step(&self, y: &[f64], k1: &[f64], h: f64) -> Result<StepResult> {
        let k2 = self.f(&axpy(y, h, &[(A21, k1)]))?;
        let k3 = self.f(&axpy(y, h, &[(A31, k1), (A32, &k2)]))?;
        let k4 = self.f(&axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]))?;
        let k5 = self.f(&axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
        let k6 = self.f(&axpy(y, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]))?;
        let y1 = axpy(y, h, &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = self.f(&y1)?;
        let mut err = 0.0;
        for i in 0..y.len() {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = self.opts.atol + self.opts.rtol * y[i].abs().max(y1[i].abs());
            err += (e / sc).powi(2);
        }
        let err = (err / y.len() as f64).sqrt();
        let rc2: Vec<f64> = y1.iter().zip(y).map(|(a, b)| a - b).collect();
        let rc3: Vec<f64> = (0..y.len()).map(|i| h * k1[i] - rc2[i]).collect();
        let rc4: Vec<f64> = (0..y.len()).map(|i| rc2[i] - h * k7[i] - rc3[i]).collect();
        let rc5: Vec<f64> = (0..y.len())
            .map(|i| h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]))
            .collect();
        Ok(StepResult { y: y1, k7, err, rc: [y.to_vec(), rc2, rc3, rc4, rc5] })
    }
}

/// Integrate Hamilton's equations from `s0` over `[0, t_end]` with
/// Dormand–Prince 5(4).
///
/// `tol` is the accuracy wanted over the whole run. Local errors of an
/// explicit Runge–Kutta scheme accumulate roughly linearly in time, so the
/// controller runs at `rtol = atol = tol / (1 + t_end)`.
pub fn integrate_trajectory(model: &ModelSpec, s0: &PhaseState, t_end: f64, tol: f64) -> Result<Trajectory> {
    integrate_with(model, s0, t_end, IntegratorOptions::with_tolerance(tol / (1.0 + t_end.abs())))
}

/// As [`integrate_trajectory`] with explicit controller settings. A step
/// that collapses, or a state that leaves the domain, ends the run early
/// and is reported through [`Trajectory::termination`].
pub fn integrate_with(model: &ModelSpec, s0: &PhaseState, t_end: f64, opts: IntegratorOptions) -> Result<Trajectory> {
    model.validate()?;
    if s0.dim() != model.dim {
        return Err(Error::InvalidParameter(format!("state dimension {} but model dimension {}", s0.dim(), model.dim)));
    }
    if !(opts.rtol > 0.0 && opts.atol > 0.0) {
        return Err(Error::InvalidParameter("tolerances must be positive".into()));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidParameter(format!("t_end = {t_end} must be positive")));
    }
    let integrals = declared_integrals(model);
    let record = |s: &PhaseState| -> Vec<f64> { integrals.iter().map(|f| f.eval(&s.q, &s.p)).collect() };
    let stepper = Stepper { model, opts };

    let mut y = s0.to_vec();
    let mut k1 = stepper.f(&y)?;
    let mut t = 0.0;
    let mut times = vec![0.0];
    let mut states = vec![s0.clone()];
    let mut ledger = vec![record(s0)];
    let mut segments = Vec::new();

    // Initial step from the usual derivative-scale heuristic.
    let sc: Vec<f64> = y.iter().map(|v| opts.atol + opts.rtol * v.abs()).collect();
    let d0 = (y.iter().zip(&sc).map(|(v, s)| (v / s).powi(2)).sum::<f64>() / y.len() as f64).sqrt();
    let d1 = (k1.iter().zip(&sc).map(|(v, s)| (v / s).powi(2)).sum::<f64>() / y.len() as f64).sqrt();
    let mut h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h = h.min(t_end);

    const BETA: f64 = 0.04;
    const EXPO1: f64 = 0.2 - BETA * 0.75;
    const SAFE: f64 = 0.9;
    let mut err_old: f64 = 1e-4;
    let mut reject = false;
    let mut steps = 0;
    let mut termination = Termination::Completed;

    while t < t_end {
        if steps >= opts.max_steps {
            termination = Termination::StepBudget { t };
            break;
        }
        steps += 1;
        if h < opts.h_min * t.abs().max(1.0) {
            termination = Termination::StepCollapse { t, h, reason: "step size below minimum".into() };
            break;
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        let res = match stepper.step(&y, &k1, h) {
            Ok(res) if res.err.is_finite() => res,
            Ok(_) | Err(Error::Domain(_)) => {
                h *= 0.25;
                reject = true;
                continue;
            }
            Err(e) => return Err(e),
        };
        let err = res.err;
        if err <= 1.0 {
            let fac11 = err.powf(EXPO1);
            let fac = (fac11 / err_old.powf(BETA) / SAFE).clamp(0.1, 5.0);
            let mut h_new = h / fac;
            err_old = err.max(1e-4);
            if reject {
                h_new = h_new.min(h);
            }
            reject = false;
            segments.push(DenseSegment { t0: t, h, rc: res.rc });
            t = if last { t_end } else { t + h };
            y = res.y;
            k1 = res.k7;
            let s = PhaseState::from_slice(&y);
            ledger.push(record(&s));
            states.push(s);
            times.push(t);
            h = h_new;
        } else {
            let fac11 = err.powf(EXPO1);
            h /= (fac11 / SAFE).min(5.0);
            reject = true;
        }
    }
    if let Termination::StepCollapse { .. } = termination {
        if let Err(Error::Domain(msg)) = stepper.f(&y).and_then(|_| stepper.step(&y, &k1, h.max(1e-12)).map(|_| ())) {
            termination = Termination::StepCollapse { t, h, reason: msg };
        }
    }

    Ok(Trajectory {
        model: *model,
        times,
        states,
        ledger_names: integrals.iter().map(|f| f.name()).collect(),
        ledger,
        termination,
        options: opts,
        segments,
    })
}
