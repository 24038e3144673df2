use serde::Serialize;

use super::integrator::{vector_field, Trajectory};
use crate::error::Result;

/// Outcome of the return-map search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Closure {
    /// Smallest `T` with `|z(t₀+T) − z(t₀)| < tol`; `distance` is that norm.
    Closed { period: f64, distance: f64 },
    /// No return within the span. `unbounded` flags runs whose radius is
    /// still growing at the end.
    Open { unbounded: bool, closest: f64 },
}

impl Closure {
    pub fn period(&self) -> Option<f64> {
        match self {
            Closure::Closed { period, .. } => Some(*period),
            Closure::Open { .. } => None,
        }
    }

    pub fn is_closed(&self) -> bool {
        matches!(self, Closure::Closed { .. })
    }
}

const SCAN_SUBDIVISIONS: usize = 16;

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Search the dense output for the first return to the anchor state at
/// `t₀ = t_start + 1%` of the span.
///
/// Local minima of `|z(t) − z(t₀)|` are the sign changes (− to +) of
/// `g(t) = (z(t) − z(t₀))·ż(t)`, located by bisection. Minima before the
/// orbit has first moved away by a tenth of its largest excursion are
/// skipped, so the anchor itself never matches.
pub fn detect_closure(traj: &Trajectory, tol: f64) -> Result<Closure> {
    let span = traj.t_end() - traj.t_start();
    let t0 = traj.t_start() + 0.01 * span;
    let z0 = traj.interpolate(t0)?.to_vec();
    let model = traj.model;

    let radii: Vec<f64> = traj.states.iter().map(|s| s.radius()).collect();
    let half = radii.len() / 2;
    let first_max = radii[..half.max(1)].iter().copied().fold(0.0, f64::max);
    let overall_max = radii.iter().copied().fold(0.0, f64::max);
    let unbounded = radii.last().copied().unwrap_or(0.0) >= overall_max && overall_max > 2.0 * first_max;

    let max_excursion = traj.states.iter().map(|s| dist(&s.to_vec(), &z0)).fold(0.0, f64::max);
    let departure = 0.1 * max_excursion;

    let g = |t: f64| -> Result<(f64, f64)> {
        let z = traj.interpolate(t)?.to_vec();
        let v = vector_field(&model, &z)?;
        let gv = z.iter().zip(&z0).zip(&v).map(|((a, b), c)| (a - b) * c).sum();
        Ok((gv, dist(&z, &z0)))
    };

    let mut departed = false;
    let mut closest = f64::INFINITY;
    let mut prev: Option<(f64, f64)> = None;
    for (a, b) in traj.step_bounds() {
        if b <= t0 {
            continue;
        }
        let a = a.max(t0);
        for k in 0..=SCAN_SUBDIVISIONS {
            let t = a + (b - a) * k as f64 / SCAN_SUBDIVISIONS as f64;
            let (gv, d) = g(t)?;
            if d > departure {
                departed = true;
            }
            if let Some((tp, gp)) = prev {
                if departed && gp < 0.0 && gv >= 0.0 && t > tp {
                    let (mut lo, mut hi) = (tp, t);
                    for _ in 0..200 {
                        let mid = 0.5 * (lo + hi);
                        if mid <= lo || mid >= hi {
                            break;
                        }
                        if g(mid)?.0 < 0.0 {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    let tm = 0.5 * (lo + hi);
                    let dm = g(tm)?.1;
                    closest = closest.min(dm);
                    if dm < tol {
                        return Ok(Closure::Closed { period: tm - t0, distance: dm });
                    }
                }
            }
            prev = Some((t, gv));
        }
    }
    Ok(Closure::Open { unbounded, closest })
}
