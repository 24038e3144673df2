use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::conformal_factor;
use crate::model::{Family, ModelSpec};

/// Inner edge of every default grid.
pub const DEFAULT_R_MIN: f64 = 1e-6;

/// Geodesic distance from the origin, `s(r) = ∫₀ʳ f(ρ) dρ`.
pub fn arc_length(model: &ModelSpec, r: f64) -> Result<f64> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::Domain(format!("radius r = {r} must be non-negative")));
    }
    match model.family {
        Family::DarbouxIII { lambda } if lambda > 0.0 => {
            let sl = lambda.sqrt();
            Ok(0.5 * r * (1.0 + lambda * r * r).sqrt() + (sl * r).asinh() / (2.0 * sl))
        }
        Family::TaubNut { eta } if eta > 0.0 => Ok((r * (r + eta)).sqrt() + eta * (r / eta).sqrt().asinh()),
        Family::DarbouxIII { .. } | Family::TaubNut { .. } => Ok(r),
        _ => Err(Error::Unsupported(format!("no radial quantum model for {}", model.name()))),
    }
}

/// Inverse of [`arc_length`] by safeguarded Newton iteration on `[0, s]`
/// (`f ≥ 1`, so `r ≤ s`).
pub fn radius_from_arc_length(model: &ModelSpec, s: f64) -> Result<f64> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::Domain(format!("arc length s = {s} must be non-negative")));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0, s);
    let mut r = s;
    for _ in 0..200 {
        let g = arc_length(model, r)? - s;
        if g == 0.0 {
            return Ok(r);
        }
        if g > 0.0 {
            hi = r;
        } else {
            lo = r;
        }
        let f = conformal_factor(model, r.max(f64::MIN_POSITIVE))?.f;
        let mut next = r - g / f;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - r).abs() <= 4.0 * f64::EPSILON * r {
            return Ok(next);
        }
        r = next;
    }
    Ok(r)
}

/// Nodes uniform in the geodesic radius `s` between `r_min` and `r_max`.
///
/// Node 0 and node `npts − 1` carry the Dirichlet conditions; the operator
/// acts on the `npts − 2` interior nodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub npts: usize,
    /// Uniform spacing `(s_max − s_min)/(npts − 1)` in arc length.
    pub h: f64,
    pub s_min: f64,
    #[serde(skip)]
    pub radii: Vec<f64>,
}

impl RadialGrid {
    pub fn new(model: &ModelSpec, r_min: f64, r_max: f64, npts: usize) -> Result<Self> {
        if !(r_min > 0.0 && r_min < r_max && r_max.is_finite()) {
            return Err(Error::InvalidParameter(format!("grid needs 0 < r_min < r_max, got [{r_min}, {r_max}]")));
        }
        if npts < 16 {
            return Err(Error::InvalidParameter(format!("grid needs at least 16 points, got {npts}")));
        }
        model.check_radius(r_min)?;
        model.check_radius(r_max)?;
        let s_min = arc_length(model, r_min)?;
        let s_max = arc_length(model, r_max)?;
        let h = (s_max - s_min) / (npts - 1) as f64;
        let mut radii = Vec::with_capacity(npts);
        radii.push(r_min);
        for i in 1..npts - 1 {
            radii.push(radius_from_arc_length(model, s_min + i as f64 * h)?);
        }
        radii.push(r_max);
        Ok(RadialGrid { r_min, r_max, npts, h, s_min, radii })
    }

    /// Interior radii, where the unknowns live.
    pub fn interior(&self) -> &[f64] {
        &self.radii[1..self.npts - 1]
    }

    /// Same span with the spacing halved; every old node is kept.
    pub fn refined(&self, model: &ModelSpec) -> Result<Self> {
        RadialGrid::new(model, self.r_min, self.r_max, 2 * (self.npts - 1) + 1)
    }
}
