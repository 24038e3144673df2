//! Conformal factors, radial measure and scalar curvature of the four model
//! manifolds `ds² = f(r)² dq²`.
//!
//! Two independent routes to the scalar curvature are provided. The general
//! route feeds hand-differentiated conformal factors into the curvature
//! formula for conformally flat metrics; the closed route evaluates the
//! family-specific closed expressions. They share no intermediate values.

use crate::error::Result;
use crate::model::{Family, ModelSpec};

/// Conformal factor `f = √g_rr` and its exact radial derivatives at `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConformalData {
    pub r: f64,
    pub f: f64,
    pub df: f64,
    pub d2f: f64,
}

/// `g = f²` with exact first and second radial derivatives.
fn metric_coefficient(family: Family, r: f64) -> (f64, f64, f64) {
    match family {
        Family::DarbouxIII { lambda } => (1.0 + lambda * r * r, 2.0 * lambda * r, 2.0 * lambda),
        Family::TaubNut { eta } => {
            (1.0 + eta / r, -eta / (r * r), 2.0 * eta / (r * r * r))
        }
        Family::DarbouxIIIXi { lambda, xi } => {
            // g = A / B², A = 1 + λr² + ξr⁴, B = 1 − ξr⁴
            let r2 = r * r;
            let a = 1.0 + lambda * r2 + xi * r2 * r2;
            let da = 2.0 * lambda * r + 4.0 * xi * r2 * r;
            let d2a = 2.0 * lambda + 12.0 * xi * r2;
            let b = 1.0 - xi * r2 * r2;
            let db = -4.0 * xi * r2 * r;
            let d2b = -12.0 * xi * r2;
            let b2 = b * b;
            let b3 = b2 * b;
            let g = a / b2;
            let dg = da / b2 - 2.0 * a * db / b3;
            let d2g = d2a / b2 - 4.0 * da * db / b3 - 2.0 * a * d2b / b3
                + 6.0 * a * db * db / (b3 * b);
            (g, dg, d2g)
        }
        Family::DarbouxIV { eta, zeta } => {
            // g = A / D, A = η + r + ηζr², D = r (1 − ζr²)²
            let r2 = r * r;
            let a = eta + r + eta * zeta * r2;
            let da = 1.0 + 2.0 * eta * zeta * r;
            let d2a = 2.0 * eta * zeta;
            let s = 1.0 - zeta * r2;
            let d = r * s * s;
            let dd = s * (1.0 - 5.0 * zeta * r2);
            let d2d = -12.0 * zeta * r + 20.0 * zeta * zeta * r2 * r;
            let g = a / d;
            let dg = da / d - a * dd / (d * d);
            let d2g = d2a / d - 2.0 * da * dd / (d * d) - a * d2d / (d * d)
                + 2.0 * a * dd * dd / (d * d * d);
            (g, dg, d2g)
        }
    }
}

pub fn conformal_factor(model: &ModelSpec, r: f64) -> Result<ConformalData> {
    model.check_radius(r)?;
    let (g, dg, d2g) = metric_coefficient(model.family, r);
    let f = g.sqrt();
    let df = dg / (2.0 * f);
    let d2f = d2g / (2.0 * f) - dg * dg / (4.0 * f * f * f);
    Ok(ConformalData { r, f, df, d2f })
}

/// Scalar curvature of `f(r)² dq²` in `N` dimensions from the conformal data:
/// `R = −(N−1)[(N−4)f′² + f(2f″ + 2(N−1)f′/r)] / f⁴`.
pub fn curvature_from_conformal(c: &ConformalData, dim: usize) -> f64 {
    let n = dim as f64;
    let ConformalData { r, f, df, d2f } = *c;
    -(n - 1.0) * ((n - 4.0) * df * df + f * (2.0 * d2f + 2.0 * (n - 1.0) * df / r)) / f.powi(4)
}

pub fn scalar_curvature_general(model: &ModelSpec, r: f64) -> Result<f64> {
    let c = conformal_factor(model, r)?;
    Ok(curvature_from_conformal(&c, model.dim))
}

/// Family-specific closed-form scalar curvature.
pub fn scalar_curvature_closed(model: &ModelSpec, r: f64) -> Result<f64> {
    model.check_radius(r)?;
    Ok(closed_curvature(model.family, model.dim, r))
}

fn closed_curvature(family: Family, dim: usize, r: f64) -> f64 {
    let n = dim as f64;
    let r2 = r * r;
    match family {
        Family::DarbouxIII { lambda } => {
            -lambda * (n - 1.0) * (2.0 * n + 3.0 * lambda * (n - 2.0) * r2)
                / (1.0 + lambda * r2).powi(3)
        }
        Family::TaubNut { eta } => {
            eta * (n - 1.0) * (4.0 * (n - 3.0) * r + 3.0 * eta * (n - 2.0))
                / (4.0 * r * (eta + r).powi(3))
        }
        Family::DarbouxIIIXi { lambda, xi } => {
            let r4 = r2 * r2;
            let a = 1.0 + lambda * r2 + xi * r4;
            let first = n
                * (2.0 + 3.0 * lambda * r2 + 6.0 * xi * r4 + lambda * xi * r4 * r2)
                * (lambda + 3.0 * lambda * xi * r4 + 2.0 * xi * r2 * (3.0 + xi * r4));
            let second = 6.0 * r2 * (lambda * lambda - 4.0 * xi) * (1.0 - xi * r4).powi(2);
            -(n - 1.0) / a.powi(3) * (first - second)
        }
        Family::DarbouxIV { eta, zeta } => {
            let a = eta + r + eta * zeta * r2;
            let first = 6.0
                * eta
                * (1.0 - zeta * r2).powi(2)
                * (eta + r * (2.0 + zeta * r * (6.0 * eta + r * (2.0 + eta * zeta * r))));
            let second = n
                * (3.0 * eta + r * (4.0 + eta * zeta * r * (6.0 - zeta * r2)))
                * (eta - zeta * r2 * (6.0 * eta + r * (4.0 + 3.0 * eta * zeta * r)));
            -(n - 1.0) / (4.0 * r * a.powi(3)) * (first - second)
        }
    }
}

/// Radial density `f(r)^N r^{N−1}` of the Riemannian volume after the angular
/// integration.
pub fn measure_weight(model: &ModelSpec, r: f64) -> Result<f64> {
    let c = conformal_factor(model, r)?;
    let n = model.dim as i32;
    Ok(c.f.powi(n) * r.powi(n - 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_models(dim: usize) -> Vec<ModelSpec> {
        vec![
            ModelSpec::darboux_iii(0.3, dim),
            ModelSpec::taub_nut(0.7, dim),
            ModelSpec::darboux_iii_xi(0.2, 0.05, dim),
            ModelSpec::darboux_iv(0.6, 0.08, dim),
        ]
    }

    fn log_radii(model: &ModelSpec, count: usize) -> Vec<f64> {
        let lo: f64 = if model.is_coulomb() { 1e-6 } else { 1e-3 };
        let hi = model.singular_radius().map_or(1e2, |rs| 0.999 * rs);
        (0..count)
            .map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64))
            .collect()
    }

    #[test]
    fn conformal_factor_examples() {
        let c = conformal_factor(&ModelSpec::darboux_iii(0.0, 3), 2.0).unwrap();
        assert_eq!((c.f, c.df, c.d2f), (1.0, 0.0, 0.0));
        let c = conformal_factor(&ModelSpec::darboux_iii(0.1, 3), 1.0).unwrap();
        assert!((c.f - 1.1f64.sqrt()).abs() < 1e-15);
        assert!((c.f - 1.0488088).abs() < 1e-7);
        let c = conformal_factor(&ModelSpec::taub_nut(1.0, 3), 1.0).unwrap();
        assert!((c.f - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn domain_violations_are_rejected() {
        let m = ModelSpec::darboux_iii(0.1, 3);
        assert!(conformal_factor(&m, 0.0).is_err());
        assert!(conformal_factor(&m, -1.0).is_err());
        let xi = ModelSpec::darboux_iii_xi(0.1, 1.0, 3);
        assert!(conformal_factor(&xi, 1.0).is_err());
        assert!(scalar_curvature_closed(&xi, 1.2).is_err());
        let iv = ModelSpec::darboux_iv(0.5, 0.25, 3);
        assert!(measure_weight(&iv, 2.0).is_err());
        assert!(scalar_curvature_general(&iv, 1.99).is_ok());
    }

    #[test]
    fn curvature_examples() {
        for r in [0.1, 1.0, 7.0] {
            assert_eq!(scalar_curvature_general(&ModelSpec::darboux_iii(0.0, 3), r).unwrap(), 0.0);
        }
        let m = ModelSpec::darboux_iii(0.01, 3);
        assert!((scalar_curvature_general(&m, 1e-9).unwrap() + 0.12).abs() < 1e-12);
        assert!((scalar_curvature_closed(&m, 1e-300).unwrap() + 0.12).abs() < 1e-15);
        let t = ModelSpec::taub_nut(1.0, 3);
        assert!((scalar_curvature_general(&t, 1.0).unwrap() - 3.0 / 16.0).abs() < 1e-15);
        let iv = ModelSpec::darboux_iv(1.0, 0.0, 3);
        assert!((scalar_curvature_closed(&iv, 1.0).unwrap() - 3.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn measure_weight_examples() {
        assert_eq!(measure_weight(&ModelSpec::darboux_iii(0.0, 3), 2.0).unwrap(), 4.0);
        assert!((measure_weight(&ModelSpec::darboux_iii(1.0, 2), 1.0).unwrap() - 2.0).abs() < 1e-15);
        let w = measure_weight(&ModelSpec::taub_nut(1.0, 3), 1.0).unwrap();
        assert!((w - 2f64.powf(1.5)).abs() < 1e-14);
    }

    #[test]
    fn general_and_closed_curvature_agree() {
        for dim in 2..=6 {
            for m in all_models(dim) {
                for r in log_radii(&m, 100) {
                    let g = scalar_curvature_general(&m, r).unwrap();
                    let c = scalar_curvature_closed(&m, r).unwrap();
                    // the general formula cancels large terms near the Coulomb origin
                    let d = conformal_factor(&m, r).unwrap();
                    let n = dim as f64;
                    let terms = (n - 1.0)
                        * ((n - 4.0).abs() * d.df * d.df
                            + d.f * (2.0 * d.d2f.abs() + 2.0 * (n - 1.0) * d.df.abs() / r))
                        / d.f.powi(4);
                    assert!(
                        (g - c).abs() <= 1e-12 * (1.0 + c.abs()) + 64.0 * f64::EPSILON * terms,
                        "{} N={dim} r={r}: general {g} closed {c}",
                        m.name()
                    );
                }
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for m in all_models(3) {
            for r in log_radii(&m, 40) {
                let c = conformal_factor(&m, r).unwrap();
                let gap = m.singular_radius().map_or(r, |rs| rs - r);
                let h = 1e-4 * r.min(gap);
                if m.check_radius(r + 2.0 * h).is_err() {
                    continue;
                }
                let fp = conformal_factor(&m, r + h).unwrap().f;
                let fm = conformal_factor(&m, r - h).unwrap().f;
                let dfp = conformal_factor(&m, r + h).unwrap().df;
                let dfm = conformal_factor(&m, r - h).unwrap().df;
                let fd1 = (fp - fm) / (2.0 * h);
                let fd2 = (dfp - dfm) / (2.0 * h);
                // second term covers rounding in the difference quotients
                let s1 = c.df.abs() + 1e-8 * c.f / h;
                let s2 = c.d2f.abs() + 1e-8 * (c.df.abs() + c.f / r) / h;
                assert!((fd1 - c.df).abs() <= 1e-6 * s1, "{} r={r}: f' {} vs {fd1}", m.name(), c.df);
                assert!((fd2 - c.d2f).abs() <= 1e-6 * s2, "{} r={r}: f'' {} vs {fd2}", m.name(), c.d2f);
            }
        }
    }

    #[test]
    fn curvature_vanishes_with_deformation() {
        let pairs = [
            (ModelSpec::darboux_iii(1e-8, 4), ModelSpec::darboux_iii(0.0, 4)),
            (ModelSpec::taub_nut(1e-8, 4), ModelSpec::taub_nut(0.0, 4)),
            (ModelSpec::darboux_iii_xi(1e-8, 1e-8, 4), ModelSpec::darboux_iii_xi(0.0, 0.0, 4)),
            (ModelSpec::darboux_iv(1e-8, 1e-8, 4), ModelSpec::darboux_iv(0.0, 0.0, 4)),
        ];
        let tenth = |m: ModelSpec| {
            let mut m = m;
            m.family = match m.family {
                Family::DarbouxIII { lambda } => Family::DarbouxIII { lambda: lambda / 10.0 },
                Family::TaubNut { eta } => Family::TaubNut { eta: eta / 10.0 },
                Family::DarbouxIIIXi { lambda, xi } => Family::DarbouxIIIXi { lambda: lambda / 10.0, xi: xi / 10.0 },
                Family::DarbouxIV { eta, zeta } => Family::DarbouxIV { eta: eta / 10.0, zeta: zeta / 10.0 },
            };
            m
        };
        // R vanishes linearly in the deformation (for N = 3 the Taub–NUT
        // curvature starts at second order, hence N = 4)
        for (small, flat) in pairs {
            for r in [0.5, 1.0, 2.0, 5.0] {
                let a = scalar_curvature_general(&small, r).unwrap();
                let b = scalar_curvature_general(&flat, r).unwrap();
                let c = scalar_curvature_general(&tenth(small), r).unwrap();
                assert_eq!(b, 0.0);
                assert!(a.abs() < 1e-4, "{} r={r}: {a}", small.name());
                assert!((a / c - 10.0).abs() < 1e-4, "{} r={r}: {a} {c}", small.name());
                let closed = scalar_curvature_closed(&small, r).unwrap();
                assert!((closed - a).abs() <= 1e-8 * a.abs() + 1e-13, "{} r={r}: {closed} {a}", small.name());
            }
        }
    }

    #[test]
    fn two_parameter_curvatures_reduce_exactly() {
        for dim in 2..=5 {
            for r in [0.01, 0.3, 1.0, 4.0, 30.0] {
                let a = scalar_curvature_closed(&ModelSpec::darboux_iii_xi(0.4, 0.0, dim), r).unwrap();
                let b = scalar_curvature_closed(&ModelSpec::darboux_iii(0.4, dim), r).unwrap();
                assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-300));
                let a = scalar_curvature_closed(&ModelSpec::darboux_iv(0.9, 0.0, dim), r).unwrap();
                let b = scalar_curvature_closed(&ModelSpec::taub_nut(0.9, dim), r).unwrap();
                assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-300), "N={dim} r={r}: {a} {b}");
            }
        }
    }
}
