//! Hermite and generalised Laguerre polynomials by three-term recurrence,
//! plus exact combinatorial counters.

use crate::error::{Error, Result};

/// Rescaling happens whenever the running magnitude passes `2^RESCALE_BITS`.
const RESCALE_BITS: i32 = 512;

/// `mantissa · 2^exponent`, used when a polynomial value would overflow `f64`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub mantissa: f64,
    pub exponent: i32,
}

impl Scaled {
    /// Plain `f64` value; overflows to ±∞ (or underflows to 0) when out of range.
    pub fn to_f64(self) -> f64 {
        if self.mantissa == 0.0 {
            return 0.0;
        }
        // split the power to avoid intermediate overflow in 2^exponent
        let half = self.exponent / 2;
        self.mantissa * 2f64.powi(half) * 2f64.powi(self.exponent - half)
    }

    /// `ln |value|`; `−∞` for zero.
    pub fn ln_abs(self) -> f64 {
        self.mantissa.abs().ln() + self.exponent as f64 * std::f64::consts::LN_2
    }

    pub fn signum(self) -> f64 {
        if self.mantissa == 0.0 {
            0.0
        } else {
            self.mantissa.signum()
        }
    }
}

/// A polynomial evaluation with its derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyEval {
    pub degree: usize,
    /// Laguerre parameter α; zero for Hermite.
    pub alpha: f64,
    pub x: f64,
    pub value: f64,
    pub derivative: Option<f64>,
}

/// Runs `p_{k+1} = a_k p_k − b_k p_{k−1}` with power-of-two rescaling.
fn scaled_recurrence<F>(n: usize, p0: f64, p1: f64, step: F) -> Scaled
where
    F: Fn(usize, f64, f64) -> f64,
{
    if n == 0 {
        return Scaled { mantissa: p0, exponent: 0 };
    }
    let threshold = 2f64.powi(RESCALE_BITS);
    let shrink = 2f64.powi(-RESCALE_BITS);
    let (mut prev, mut cur, mut exponent) = (p0, p1, 0i32);
    for k in 1..n {
        let next = step(k, cur, prev);
        prev = cur;
        cur = next;
        if cur.abs() > threshold {
            cur *= shrink;
            prev *= shrink;
            exponent += RESCALE_BITS;
        }
    }
    Scaled { mantissa: cur, exponent }
}

/// Physicists' Hermite polynomial `H_n(x)` in scaled form.
pub fn hermite_scaled(n: usize, x: f64) -> Scaled {
    scaled_recurrence(n, 1.0, 2.0 * x, |k, cur, prev| 2.0 * x * cur - 2.0 * k as f64 * prev)
}

/// Physicists' Hermite polynomial, `H_{n+1} = 2x H_n − 2n H_{n−1}`.
pub fn hermite(n: usize, x: f64) -> f64 {
    hermite_scaled(n, x).to_f64()
}

/// `H_n(x)` together with `H_n′(x) = 2n H_{n−1}(x)`.
pub fn hermite_eval(n: usize, x: f64) -> PolyEval {
    let derivative = if n == 0 { 0.0 } else { 2.0 * n as f64 * hermite(n - 1, x) };
    PolyEval { degree: n, alpha: 0.0, x, value: hermite(n, x), derivative: Some(derivative) }
}

/// Generalised Laguerre polynomial `L_n^α(x)` in scaled form.
pub fn laguerre_scaled(n: usize, alpha: f64, x: f64) -> Scaled {
    scaled_recurrence(n, 1.0, 1.0 + alpha - x, |k, cur, prev| {
        let kf = k as f64;
        ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0)
    })
}

/// `(k+1) L_{k+1}^α = (2k + 1 + α − x) L_k^α − (k + α) L_{k−1}^α`.
pub fn laguerre(n: usize, alpha: f64, x: f64) -> f64 {
    laguerre_scaled(n, alpha, x).to_f64()
}

/// `L_n^α(x)` together with `d/dx L_n^α = −L_{n−1}^{α+1}`.
pub fn laguerre_eval(n: usize, alpha: f64, x: f64) -> PolyEval {
    let derivative = if n == 0 { 0.0 } else { -laguerre(n - 1, alpha + 1.0, x) };
    PolyEval { degree: n, alpha, x, value: laguerre(n, alpha, x), derivative: Some(derivative) }
}

/// Exact binomial coefficient `C(n, k)` by the multiplicative formula.
pub fn binomial(n: u64, k: u64) -> Result<u64> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        // acc · (n − k + i) / i is C(n − k + i, i), always an integer
        acc = acc
            .checked_mul(n as u128 - k as u128 + i)
            .ok_or(Error::Overflow("binomial coefficient"))?
            / i;
    }
    u64::try_from(acc).map_err(|_| Error::Overflow("binomial coefficient"))
}

/// Number of compositions `n₁ + … + n_N = n` with `nᵢ ≥ 0`, i.e.
/// `(n + N − 1)! / (n! (N − 1)!)`.
pub fn stars_and_bars(dim: usize, n: usize) -> Result<u64> {
    if dim == 0 {
        return Err(Error::InvalidParameter("stars_and_bars needs N >= 1".into()));
    }
    binomial((n + dim - 1) as u64, (dim - 1) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hermite_explicit(n: usize, x: f64) -> f64 {
        match n {
            0 => 1.0,
            1 => 2.0 * x,
            2 => 4.0 * x * x - 2.0,
            3 => 8.0 * x.powi(3) - 12.0 * x,
            4 => 16.0 * x.powi(4) - 48.0 * x * x + 12.0,
            _ => unreachable!(),
        }
    }

    fn laguerre_explicit(n: usize, a: f64, x: f64) -> f64 {
        match n {
            0 => 1.0,
            1 => 1.0 + a - x,
            2 => (x * x - 2.0 * (a + 2.0) * x + (a + 1.0) * (a + 2.0)) / 2.0,
            3 => {
                (-x.powi(3) + 3.0 * (a + 3.0) * x * x - 3.0 * (a + 2.0) * (a + 3.0) * x
                    + (a + 1.0) * (a + 2.0) * (a + 3.0))
                    / 6.0
            }
            _ => unreachable!(),
        }
    }

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn base_cases_and_hand_values() {
        assert_eq!(hermite(0, 0.3), 1.0);
        assert_eq!(hermite(1, 0.3), 0.6);
        assert_eq!(hermite(2, 1.5), 7.0);
        assert_eq!(laguerre(0, 2.5, 1.0), 1.0);
        assert_eq!(laguerre(1, 2.5, 1.0), 2.5);
        assert_eq!(laguerre(2, 0.0, 1.0), -0.5);
    }

    #[test]
    fn recurrence_matches_explicit_forms() {
        for x in [-3.1, -0.7, 0.0, 0.4, 1.9, 5.5] {
            for n in 0..=4 {
                assert!(rel_close(hermite(n, x), hermite_explicit(n, x), 1e-13));
            }
        }
        for a in [0.0, 0.5, 1.0, 4.0] {
            for x in [0.0, 0.3, 2.0, 7.5] {
                for n in 0..=3 {
                    assert!(rel_close(laguerre(n, a, x), laguerre_explicit(n, a, x), 1e-13));
                }
            }
        }
    }

    #[test]
    fn hermite_orthogonality_by_quadrature() {
        // trapezoid on [-12, 12] is spectrally accurate for Gaussian-weighted polynomials
        let npts = 200;
        let (a, b) = (-12.0, 12.0);
        let h = (b - a) / (npts - 1) as f64;
        let integral = |m: usize, n: usize| -> f64 {
            (0..npts)
                .map(|i| {
                    let x = a + i as f64 * h;
                    let w = if i == 0 || i == npts - 1 { 0.5 } else { 1.0 };
                    w * hermite(m, x) * hermite(n, x) * (-x * x).exp()
                })
                .sum::<f64>()
                * h
        };
        for m in 0..8 {
            let norm = integral(m, m);
            let expected = std::f64::consts::PI.sqrt()
                * 2f64.powi(m as i32)
                * (1..=m).map(|k| k as f64).product::<f64>();
            assert!(rel_close(norm, expected, 1e-8));
            for n in 0..m {
                assert!(integral(m, n).abs() <= 1e-8 * (norm * integral(n, n)).sqrt());
            }
        }
    }

    #[test]
    fn laguerre_has_n_positive_zeros() {
        for alpha in [0.0, 1.0, 3.0] {
            for n in 0..=10usize {
                let xmax = 4.0 * n as f64 + 2.0 * alpha + 10.0;
                let steps = 20000;
                let mut count = 0;
                let mut prev = laguerre(n, alpha, 1e-9);
                for i in 1..=steps {
                    let x = xmax * i as f64 / steps as f64;
                    let v = laguerre(n, alpha, x);
                    if v.signum() != prev.signum() {
                        count += 1;
                    }
                    prev = v;
                }
                assert_eq!(count, n, "alpha={alpha} n={n}");
            }
        }
    }

    #[test]
    fn parity_and_derivative_identities() {
        for n in 0..12 {
            for x in [0.2, 1.3, 2.9] {
                let s = if n % 2 == 0 { 1.0 } else { -1.0 };
                assert!(rel_close(hermite(n, -x), s * hermite(n, x), 1e-14));
                let e = hermite_eval(n, x);
                let h = 1e-5;
                let fd = (hermite(n, x + h) - hermite(n, x - h)) / (2.0 * h);
                assert!(rel_close(e.derivative.unwrap(), fd, 1e-6));
                let l = laguerre_eval(n, 1.5, x);
                let fd = (laguerre(n, 1.5, x + h) - laguerre(n, 1.5, x - h)) / (2.0 * h);
                assert!(rel_close(l.derivative.unwrap(), fd, 1e-6));
            }
        }
    }

    #[test]
    fn scaled_recurrence_survives_overflow() {
        let h = hermite_scaled(300, 20.0);
        assert!(hermite(300, 20.0).is_infinite());
        assert!(h.mantissa.is_finite() && h.exponent > 0);
        // leading-order check: ln H_n(x) ≈ n ln(2x) for x ≫ √n
        let big = hermite_scaled(120, 400.0);
        let approx = 120.0 * (800.0f64).ln();
        assert!((big.ln_abs() - approx).abs() / approx < 1e-3);
        // for moderate n the scaled and plain paths agree
        let a = hermite_scaled(40, 3.0);
        assert!(rel_close(a.to_f64(), hermite(40, 3.0), 1e-15));
        let l = laguerre_scaled(200, 1.0, 49.0);
        assert!(l.mantissa.is_finite());
    }

    #[test]
    fn stars_and_bars_counts() {
        assert_eq!(stars_and_bars(3, 2).unwrap(), 6);
        for n in 0..20 {
            assert_eq!(stars_and_bars(1, n).unwrap(), 1);
            assert_eq!(stars_and_bars(3, n).unwrap() as usize, (n + 1) * (n + 2) / 2);
        }
        assert!(stars_and_bars(0, 3).is_err());
        assert!(stars_and_bars(40, 10_000).is_err());
    }

    fn compositions(dim: usize, n: usize) -> u64 {
        if dim == 1 {
            return 1;
        }
        (0..=n).map(|first| compositions(dim - 1, n - first)).sum()
    }

    #[test]
    fn stars_and_bars_matches_enumeration() {
        for dim in 1..=5 {
            for n in 0..=12 {
                assert_eq!(stars_and_bars(dim, n).unwrap(), compositions(dim, n));
            }
        }
    }
}
