//! Closed-form bound-state spectra and eigenfunctions of the quantised
//! Darboux III oscillator and Taub–NUT Coulomb systems.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::measure_weight;
use crate::model::{Family, ModelSpec};
use crate::specfun::{binomial, hermite_scaled, laguerre_scaled, stars_and_bars};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillatorLevel {
    pub n: usize,
    pub energy: f64,
    /// Deformed frequency `Ω = √(ω² − 2λE)`.
    pub omega_deformed: f64,
    pub degeneracy: u64,
    /// Bottom of the continuous spectrum `ω²/(2λ)`, infinite when `λ = 0`.
    pub threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoulombLevel {
    /// Radial quantum number.
    pub n: usize,
    pub l: usize,
    /// Principal number `n + l`.
    pub principal: usize,
    pub energy: f64,
    /// Deformed coupling `K = k + ηE`.
    pub coupling_deformed: f64,
    pub degeneracy: u64,
}

/// Sample of a closed-form eigenfunction.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenfunctionSample {
    pub point: Vec<f64>,
    pub value: f64,
    pub quantum_numbers: Vec<usize>,
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {v} must be positive")))
    }
}

fn check_deformation(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {v} must be non-negative")))
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim >= 2 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("dimension N = {dim} must be >= 2")))
    }
}

/// `E = −λħ²m² + ħm√(ħ²λ²m² + ω²)` with `m = n + N/2`.
///
/// Evaluated as `ħmω² / (√(ħ²λ²m² + ω²) + λħm)`, which is the same number
/// without the cancellation at large `n`.
fn oscillator_energy_value(lambda: f64, omega: f64, hbar: f64, dim: usize, n: usize) -> f64 {
    let m = n as f64 + dim as f64 / 2.0;
    let a = lambda * hbar * m;
    hbar * m * omega * omega / ((a * a + omega * omega).sqrt() + a)
}

pub fn oscillator_threshold(lambda: f64, omega: f64) -> f64 {
    if lambda == 0.0 {
        f64::INFINITY
    } else {
        omega * omega / (2.0 * lambda)
    }
}

pub fn oscillator_energy(lambda: f64, omega: f64, hbar: f64, dim: usize, n: usize) -> Result<OscillatorLevel> {
    check_deformation("lambda", lambda)?;
    check_positive("omega", omega)?;
    check_positive("hbar", hbar)?;
    check_dim(dim)?;
    let energy = oscillator_energy_value(lambda, omega, hbar, dim, n);
    Ok(OscillatorLevel {
        n,
        energy,
        omega_deformed: (omega * omega - 2.0 * lambda * energy).sqrt(),
        degeneracy: stars_and_bars(dim, n)?,
        threshold: oscillator_threshold(lambda, omega),
    })
}

/// Unnormalised Cartesian eigenfunction
/// `(1 + λq²)^{(2−N)/4} Πᵢ exp(−β²qᵢ²/2) H_{nᵢ}(βqᵢ)`, `β = √(Ω/ħ)`.
pub fn oscillator_eigenfunction(lambda: f64, omega: f64, hbar: f64, multi: &[usize], q: &[f64]) -> Result<f64> {
    let dim = multi.len();
    if q.len() != dim {
        return Err(Error::InvalidParameter(format!(
            "multi-index has {dim} entries but the point has {}",
            q.len()
        )));
    }
    let n: usize = multi.iter().sum();
    let level = oscillator_energy(lambda, omega, hbar, dim, n)?;
    let beta = (level.omega_deformed / hbar).sqrt();
    let q2: f64 = q.iter().map(|x| x * x).sum();
    let mut ln_abs = (2.0 - dim as f64) / 4.0 * (1.0 + lambda * q2).ln();
    let mut sign = 1.0;
    for (&ni, &qi) in multi.iter().zip(q) {
        let x = beta * qi;
        let h = hermite_scaled(ni, x);
        if h.mantissa == 0.0 {
            return Ok(0.0);
        }
        ln_abs += h.ln_abs() - x * x / 2.0;
        sign *= h.signum();
    }
    Ok(sign * ln_abs.exp())
}

/// Oscillator eigenfunction as a sample record.
pub fn oscillator_sample(lambda: f64, omega: f64, hbar: f64, multi: &[usize], q: &[f64]) -> Result<EigenfunctionSample> {
    Ok(EigenfunctionSample {
        point: q.to_vec(),
        value: oscillator_eigenfunction(lambda, omega, hbar, multi, q)?,
        quantum_numbers: multi.to_vec(),
    })
}

fn coulomb_m(dim: usize, principal: usize) -> f64 {
    principal as f64 + (dim as f64 - 1.0) / 2.0
}

fn coulomb_energy_value(eta: f64, k: f64, hbar: f64, dim: usize, principal: usize) -> f64 {
    let m = coulomb_m(dim, principal);
    let h2m2 = hbar * hbar * m * m;
    -k * k / (h2m2 + k * eta + (h2m2 * h2m2 + 2.0 * h2m2 * k * eta).sqrt())
}

/// Degeneracy `(2𝔫 + N − 1)(𝔫 + N − 2)! / (𝔫! (N − 1)!)` of a Coulomb level.
pub fn coulomb_degeneracy(dim: usize, principal: usize) -> Result<u64> {
    check_dim(dim)?;
    let c = binomial((principal + dim - 2) as u64, principal as u64)? as u128;
    let num = c
        .checked_mul((2 * principal + dim - 1) as u128)
        .ok_or(Error::Overflow("Coulomb degeneracy"))?;
    u64::try_from(num / (dim as u128 - 1)).map_err(|_| Error::Overflow("Coulomb degeneracy"))
}

pub fn coulomb_energy(eta: f64, k: f64, hbar: f64, dim: usize, n: usize, l: usize) -> Result<CoulombLevel> {
    check_deformation("eta", eta)?;
    check_positive("k", k)?;
    check_positive("hbar", hbar)?;
    check_dim(dim)?;
    let energy = coulomb_energy_value(eta, k, hbar, dim, n + l);
    Ok(CoulombLevel {
        n,
        l,
        principal: n + l,
        energy,
        coupling_deformed: k + eta * energy,
        degeneracy: coulomb_degeneracy(dim, n + l)?,
    })
}

/// Unnormalised radial eigenfunction
/// `(1 + η/r)^{(2−N)/4} r^l exp(−Kr/(ħ²M)) L_n^{2l+N−2}(2Kr/(ħ²M))`.
pub fn coulomb_radial_eigenfunction(eta: f64, k: f64, hbar: f64, dim: usize, n: usize, l: usize, r: f64) -> Result<f64> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::Domain(format!("radius r = {r} must be positive")));
    }
    let level = coulomb_energy(eta, k, hbar, dim, n, l)?;
    let m = coulomb_m(dim, n + l);
    let x = level.coupling_deformed * r / (hbar * hbar * m);
    let lag = laguerre_scaled(n, (2 * l + dim - 2) as f64, 2.0 * x);
    if lag.mantissa == 0.0 {
        return Ok(0.0);
    }
    let ln_abs = (2.0 - dim as f64) / 4.0 * (1.0 + eta / r).ln() + l as f64 * r.ln() - x + lag.ln_abs();
    Ok(lag.signum() * ln_abs.exp())
}

/// Unnormalised radial factor of the oscillator eigenfunction at radial
/// number `n_r` and angular momentum `l` (level `n = 2n_r + l`),
/// `(1 + λr²)^{(2−N)/4} r^l exp(−β²r²/2) L_{n_r}^{l+N/2−1}(β²r²)`.
pub fn oscillator_radial_eigenfunction(
    lambda: f64,
    omega: f64,
    hbar: f64,
    dim: usize,
    n_r: usize,
    l: usize,
    r: f64,
) -> Result<f64> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::Domain(format!("radius r = {r} must be non-negative")));
    }
    let level = oscillator_energy(lambda, omega, hbar, dim, 2 * n_r + l)?;
    let x = level.omega_deformed / hbar * r * r;
    let lag = laguerre_scaled(n_r, l as f64 + dim as f64 / 2.0 - 1.0, x);
    if lag.mantissa == 0.0 || (r == 0.0 && l > 0) {
        return Ok(0.0);
    }
    let mut ln_abs = (2.0 - dim as f64) / 4.0 * (1.0 + lambda * r * r).ln() - x / 2.0 + lag.ln_abs();
    if l > 0 {
        ln_abs += l as f64 * r.ln();
    }
    Ok(lag.signum() * ln_abs.exp())
}

/// Closed-form radial eigenfunction of a one-parameter model.
pub fn radial_eigenfunction(model: &ModelSpec, n_r: usize, l: usize, r: f64) -> Result<f64> {
    match model.family {
        Family::DarbouxIII { lambda } => {
            oscillator_radial_eigenfunction(lambda, model.omega, model.hbar, model.dim, n_r, l, r)
        }
        Family::TaubNut { eta } => coulomb_radial_eigenfunction(eta, model.k, model.hbar, model.dim, n_r, l, r),
        _ => Err(Error::Unsupported(format!("{} has no closed-form eigenfunctions", model.name()))),
    }
}

/// Closed-form energy of the radial state `(n_r, l)`.
pub fn radial_energy(model: &ModelSpec, n_r: usize, l: usize) -> Result<f64> {
    match model.family {
        Family::DarbouxIII { lambda } => {
            Ok(oscillator_energy(lambda, model.omega, model.hbar, model.dim, 2 * n_r + l)?.energy)
        }
        Family::TaubNut { eta } => Ok(coulomb_energy(eta, model.k, model.hbar, model.dim, n_r, l)?.energy),
        _ => Err(Error::Unsupported(format!("{} has no closed-form quantum spectrum", model.name()))),
    }
}

/// Coefficients `[c₀, c₁, c₂]` (truncated to `order`) of
/// `E(η) = c₀ + c₁η + c₂η² + O(η³)`.
pub fn coulomb_perturbative(k: f64, hbar: f64, dim: usize, n: usize, l: usize, order: usize) -> Result<Vec<f64>> {
    if order > 2 {
        return Err(Error::InvalidParameter(format!("perturbative order {order} > 2")));
    }
    check_positive("k", k)?;
    check_positive("hbar", hbar)?;
    check_dim(dim)?;
    let m = coulomb_m(dim, n + l);
    let hm2 = hbar * hbar * m * m;
    let coeffs = [
        -k * k / (2.0 * hm2),
        k.powi(3) / (2.0 * hm2 * hm2),
        -5.0 * k.powi(4) / (8.0 * hm2 * hm2 * hm2),
    ];
    Ok(coeffs[..=order].to_vec())
}

/// Horner sum of a truncated series.
pub fn series_value(coeffs: &[f64], eta: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * eta + c)
}

/// Number of hyperspherical harmonics of degree `l` on `S^{N−1}`,
/// `(2l + N − 2)(l + N − 3)! / (l! (N − 2)!)`.
pub fn harmonic_count(dim: usize, l: usize) -> Result<u64> {
    check_dim(dim)?;
    if dim == 2 {
        return Ok(if l == 0 { 1 } else { 2 });
    }
    // (l + N − 3)! / (l! (N − 2)!) = C(l + N − 3, l) / (N − 2)
    let c = binomial((l + dim - 3) as u64, l as u64)? as u128;
    let num = c
        .checked_mul((2 * l + dim - 2) as u128)
        .ok_or(Error::Overflow("harmonic count"))?;
    u64::try_from(num / (dim as u128 - 2)).map_err(|_| Error::Overflow("harmonic count"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QuantumNumbers {
    Oscillator { n: usize },
    Coulomb { principal: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub quantum_numbers: QuantumNumbers,
    pub energy: f64,
    pub degeneracy: u64,
    pub threshold: f64,
    /// Same level with the deformation switched off.
    pub flat_energy: f64,
}

/// Levels `0..=max` (principal numbers for the Coulomb family) of a
/// one-parameter quantum model.
pub fn spectrum_table(model: &ModelSpec, max: usize) -> Result<Vec<SpectrumEntry>> {
    model.validate()?;
    let dim = model.dim;
    match model.family {
        Family::DarbouxIII { lambda } => (0..=max)
            .map(|n| {
                let lvl = oscillator_energy(lambda, model.omega, model.hbar, dim, n)?;
                Ok(SpectrumEntry {
                    quantum_numbers: QuantumNumbers::Oscillator { n },
                    energy: lvl.energy,
                    degeneracy: lvl.degeneracy,
                    threshold: lvl.threshold,
                    flat_energy: oscillator_energy_value(0.0, model.omega, model.hbar, dim, n),
                })
            })
            .collect(),
        Family::TaubNut { eta } => (0..=max)
            .map(|p| {
                let lvl = coulomb_energy(eta, model.k, model.hbar, dim, p, 0)?;
                Ok(SpectrumEntry {
                    quantum_numbers: QuantumNumbers::Coulomb { principal: p },
                    energy: lvl.energy,
                    degeneracy: lvl.degeneracy,
                    threshold: 0.0,
                    flat_energy: coulomb_energy_value(0.0, model.k, model.hbar, dim, p),
                })
            })
            .collect(),
        _ => Err(Error::Unsupported(format!(
            "{} has no closed-form quantum spectrum",
            model.name()
        ))),
    }
}

/// `∫ |Φ(r)|² f(r)^N r^{N−1} dr` over `(0, r_max]` by composite Simpson,
/// the radial part of the curved-space norm.
pub fn radial_norm_squared<F>(model: &ModelSpec, profile: F, r_max: f64, intervals: usize) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let m = intervals + intervals % 2;
    let h = r_max / m as f64;
    let mut sum = 0.0;
    // the integrand vanishes at r = 0 for N >= 2 apart from the measure-zero endpoint
    for i in 1..=m {
        let r = i as f64 * h;
        let v = profile(r)?;
        let w = if i == m {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        sum += w * v * v * measure_weight(model, r)?;
    }
    Ok(sum * h / 3.0)
}
