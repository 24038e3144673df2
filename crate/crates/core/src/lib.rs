//! Maximally superintegrable deformations of the isotropic oscillator and the
//! Coulomb problem.
//!
//! The crate covers four Hamiltonian families on spherically symmetric,
//! conformally flat spaces:
//!
//! - the Darboux III oscillator `H = (p² + ω²q²) / (2(1 + λq²))`,
//! - the Taub–NUT Coulomb system `H = |q| p² / (2(η + |q|)) − k / (η + |q|)`,
//! - and their two-parameter generalisations in `(λ, ξ)` and `(η, ζ)`.
//!
//! Every closed-form statement (curvatures, integrals of motion, spectra,
//! degeneracies) is paired with an independent numerical route: the general
//! conformal curvature formula, forward-mode Poisson brackets, adaptive
//! trajectory integration and a finite-difference radial eigensolver.

pub mod classical;
pub mod dual;
pub mod error;
pub mod geometry;
pub mod model;
pub mod quantum_analytic;
pub mod quantum_numeric;
pub mod specfun;

pub use error::{Error, Result};
pub use model::{Family, ModelSpec};
