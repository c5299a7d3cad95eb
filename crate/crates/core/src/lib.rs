//! Numerical laboratory for invariant functions of the spectral ball `Ω_n`
//! (matrices with spectral radius below one) and the symmetrized polydisk
//! `G_n = σ(Ω_n)`.
//!
//! The crate never solves for a Green function directly. Everything it
//! reports is a computable competitor: `m log ρ` lower bounds, analytic-disc
//! upper bounds, ball-comparison squeezes, and closed-form metric bounds,
//! together with log-log exponent fits that expose how these behave near
//! the pole.
//!
//! Module map:
//!
//! * [`cpoly`]: monic complex polynomials, root finding, Newton/Waring
//!   identities, self-inversive and unit-circle tests.
//! * [`cmatrix`]: dense complex matrices, characteristic polynomials,
//!   Jordan profiles, Möbius reduction.
//! * [`domains`]: the σ map, membership in `Ω_n` and `G_n`, Šilov sampling
//!   and ball radii.
//! * [`splitting`]: contour-integral splitting of the spectrum and block
//!   diagonalization.
//! * [`green_lab`]: constructions of perturbation directions, bound
//!   functions, exponent fits and the derogatory-pole report.
//! * [`metrics`]: closed-form metric bounds on `G_n`, the unit-circle lemma
//!   for `p_{n,t}` and the sampled minimax estimator.

pub mod cmatrix;
pub mod cpoly;
pub mod domains;
pub mod green_lab;
pub mod metrics;
pub mod splitting;

mod pairs;

pub use num_complex::Complex64;

/// Default tolerance handed to the root finder.
pub const ROOT_TOL: f64 = 1e-10;
