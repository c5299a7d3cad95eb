//! Monic complex polynomials.
//!
//! A [`Polynomial`] is stored lowest degree first with the leading
//! coefficient equal to one. The signed-coefficient reading
//! `t^n + Σ (-1)^j σ_j t^{n-j}` is carried by [`SymCoeffs`]; the same list
//! of numbers doubles as the elementary symmetric functions `s_j` of the
//! roots.

mod roots;
mod structure;
mod symmetric;
mod waring;

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use roots::{cluster_roots, roots, roots_with_multiplicity, RootCluster, CLUSTER_RADIUS};
pub use structure::{roots_on_circle, self_inversive, CircleCheck};
pub use symmetric::{elem_sym, newton_convert, power_sums, NewtonDirection};
pub use waring::{power_sum_in_elementary, waring_coefficient, ElementaryExpansion};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PolyError {
    #[error("polynomial has no nonzero coefficient")]
    ZeroPolynomial,
    #[error("coefficient {index} is not finite")]
    NonFinite { index: usize },
    #[error("operation needs degree >= 1, got a constant polynomial")]
    Constant,
    #[error("root finder did not converge for {poly}")]
    NoConvergence { poly: String },
    #[error("power-sum index l = {l} must equal k(n-1) = {expected} (n = {n}, k = {k})")]
    WaringIndex {
        n: usize,
        l: usize,
        k: usize,
        expected: usize,
    },
    #[error("Waring coefficient needs n >= 2 and k >= 1, got n = {n}, k = {k}")]
    WaringRange { n: usize, k: usize },
}

/// Monic polynomial with complex coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    /// Builds the monic normal form of `coeffs` (lowest degree first).
    ///
    /// Trailing zero coefficients are dropped and the rest is divided by the
    /// leading coefficient.
    pub fn new(mut coeffs: Vec<Complex64>) -> Result<Self, PolyError> {
        if let Some(index) = coeffs.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(PolyError::NonFinite { index });
        }
        while coeffs.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        let lead = *coeffs.last().ok_or(PolyError::ZeroPolynomial)?;
        if lead != Complex64::new(1.0, 0.0) {
            for c in coeffs.iter_mut() {
                *c /= lead;
            }
        }
        *coeffs.last_mut().unwrap() = Complex64::new(1.0, 0.0);
        Ok(Polynomial { coeffs })
    }

    /// `t^n`.
    pub fn monomial(n: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        coeffs[n] = Complex64::new(1.0, 0.0);
        Polynomial { coeffs }
    }

    /// `Π (t - λ_i)`.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            coeffs.insert(0, Complex64::new(0.0, 0.0));
            for j in 0..coeffs.len() - 1 {
                let next = coeffs[j + 1];
                coeffs[j] -= r * next;
            }
        }
        Polynomial { coeffs }
    }

    /// `t^n + Σ_j (-1)^j σ_j t^{n-j}`.
    pub fn from_sym(sym: &SymCoeffs) -> Self {
        let n = sym.n();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        coeffs[n] = Complex64::new(1.0, 0.0);
        for (j, s) in sym.values.iter().enumerate() {
            let j = j + 1;
            coeffs[n - j] = if j % 2 == 0 { *s } else { -*s };
        }
        Polynomial { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// Value and first derivative at `z` by a doubled Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let mut p = zero;
        let mut dp = zero;
        for c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// Signed coefficients `σ_j = (-1)^j a_{n-j}`.
    pub fn sym(&self) -> SymCoeffs {
        let n = self.degree();
        let values = (1..=n)
            .map(|j| {
                let a = self.coeffs[n - j];
                if j % 2 == 0 {
                    a
                } else {
                    -a
                }
            })
            .collect();
        SymCoeffs { values }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Polynomial { coeffs }
    }

    /// Synthetic division by a monic divisor. Returns the monic quotient and
    /// the remainder coefficients (length `divisor.degree()`).
    pub fn div_rem(&self, divisor: &Polynomial) -> (Polynomial, Vec<Complex64>) {
        let d = divisor.degree();
        if d > self.degree() {
            return (Polynomial::monomial(0), self.coeffs.clone());
        }
        let mut rem = self.coeffs.clone();
        let qdeg = self.degree() - d;
        let mut quot = vec![Complex64::new(0.0, 0.0); qdeg + 1];
        for k in (0..=qdeg).rev() {
            let q = rem[k + d];
            quot[k] = q;
            for (j, b) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= q * b;
            }
        }
        rem.truncate(d);
        (Polynomial { coeffs: quot }, rem)
    }

    pub fn max_coeff_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest coefficient-wise distance; infinite when degrees differ.
    pub fn max_coeff_diff(&self, other: &Polynomial) -> f64 {
        if self.degree() != other.degree() {
            return f64::INFINITY;
        }
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "poly[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}{:+}i", c.re, c.im)?;
        }
        write!(f, "]")
    }
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        crate::pairs::serialize(&self.coeffs, s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let coeffs = crate::pairs::deserialize(d)?;
        Polynomial::new(coeffs).map_err(serde::de::Error::custom)
    }
}

/// `(σ_1, …, σ_n)`: signed characteristic coefficients, equivalently the
/// elementary symmetric functions of the roots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SymCoeffs {
    #[serde(with = "crate::pairs")]
    values: Vec<Complex64>,
}

impl SymCoeffs {
    pub fn new(values: Vec<Complex64>) -> Self {
        SymCoeffs { values }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }
}
