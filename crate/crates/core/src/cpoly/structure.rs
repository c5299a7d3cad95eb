use num_complex::Complex64;
use serde::Serialize;

use super::{roots_with_multiplicity, PolyError, Polynomial, CLUSTER_RADIUS};

/// Returns `ε` with `|ε| = 1` when `a_{n-j} = ε·conj(a_j)` for all `j`
/// within `tol`.
pub fn self_inversive(p: &Polynomial, tol: f64) -> Option<Complex64> {
    let a = p.coeffs();
    let n = p.degree();
    if n == 0 {
        return None;
    }
    // a_n = 1, so ε = 1 / conj(a_0) and |a_0| must be 1
    if (a[0].norm() - 1.0).abs() > tol {
        return None;
    }
    let eps = a[0].conj().inv();
    let eps = eps / eps.norm();
    let ok = (0..=n).all(|j| (a[n - j] - eps * a[j].conj()).norm() <= tol);
    ok.then_some(eps)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircleCheck {
    pub on_circle: bool,
    /// `max ||r| - 1|` over the roots, multiple roots taken at their
    /// cluster centre.
    pub deviation: f64,
}

/// Whether every root of `p` has modulus in `[1 - tol, 1 + tol]`.
///
/// Moduli are measured at cluster centres so that a multiple root on the
/// circle, which a floating-point solver scatters by `O(ε^{1/k})`, is not
/// reported as leaving it.
pub fn roots_on_circle(p: &Polynomial, tol: f64) -> Result<CircleCheck, PolyError> {
    let clusters = roots_with_multiplicity(p, crate::ROOT_TOL, CLUSTER_RADIUS)?;
    let deviation = clusters
        .iter()
        .map(|c| (c.center.norm() - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(CircleCheck {
        on_circle: deviation <= tol,
        deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real_poly(coeffs: &[f64]) -> Polynomial {
        Polynomial::new(coeffs.iter().map(|&x| c(x, 0.0)).collect()).unwrap()
    }

    #[test]
    fn palindromic_is_self_inversive() {
        let eps = self_inversive(&real_poly(&[1.0, 2.0, 1.0]), 1e-12).unwrap();
        assert!((eps - c(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(self_inversive(&real_poly(&[3.0, 2.0, 1.0]), 1e-12), None);
    }

    #[test]
    fn complex_self_inversive() {
        // a_0 = i, a_1 = 2, a_2 = 1: need a_2 = ε conj(a_0) -> ε = i, a_1 = ε conj(a_1) fails for real 2
        assert_eq!(self_inversive(&Polynomial::new(vec![c(0.0, 1.0), c(2.0, 0.0), c(1.0, 0.0)]).unwrap(), 1e-12), None);
        // a_1 = 1 + i: ε conj(a_1) = i (1 - i) = 1 + i
        let p = Polynomial::new(vec![c(0.0, 1.0), c(1.0, 1.0), c(1.0, 0.0)]).unwrap();
        let eps = self_inversive(&p, 1e-12).unwrap();
        assert!((eps - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn quartic_roots_of_unity_on_circle() {
        let check = roots_on_circle(&real_poly(&[-1.0, 0.0, 0.0, 0.0, 1.0]), 1e-12).unwrap();
        assert!(check.on_circle);
        assert!(check.deviation <= 1e-12);
    }

    #[test]
    fn off_circle_deviation() {
        let p = Polynomial::from_roots(&[c(0.5, 0.0), c(2.0, 0.0)]);
        let check = roots_on_circle(&p, 1e-8).unwrap();
        assert!(!check.on_circle);
        assert!((check.deviation - 1.0).abs() < 1e-12);
    }

    #[test]
    fn triple_root_on_circle_is_accepted() {
        // (λ - 1)^3 (λ + 1)
        let p = Polynomial::from_roots(&[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)]);
        let check = roots_on_circle(&p, 1e-8).unwrap();
        assert!(check.on_circle, "deviation {}", check.deviation);
    }
}
