use std::f64::consts::PI;

use num_complex::Complex64;

use super::{ComplexMatrix, MatrixError};
use crate::cpoly::{roots_with_multiplicity, Polynomial, CLUSTER_RADIUS};

/// `det(tI - M)` by the Faddeev–LeVerrier trace recursion.
pub fn char_poly(m: &ComplexMatrix) -> Polynomial {
    let n = m.n();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[n] = Complex64::new(1.0, 0.0);
    let id = ComplexMatrix::identity(n);
    let mut mk = ComplexMatrix::zeros(n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I,  c_{n-k} = -tr(A M_k) / k
        mk = &(m * &mk) + &id.scale(coeffs[n - k + 1]);
        coeffs[n - k] = -(m * &mk).trace() / k as f64;
    }
    Polynomial::new(coeffs).expect("leading coefficient is one")
}

/// Eigenvalues with multiplicity. Roots that cluster around a multiple
/// eigenvalue are replaced by the cluster centre, so a `k`-fold eigenvalue
/// is not smeared over a radius of order `ε^{1/k}`.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>, MatrixError> {
    let clusters = roots_with_multiplicity(&char_poly(m), crate::ROOT_TOL, CLUSTER_RADIUS)?;
    Ok(clusters
        .iter()
        .flat_map(|c| std::iter::repeat_n(c.center, c.multiplicity))
        .collect())
}

pub fn spectral_radius(m: &ComplexMatrix) -> Result<f64, MatrixError> {
    Ok(eigenvalues(m)?.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// `(λ0 I - M)(I - conj(λ0) M)^{-1}`.
///
/// For `|λ0| < 1` this is an involutive automorphism of the spectral ball
/// that exchanges the eigenvalues `λ0` and `0`.
pub fn mobius(m: &ComplexMatrix, lambda0: Complex64) -> Result<ComplexMatrix, MatrixError> {
    if lambda0.norm() >= 1.0 {
        return Err(MatrixError::MobiusPole {
            modulus: lambda0.norm(),
        });
    }
    let id = ComplexMatrix::identity(m.n());
    let num = &id.scale(lambda0) - m;
    let den = &id - &m.scale(lambda0.conj());
    Ok(&num * &den.inverse_in("I - conj(λ0) M")?)
}

/// `σ_i(V + εA)` as exact polynomials in `ε`.
///
/// Each `σ_i` has degree at most `i` in `ε`, so sampling the characteristic
/// polynomial at the `n + 1` roots of unity and taking a discrete Fourier
/// transform recovers every coefficient to rounding level. Evaluating the
/// result at tiny `ε` keeps the relative accuracy of the lowest-order term,
/// which direct evaluation of `σ(V + εA)` would lose to cancellation.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaPencil {
    /// `coeffs[i][j]` is the coefficient of `ε^j` in `σ_{i+1}`.
    pub coeffs: Vec<Vec<Complex64>>,
}

pub fn sigma_pencil(v: &ComplexMatrix, a: &ComplexMatrix) -> SigmaPencil {
    let n = v.n();
    let count = n + 1;
    let nodes: Vec<Complex64> = (0..count)
        .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / count as f64))
        .collect();
    let samples: Vec<Vec<Complex64>> = nodes
        .iter()
        .map(|&w| char_poly(&(v + &a.scale(w))).sym().into_values())
        .collect();
    let coeffs = (0..n)
        .map(|i| {
            (0..count)
                .map(|j| {
                    let s: Complex64 = (0..count).map(|k| samples[k][i] * nodes[(k * j) % count].conj()).sum();
                    s / count as f64
                })
                .collect()
        })
        .collect();
    SigmaPencil { coeffs }
}

impl SigmaPencil {
    /// `σ_i(V + εA)` for `i` in `1..=n`.
    pub fn eval(&self, i: usize, eps: Complex64) -> Complex64 {
        self.coeffs[i - 1]
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * eps + c)
    }

    /// Drops coefficients at or below `rel_tol` times the largest coefficient
    /// of the same `σ_i`; these are rounding residue of exact zeros.
    pub fn cleaned(&self, rel_tol: f64) -> SigmaPencil {
        let coeffs = self
            .coeffs
            .iter()
            .map(|row| {
                let big = row.iter().map(|c| c.norm()).fold(0.0, f64::max);
                row.iter()
                    .map(|&c| if c.norm() <= rel_tol * big.max(1.0) { Complex64::new(0.0, 0.0) } else { c })
                    .collect()
            })
            .collect();
        SigmaPencil { coeffs }
    }

    /// Lowest power of `ε` with a nonzero coefficient in `σ_i`.
    pub fn lowest_order(&self, i: usize) -> Option<usize> {
        self.coeffs[i - 1].iter().position(|c| c.norm() > 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cpoly::elem_sym;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn full_block(n: usize) -> ComplexMatrix {
        let mut v = ComplexMatrix::zeros(n);
        for i in 0..n - 1 {
            v[(i, i + 1)] = c(1.0, 0.0);
        }
        v
    }

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    /// `I + R/(2‖R‖)` has singular values in `[1/2, 3/2]`.
    fn well_conditioned(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        let r = random_matrix(rng, n);
        &ComplexMatrix::identity(n) + &r.scale(c(0.5 / r.frobenius_norm(), 0.0))
    }

    #[test]
    fn full_block_plus_corner_is_binomial() {
        let zeta = c(0.03, -0.02);
        for n in 1..=6 {
            let mut m = full_block(n);
            m[(n - 1, 0)] += zeta;
            let p = char_poly(&m);
            let mut expected = vec![c(0.0, 0.0); n + 1];
            expected[0] = -zeta;
            expected[n] = c(1.0, 0.0);
            assert!(p.max_coeff_diff(&Polynomial::new(expected).unwrap()) < 1e-15, "n={n}");
        }
        assert_eq!(char_poly(&ComplexMatrix::zeros(4)), Polynomial::monomial(4));
    }

    #[test]
    fn conjugated_diagonal_matches_elem_sym() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let eigs = [c(0.5, 0.1), c(-0.3, 0.2), c(0.0, -0.7), c(0.9, 0.0)];
        let q = well_conditioned(&mut rng, 4);
        let m = &(&q * &ComplexMatrix::diagonal(&eigs)) * &q.inverse().unwrap();
        let s = char_poly(&m).sym();
        let expected = elem_sym(&eigs);
        for (a, b) in s.values().iter().zip(expected.values()) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn spectral_radius_examples() {
        assert!((spectral_radius(&ComplexMatrix::identity(3)).unwrap() - 1.0).abs() < 1e-12);
        let tri = ComplexMatrix::from_fn(4, |i, j| {
            if i == j {
                c(0.1 * i as f64, -0.2)
            } else if j > i {
                c(1.0, 1.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let expected = c(0.3, -0.2).norm();
        assert!((spectral_radius(&tri).unwrap() - expected).abs() < 1e-8);
        // V + ζE_{m,1} for a full block: ρ = |ζ|^{1/m}
        let zeta = c(1e-4, 0.0);
        let mut m = full_block(3);
        m[(2, 0)] = zeta;
        assert!((spectral_radius(&m).unwrap() - zeta.norm().powf(1.0 / 3.0)).abs() < 1e-14);
    }

    #[test]
    fn mobius_examples() {
        let l0 = c(0.4, 0.1);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let scalar = ComplexMatrix::identity(3).scale(l0);
        assert!(mobius(&scalar, l0).unwrap().frobenius_norm() < 1e-15);
        let m = random_matrix(&mut rng, 3);
        assert!(mobius(&m, c(0.0, 0.0)).unwrap().max_abs_diff(&-&m) < 1e-15);
        assert!(matches!(mobius(&m, c(1.0, 0.0)), Err(MatrixError::MobiusPole { .. })));
    }

    #[test]
    fn mobius_acts_on_spectrum_and_is_involutive() {
        let l0 = c(0.4, 0.1);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let eigs: Vec<Complex64> = (0..3)
                .map(|_| Complex64::from_polar(rng.gen_range(0.0..0.9), rng.gen_range(0.0..2.0 * PI)))
                .collect();
            let q = well_conditioned(&mut rng, 3);
            let m = &(&q * &ComplexMatrix::diagonal(&eigs)) * &q.inverse().unwrap();
            let w = mobius(&m, l0).unwrap();
            let image: Vec<Complex64> = eigs.iter().map(|&z| (l0 - z) / (1.0 - l0.conj() * z)).collect();
            let found = eigenvalues(&w).unwrap();
            for z in &image {
                let best = found.iter().map(|f| (f - z).norm()).fold(f64::INFINITY, f64::min);
                assert!(best < 1e-9);
            }
            assert!(spectral_radius(&w).unwrap() < 1.0);
            assert!(mobius(&w, l0).unwrap().max_abs_diff(&m) < 1e-9);
        }
    }

    #[test]
    fn pencil_matches_direct_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let v = full_block(4);
        let a = random_matrix(&mut rng, 4);
        let pencil = sigma_pencil(&v, &a);
        let eps = c(0.3, 0.2);
        let direct = char_poly(&(&v + &a.scale(eps))).sym();
        for i in 1..=4 {
            assert!((pencil.eval(i, eps) - direct.values()[i - 1]).norm() < 1e-13);
        }
        // σ_1 = ε tr A exactly: no constant term
        assert_eq!(pencil.cleaned(1e-10).lowest_order(1), Some(1));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn char_poly_is_similarity_invariant(seed in any::<u64>(), n in 1usize..=6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_matrix(&mut rng, n);
            let q = well_conditioned(&mut rng, n);
            let conj = &(&q * &m) * &q.inverse().unwrap();
            prop_assert!(char_poly(&conj).max_coeff_diff(&char_poly(&m)) < 1e-8);
        }

        #[test]
        fn spectral_radius_is_homogeneous(seed in any::<u64>(), n in 1usize..=6, re in -2.0f64..2.0, im in -2.0f64..2.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_matrix(&mut rng, n);
            let lambda = c(re, im);
            let lhs = spectral_radius(&m.scale(lambda)).unwrap();
            let rhs = lambda.norm() * spectral_radius(&m).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-10);
        }
    }
}
