//! The σ map and the two domains it links: the spectral ball `Ω_n` and the
//! symmetrized polydisk `G_n = σ(Ω_n)`.
//!
//! A point `z ∈ ℂⁿ` lies in `G_n` exactly when every root of
//! `P_z(t) = tⁿ + Σ (-1)^j z_j t^{n-j}` is in the open unit disc. Membership
//! is three-valued because root moduli near one are ill-conditioned.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cmatrix::{char_poly, spectral_radius, ComplexMatrix, MatrixError};
use crate::cpoly::{elem_sym, roots_with_multiplicity, PolyError, Polynomial, SymCoeffs, CLUSTER_RADIUS};

/// Default width of the boundary band around modulus one.
pub const BOUNDARY_TOL: f64 = 1e-8;

/// Shrink factor applied to the inradius before certification.
const CERT_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DomainError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("point has dimension {got}, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("{what} must be at least {min}, got {got}")]
    TooFew { what: &'static str, min: usize, got: usize },
    #[error("centre is not inside G_n")]
    CenterOutside,
}

/// A point of `ℂⁿ` read as σ-coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GPoint {
    pub n: usize,
    #[serde(with = "crate::pairs")]
    pub z: Vec<Complex64>,
}

impl GPoint {
    pub fn new(z: Vec<Complex64>) -> Self {
        GPoint { n: z.len(), z }
    }

    pub fn origin(n: usize) -> Self {
        GPoint::new(vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn from_real(values: &[f64]) -> Self {
        GPoint::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn distance(&self, other: &GPoint) -> f64 {
        self.z
            .iter()
            .zip(&other.z)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `P_z(t) = tⁿ + Σ (-1)^j z_j t^{n-j}`.
    pub fn polynomial(&self) -> Polynomial {
        Polynomial::from_sym(&SymCoeffs::new(self.z.clone()))
    }

    fn offset(&self, dir: &[Complex64], s: f64) -> GPoint {
        GPoint::new(self.z.iter().zip(dir).map(|(a, d)| a + d * s).collect())
    }
}

/// `σ(M)`, the signed characteristic coefficients.
pub fn sigma(m: &ComplexMatrix) -> GPoint {
    GPoint::new(char_poly(m).sym().into_values())
}

/// `σ` of the diagonal matrix with the given entries.
pub fn sigma_of_roots(roots: &[Complex64]) -> GPoint {
    GPoint::new(elem_sym(roots).into_values())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Membership {
    Inside,
    Boundary,
    Outside,
}

impl Membership {
    /// Classifies by the largest root modulus.
    pub fn from_max_modulus(rho: f64, tol: f64) -> Self {
        if (rho - 1.0).abs() <= tol {
            Membership::Boundary
        } else if rho < 1.0 {
            Membership::Inside
        } else {
            Membership::Outside
        }
    }
}

pub fn spectral_ball_membership(m: &ComplexMatrix, tol: f64) -> Result<Membership, DomainError> {
    Ok(Membership::from_max_modulus(spectral_radius(m)?, tol))
}

pub fn in_spectral_ball(m: &ComplexMatrix, tol: f64) -> Result<bool, DomainError> {
    Ok(spectral_ball_membership(m, tol)? == Membership::Inside)
}

/// Largest root modulus of `P_z`, measured at cluster centres.
pub fn max_root_modulus(z: &GPoint) -> Result<f64, DomainError> {
    let clusters = roots_with_multiplicity(&z.polynomial(), crate::ROOT_TOL, CLUSTER_RADIUS)?;
    Ok(clusters.iter().map(|c| c.center.norm()).fold(0.0, f64::max))
}

pub fn polydisk_membership(z: &GPoint, tol: f64) -> Result<Membership, DomainError> {
    if z.n == 0 {
        return Err(DomainError::Dimension { expected: 1, got: 0 });
    }
    Ok(Membership::from_max_modulus(max_root_modulus(z)?, tol))
}

pub fn in_symmetrized_polydisk(z: &GPoint, tol: f64) -> Result<bool, DomainError> {
    Ok(polydisk_membership(z, tol)? == Membership::Inside)
}

/// A Šilov boundary point together with the angles it came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShilovSample {
    pub angles: Vec<f64>,
    pub point: GPoint,
}

/// Angles of sample `index`, drawn from its own window of the seeded stream.
///
/// Each angle consumes one `u64`, i.e. two 32-bit words, so sample `i`
/// starts at word `2 n i`. Any partition of the indices across workers
/// therefore reproduces the sequential output.
pub fn shilov_angles(n: usize, seed: u64, index: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_word_pos(2 * (n as u128) * (index as u128));
    (0..n).map(|_| rng.gen::<f64>() * std::f64::consts::TAU).collect()
}

pub fn shilov_point(angles: &[f64]) -> GPoint {
    let roots: Vec<Complex64> = angles.iter().map(|&a| Complex64::from_polar(1.0, a)).collect();
    sigma_of_roots(&roots)
}

pub fn shilov_sample_with_angles(n: usize, count: usize, seed: u64) -> Vec<ShilovSample> {
    (0..count)
        .into_par_iter()
        .map(|i| {
            let angles = shilov_angles(n, seed, i);
            let point = shilov_point(&angles);
            ShilovSample { angles, point }
        })
        .collect()
}

/// `count` points `σ(e^{iθ_1}, …, e^{iθ_n})` with seeded uniform angles.
pub fn shilov_sample(n: usize, count: usize, seed: u64) -> Vec<GPoint> {
    shilov_sample_with_angles(n, count, seed)
        .into_iter()
        .map(|s| s.point)
        .collect()
}

/// Ball comparison radii around a centre `p ∈ G_n`:
/// `B(p, certified_r) ⊂ G_n ⊂ B(p, big_r)` up to sampling.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallRadii {
    /// Smallest distance from `p` to a sampled Šilov point, shrunk by ray
    /// bisection wherever certification found an exit point closer in.
    pub r: f64,
    /// `r (1 - 10⁻³)`, the radius the certification pass verified.
    pub certified_r: f64,
    /// Largest distance to the Šilov boundary found by sampling and local
    /// ascent in the angles.
    pub big_r: f64,
    pub directions: usize,
    /// Whether certification had to shrink the sampled inradius.
    pub shrunk: bool,
}

/// Radii at the origin; see [`ball_radii_at`].
pub fn ball_radii(n: usize, samples: usize, seed: u64) -> Result<BallRadii, DomainError> {
    ball_radii_at(&GPoint::origin(n), samples, seed)
}

/// Inradius and circumradius estimates of `G_n` seen from `center`.
///
/// The outer radius is the maximum distance to Šilov samples, refined by a
/// coordinate ascent in the angles. Because the inner ball cannot be read
/// off the Šilov boundary, the sampled minimum is only a candidate: along
/// `samples` random complex directions (plus the coordinate axes) points at
/// radii up to `r (1 - 10⁻³)` are tested for membership, and any exit point
/// found on a ray lowers `r` to the bisected exit distance.
pub fn ball_radii_at(center: &GPoint, samples: usize, seed: u64) -> Result<BallRadii, DomainError> {
    const MIN_SAMPLES: usize = 1000;
    if samples < MIN_SAMPLES {
        return Err(DomainError::TooFew {
            what: "samples",
            min: MIN_SAMPLES,
            got: samples,
        });
    }
    let n = center.n;
    if polydisk_membership(center, BOUNDARY_TOL)? != Membership::Inside {
        return Err(DomainError::CenterOutside);
    }

    let pts = shilov_sample_with_angles(n, samples, seed);
    let dists: Vec<f64> = pts.iter().map(|s| s.point.distance(center)).collect();
    let (best, _) = dists
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("samples is nonempty");
    let big_r = ascend_distance(center, &pts[best].angles).max(dists[best]);
    let mut r = dists.iter().copied().fold(f64::INFINITY, f64::min);

    let directions = certification_directions(n, samples, seed);
    let mut shrunk = false;
    for _ in 0..4 {
        let exits: Vec<Option<f64>> = directions
            .par_iter()
            .map(|u| ray_exit(center, u, r * (1.0 - CERT_MARGIN)))
            .collect::<Result<_, _>>()?;
        match exits.into_iter().flatten().reduce(f64::min) {
            Some(exit) => {
                shrunk = true;
                r = exit;
            }
            None => break,
        }
    }
    Ok(BallRadii {
        r,
        certified_r: r * (1.0 - CERT_MARGIN),
        big_r,
        directions: directions.len(),
        shrunk,
    })
}

fn ascend_distance(center: &GPoint, start: &[f64]) -> f64 {
    let mut angles = start.to_vec();
    let mut best = shilov_point(&angles).distance(center);
    let mut h = 0.1;
    while h > 1e-10 {
        let mut improved = false;
        for k in 0..angles.len() {
            for sign in [1.0, -1.0] {
                let mut trial = angles.clone();
                trial[k] += sign * h;
                let d = shilov_point(&trial).distance(center);
                if d > best {
                    best = d;
                    angles = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    best
}

fn certification_directions(n: usize, count: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_ba11);
    let mut dirs = Vec::with_capacity(count + 4 * n);
    for j in 0..n {
        for unit in [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0)] {
            let mut u = vec![Complex64::new(0.0, 0.0); n];
            u[j] = unit;
            dirs.push(u);
        }
    }
    for _ in 0..count {
        // Box–Muller pairs give an isotropic direction in ℂⁿ
        let u: Vec<Complex64> = (0..n)
            .map(|_| {
                let (a, b): (f64, f64) = (rng.gen::<f64>().max(f64::MIN_POSITIVE), rng.gen());
                Complex64::from_polar((-2.0 * a.ln()).sqrt(), std::f64::consts::TAU * b)
            })
            .collect();
        let norm = u.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        dirs.push(u.into_iter().map(|c| c / norm).collect());
    }
    dirs
}

/// Checks `center + s u` for `s` on a grid up to `reach`; returns the
/// bisected exit distance if the ray leaves the interior.
fn ray_exit(center: &GPoint, u: &[Complex64], reach: f64) -> Result<Option<f64>, DomainError> {
    const STEPS: usize = 8;
    let inside = |s: f64| -> Result<bool, DomainError> {
        Ok(polydisk_membership(&center.offset(u, s), BOUNDARY_TOL)? == Membership::Inside)
    };
    let mut last_in = 0.0;
    for k in 1..=STEPS {
        let s = reach * k as f64 / STEPS as f64;
        if inside(s)? {
            last_in = s;
            continue;
        }
        let (mut lo, mut hi) = (last_in, s);
        for _ in 0..50 {
            let mid = 0.5 * (lo + hi);
            if inside(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return Ok(Some(lo));
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmatrix::jordan_build;
    use proptest::prelude::*;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma(&ComplexMatrix::zeros(3)), GPoint::origin(3));
        let comp = ComplexMatrix::companion(&[c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let s = sigma(&comp);
        assert!(s.distance(&GPoint::from_real(&[0.0, 0.0, 1.0])) < 1e-15);
        // ζX for X with σ(X) = (0, 0, 1): σ(ζX) = ζ³ (0, 0, 1)
        let zeta = c(0.2, 0.3);
        let s = sigma(&comp.scale(zeta));
        let expected = GPoint::new(vec![c(0.0, 0.0), c(0.0, 0.0), zeta.powu(3)]);
        assert!(s.distance(&expected) < 1e-15);
    }

    #[test]
    fn origin_is_inside_and_paper_point_is_boundary() {
        for n in 1..=6 {
            assert_eq!(polydisk_membership(&GPoint::origin(n), BOUNDARY_TOL).unwrap(), Membership::Inside);
        }
        for n in 3..=8 {
            // coefficients of (λ^{n-1} - 1)(λ - 1)
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let mut z = vec![0.0; n];
            z[0] = 1.0;
            z[n - 2] = sign;
            z[n - 1] = sign;
            let p = GPoint::from_real(&z);
            assert_eq!(polydisk_membership(&p, BOUNDARY_TOL).unwrap(), Membership::Boundary, "n={n}");
        }
    }

    #[test]
    fn sigma_of_polydisk_point_is_inside() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let n = rng.gen_range(1..=6);
            let roots: Vec<Complex64> = (0..n)
                .map(|_| Complex64::from_polar(rng.gen_range(0.0..0.9), rng.gen_range(0.0..6.3)))
                .collect();
            assert!(in_symmetrized_polydisk(&sigma_of_roots(&roots), BOUNDARY_TOL).unwrap());
        }
    }

    #[test]
    fn spectral_ball_examples() {
        let v = jordan_build(&[(c(0.0, 0.0), 2), (c(0.0, 0.0), 1)]).unwrap();
        assert!(in_spectral_ball(&v, BOUNDARY_TOL).unwrap());
        assert_eq!(spectral_ball_membership(&ComplexMatrix::identity(2), BOUNDARY_TOL).unwrap(), Membership::Boundary);
        let big = ComplexMatrix::identity(2).scale(c(1.5, 0.0));
        assert_eq!(spectral_ball_membership(&big, BOUNDARY_TOL).unwrap(), Membership::Outside);
    }

    #[test]
    fn shilov_zero_angles_give_signed_binomials() {
        let p = shilov_point(&[0.0; 4]);
        assert!(p.distance(&GPoint::from_real(&[4.0, 6.0, 4.0, 1.0])) < 1e-14);
    }

    #[test]
    fn shilov_samples_lie_on_boundary() {
        for s in shilov_sample(5, 200, 7) {
            let rho = max_root_modulus(&s).unwrap();
            assert!((rho - 1.0).abs() < 1e-10);
            assert!(!in_symmetrized_polydisk(&s, BOUNDARY_TOL).unwrap());
            assert_eq!(polydisk_membership(&s, BOUNDARY_TOL).unwrap(), Membership::Boundary);
        }
    }

    #[test]
    fn shilov_coefficient_bound() {
        let pts = shilov_sample(3, 10_000, 42);
        let max_z2 = pts.iter().map(|p| p.z[1].norm()).fold(0.0, f64::max);
        assert!(max_z2 <= 3.0 + 1e-12);
    }

    #[test]
    fn parallel_sampling_matches_sequential() {
        let par = shilov_sample_with_angles(4, 257, 99);
        let seq: Vec<Vec<f64>> = {
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            (0..257)
                .map(|_| (0..4).map(|_| rng.gen::<f64>() * std::f64::consts::TAU).collect())
                .collect()
        };
        for (p, s) in par.iter().zip(&seq) {
            assert_eq!(&p.angles, s);
        }
        assert_eq!(par, shilov_sample_with_angles(4, 257, 99));
    }

    #[test]
    fn ball_radii_examples() {
        let b = ball_radii(1, 1000, 3).unwrap();
        assert!((b.r - 1.0).abs() < 1e-6 && (b.big_r - 1.0).abs() < 1e-12);
        assert!(!b.shrunk);
        let b = ball_radii(2, 1000, 3).unwrap();
        assert!(b.big_r >= 5f64.sqrt() - 1e-9);
        assert!(b.big_r <= 5f64.sqrt() + 1e-9);
        let b = ball_radii(3, 1000, 3).unwrap();
        assert!(b.r > 0.0 && b.r <= 1.0);
        assert!(matches!(ball_radii(3, 10, 3), Err(DomainError::TooFew { .. })));
    }

    #[test]
    fn certified_ball_is_inside() {
        let b = ball_radii(3, 1000, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let u: Vec<Complex64> = (0..3).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let norm = u.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            let s = rng.gen_range(0.0..b.certified_r) / norm;
            let p = GPoint::new(u.iter().map(|x| x * s).collect());
            assert!(in_symmetrized_polydisk(&p, BOUNDARY_TOL).unwrap());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn sigma_is_conjugation_invariant(seed in any::<u64>(), n in 1usize..=6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_matrix(&mut rng, n);
            let r = random_matrix(&mut rng, n);
            let q = &ComplexMatrix::identity(n) + &r.scale(c(0.5 / r.frobenius_norm(), 0.0));
            let conj = &(&q * &m) * &q.inverse().unwrap();
            prop_assert!(sigma(&conj).distance(&sigma(&m)) < 1e-8);
        }
    }

    #[test]
    fn memberships_agree_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for k in 0..500 {
            let n = 1 + k % 6;
            let m = random_matrix(&mut rng, n);
            let rho = spectral_radius(&m).unwrap();
            let target = if k % 2 == 0 { rng.gen_range(0.05..0.95) } else { rng.gen_range(1.05..2.0) };
            let m = m.scale(c(target / rho, 0.0));
            let omega = spectral_ball_membership(&m, BOUNDARY_TOL).unwrap();
            let g = polydisk_membership(&sigma(&m), BOUNDARY_TOL).unwrap();
            assert_eq!(omega, g, "k={k}");
            assert_ne!(omega, Membership::Boundary);
        }
    }
}
