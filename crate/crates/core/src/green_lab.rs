//! Perturbation directions at a derogatory pole, computable bounds for the
//! pluricomplex Green functions of `Ω_n` and `G_n`, and log-log exponent
//! fits of those bounds.
//!
//! Near a pole `V` with `m(λ) < n(λ)` the spectral-ball side is bounded
//! below by `m log ρ` (or `m₀ log ρ⁰` after splitting off the other
//! eigenvalues) and above by explicit analytic discs, while the
//! symmetrized-polydisk side is squeezed between two ball Green functions.
//! Fitting each bound against `log |ζ|` along `V + ζX` exposes the exponents
//! `m(λ)` and `n(λ)`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cmatrix::{
    chain_basis, char_poly, f0_and_d, jordan_build, jordan_profile, mobius, sigma_pencil, spectral_radius,
    ComplexMatrix, JordanOptions, JordanProfile, MatrixError, RANK_TOL,
};
use crate::cpoly::{roots, CLUSTER_RADIUS, PolyError, Polynomial, SymCoeffs};
use crate::domains::{ball_radii_at, sigma, BallRadii, DomainError, GPoint, BOUNDARY_TOL};
use crate::splitting::{block_diagonalize, SplitError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GreenError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Split(#[from] SplitError),
    #[error("gap construction needs 1 <= m <= n-1, got n = {n}, m = {m}")]
    GapIndex { n: usize, m: usize },
    #[error("no admissible gap polynomial in {attempts} draws")]
    GapBudget { attempts: usize },
    #[error("invalid sample grid: {0}")]
    Grid(String),
    #[error("sample at ζ = {zeta} is not finite ({value})")]
    NonFinite { zeta: Complex64, value: f64 },
    #[error("|ζ| = {modulus} is not inside the unit disc")]
    NotInDisc { modulus: f64 },
    #[error("disc leaves the spectral ball: ρ(V + wX) = {rho} at w = {w}")]
    DiscLeaves { w: Complex64, rho: f64 },
    #[error("‖z - p‖ = {distance:e} is not below the certified inradius {r:e}")]
    OutsideInnerBall { distance: f64, r: f64 },
    #[error("not enough generic draws: {accepted} accepted out of {drawn}")]
    TooFewGeneric { accepted: usize, drawn: usize },
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

// --------------------------------------------------------------------------
// Perturbation directions

/// `E_{m,1}` for a nilpotent Jordan `V` whose largest block has size `m`.
///
/// `V + ζX` has characteristic polynomial `(t^m - ζ) t^{n-m}`.
pub fn make_remark_x(v: &ComplexMatrix) -> Result<ComplexMatrix, GreenError> {
    let s = f0_and_d(v)?;
    Ok(ComplexMatrix::unit(v.n(), s.m - 1, 0))
}

/// Companion matrix of `tⁿ - 1`; its spectrum is the `n`-th roots of unity.
pub fn make_roots_of_unity_x(n: usize) -> ComplexMatrix {
    let mut coeffs = vec![c(0.0); n + 1];
    coeffs[0] = c(-1.0);
    coeffs[n] = c(1.0);
    ComplexMatrix::companion(&coeffs)
}

/// A companion matrix with `σ_1 = … = σ_m = 0` and simple nonzero roots.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapX {
    pub matrix: ComplexMatrix,
    pub sigma: SymCoeffs,
    #[serde(with = "crate::pairs")]
    pub roots: Vec<Complex64>,
    /// Smallest of the pairwise root distances and the root moduli.
    pub separation: f64,
    pub attempts: usize,
}

const GAP_BUDGET: usize = 100;
const GAP_SEPARATION: f64 = 0.05;

/// Draws `σ_{m+1}, …, σ_n` with moduli in `[1/4, 1]` and uniform phases until
/// the roots are pairwise at least `0.05` apart and at least that far from
/// the origin.
pub fn make_gap_x(n: usize, m: usize, seed: u64) -> Result<GapX, GreenError> {
    if m == 0 || m >= n {
        return Err(GreenError::GapIndex { n, m });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=GAP_BUDGET {
        let values: Vec<Complex64> = (1..=n)
            .map(|j| {
                if j <= m {
                    c(0.0)
                } else {
                    Complex64::from_polar(rng.gen_range(0.25..=1.0), rng.gen_range(0.0..TAU))
                }
            })
            .collect();
        let sym = SymCoeffs::new(values);
        let p = Polynomial::from_sym(&sym);
        let rs = roots(&p, crate::ROOT_TOL)?;
        let mut separation = rs.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
        for (i, a) in rs.iter().enumerate() {
            for b in &rs[i + 1..] {
                separation = separation.min((a - b).norm());
            }
        }
        if separation >= GAP_SEPARATION {
            return Ok(GapX {
                matrix: ComplexMatrix::companion(p.coeffs()),
                sigma: sym,
                roots: rs,
                separation,
                attempts: attempt,
            });
        }
    }
    Err(GreenError::GapBudget { attempts: GAP_BUDGET })
}

// --------------------------------------------------------------------------
// Exponent fits

/// `10⁻¹, …, 10⁻⁶`.
pub fn default_radii() -> Vec<f64> {
    (1..=6).map(|k| 10f64.powi(-k)).collect()
}

pub const DEFAULT_ANGLES: usize = 16;

/// Least-squares line through `(log r, max_θ h(r e^{iθ}))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentFit {
    pub radii: Vec<f64>,
    pub angles_per_radius: usize,
    /// Phase of the first angle; the others follow at spacing `2π/angles`.
    pub angle_offset: f64,
    /// Maximum over the angles at each radius.
    pub values: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub max_abs_residual: f64,
}

impl ExponentFit {
    pub fn fitted(&self, radius: f64) -> f64 {
        self.intercept + self.slope * radius.ln()
    }

    /// `radius, log_radius, value, fitted` rows.
    pub fn rows(&self) -> impl Iterator<Item = [f64; 4]> + '_ {
        self.radii
            .iter()
            .zip(&self.values)
            .map(|(&r, &v)| [r, r.ln(), v, self.fitted(r)])
    }
}

pub(crate) fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let res = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).abs())
        .fold(0.0, f64::max);
    (slope, intercept, res)
}

fn check_radii(radii: &[f64]) -> Result<(), GreenError> {
    if radii.len() < 2 {
        return Err(GreenError::Grid(format!("need at least two radii, got {}", radii.len())));
    }
    if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(GreenError::Grid("radii must be positive and finite".into()));
    }
    if radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(GreenError::Grid("radii must be strictly decreasing".into()));
    }
    Ok(())
}

/// Fits `max_θ h(r e^{iθ})` against `log r`.
///
/// The angle offset is drawn from `seed`. Samples are evaluated in
/// parallel; when several fail, the error of the first in grid order is
/// returned.
pub fn exponent_fit<F>(h: F, radii: &[f64], angles: usize, seed: u64) -> Result<ExponentFit, GreenError>
where
    F: Fn(Complex64) -> Result<f64, GreenError> + Sync,
{
    check_radii(radii)?;
    if angles == 0 {
        return Err(GreenError::Grid("need at least one angle per radius".into()));
    }
    let step = TAU / angles as f64;
    let angle_offset = ChaCha8Rng::seed_from_u64(seed).gen_range(0.0..step);
    let samples: Vec<Result<f64, GreenError>> = (0..radii.len() * angles)
        .into_par_iter()
        .map(|k| {
            let zeta = Complex64::from_polar(radii[k / angles], angle_offset + step * (k % angles) as f64);
            let value = h(zeta)?;
            if value.is_finite() {
                Ok(value)
            } else {
                Err(GreenError::NonFinite { zeta, value })
            }
        })
        .collect();
    let samples: Vec<f64> = samples.into_iter().collect::<Result<_, _>>()?;
    let values: Vec<f64> = samples
        .chunks(angles)
        .map(|chunk| chunk.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let logs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let (slope, intercept, max_abs_residual) = line_fit(&logs, &values);
    Ok(ExponentFit {
        radii: radii.to_vec(),
        angles_per_radius: angles,
        angle_offset,
        values,
        slope,
        intercept,
        max_abs_residual,
    })
}

// --------------------------------------------------------------------------
// Bounds

/// How the `Ω_n` lower bound is evaluated near a pole whose eigenvalue of
/// interest has been moved to `0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "path", rename_all = "snake_case")]
pub enum LowerPath {
    /// The pole is nilpotent with largest block `m`: `m log ρ(M)`.
    Nilpotent { m: usize },
    /// Only the eigenvalues inside `|ζ| = delta` are tracked:
    /// `m0 log ρ⁰(M)`. `ρ⁰` is read off the restriction of `M` to the
    /// enclosed invariant subspace rather than off the contour power sums,
    /// whose absolute accuracy would swamp eigenvalues of size `|ζ|^{n0}`.
    Split { m0: usize, delta: f64 },
}

/// Largest root modulus without merging close roots. Near the pole the
/// roots are genuinely small and close together (`ζ · e^{2πik/n}`), and
/// clustering would collapse them onto a spurious multiple root.
fn max_root_modulus(p: &Polynomial) -> Result<f64, GreenError> {
    if p.degree() == 0 {
        return Ok(0.0);
    }
    Ok(roots(p, crate::ROOT_TOL)?.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Lower bound for `g_{Ω_n}(V, M)`. A vanishing spectral radius gives `-∞`.
pub fn green_lower_omega(path: &LowerPath, m: &ComplexMatrix) -> Result<f64, GreenError> {
    match *path {
        LowerPath::Nilpotent { m: order } => Ok(order as f64 * max_root_modulus(&char_poly(m))?.ln()),
        LowerPath::Split { m0, delta } => {
            let bd = block_diagonalize(m, c(0.0), delta)?;
            Ok(m0 as f64 * max_root_modulus(&char_poly(&bd.m0))?.ln())
        }
    }
}

/// Points checked on the unit circle by [`lempert_upper_disc`].
pub const DISC_CHECK_POINTS: usize = 64;

/// `log |ζ|`, an upper bound for `g_{Ω_n}(V, V + ζX)` through the disc
/// `w ↦ V + wX`.
///
/// The disc must map the whole unit disc into `Ω_n`. Since `log ρ` is
/// subharmonic along it, this is checked as `ρ(V + wX) <= 1` on the unit
/// circle (within the boundary band).
pub fn lempert_upper_disc(v: &ComplexMatrix, x: &ComplexMatrix, zeta: Complex64) -> Result<f64, GreenError> {
    if zeta.norm() >= 1.0 {
        return Err(GreenError::NotInDisc { modulus: zeta.norm() });
    }
    let checks: Vec<Result<(), GreenError>> = (0..DISC_CHECK_POINTS)
        .into_par_iter()
        .map(|k| {
            let w = Complex64::from_polar(1.0, TAU * k as f64 / DISC_CHECK_POINTS as f64);
            let rho = spectral_radius(&(v + &x.scale(w)))?;
            if rho > 1.0 + BOUNDARY_TOL {
                return Err(GreenError::DiscLeaves { w, rho });
            }
            Ok(())
        })
        .collect();
    checks.into_iter().collect::<Result<(), _>>()?;
    Ok(zeta.norm().ln())
}

/// `(log(‖z - p‖/R), log(‖z - p‖/r))`, the Green functions of the outer and
/// inner balls around `p`, which bracket `g_{G_n}(p, z)`.
pub fn green_squeeze_gn(z: &GPoint, pole: &GPoint, radii: &BallRadii) -> Result<(f64, f64), GreenError> {
    squeeze_from_distance(z.distance(pole), radii)
}

fn squeeze_from_distance(distance: f64, radii: &BallRadii) -> Result<(f64, f64), GreenError> {
    if distance >= radii.certified_r {
        return Err(GreenError::OutsideInnerBall {
            distance,
            r: radii.certified_r,
        });
    }
    Ok(((distance / radii.big_r).ln(), (distance / radii.certified_r).ln()))
}

/// Bounds attached to one pole/point pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GreenBounds {
    /// Lower bound for `g_{Ω_n}`.
    pub lower: f64,
    /// Disc upper bound for `g_{Ω_n}`.
    pub upper: f64,
    /// Bracket for `g_{G_n}` at the σ-images, which never exceeds `g_{Ω_n}`.
    pub squeeze: (f64, f64),
}

impl GreenBounds {
    /// `lower <= upper` and `squeeze.0 <= upper`, up to `slack`.
    pub fn consistent(&self, slack: f64) -> bool {
        let ok = |a: f64, b: f64| !(a.is_finite() && b.is_finite()) || a <= b + slack;
        ok(self.lower, self.upper) && ok(self.squeeze.0, self.upper) && ok(self.squeeze.0, self.squeeze.1)
    }
}

// --------------------------------------------------------------------------
// Lowest orders of σ_i(V + εA)

/// Default `ε` grid for the degree fits.
pub fn degree_eps() -> Vec<f64> {
    (2..=6).map(|k| 10f64.powi(-k)).collect()
}

/// Slope and residual of `log |σ_i(V + εA)|` against `log ε`, per `i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeFit {
    pub slopes: Vec<f64>,
    pub residuals: Vec<f64>,
}

pub fn degree_fit(v: &ComplexMatrix, a: &ComplexMatrix, eps: &[f64]) -> DegreeFit {
    let pencil = sigma_pencil(v, a).cleaned(1e-10);
    let logs: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let (slopes, residuals) = (1..=v.n())
        .map(|i| {
            let y: Vec<f64> = eps.iter().map(|&e| pencil.eval(i, c(e)).norm().ln()).collect();
            if y.iter().any(|x| !x.is_finite()) {
                return (f64::NAN, f64::INFINITY);
            }
            let (slope, _, res) = line_fit(&logs, &y);
            (slope, res)
        })
        .unzip();
    DegreeFit { slopes, residuals }
}

/// Outcome of repeated degree fits with random unit-norm directions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeTrials {
    pub d: Vec<usize>,
    pub estdi: bool,
    pub accepted: usize,
    /// Draws discarded because some fit bent away from a straight line.
    pub redrawn: usize,
    /// Accepted draws whose slopes all lie within the tolerance of `d`.
    pub within: usize,
    pub fraction: f64,
    /// Largest `|slope - d_i|` over accepted draws.
    pub worst: f64,
}

/// Residual above which a draw counts as non-generic.
pub const DEGREE_RESIDUAL_LIMIT: f64 = 0.05;

pub fn random_unit_matrix(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let a = ComplexMatrix::from_fn(n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    a.scale(c(1.0 / a.frobenius_norm()))
}

/// Fits `trials` generic directions for a nilpotent Jordan `V`, re-drawing
/// non-generic ones (at most `10 · trials` draws in total).
pub fn lemma_degree_trials(v: &ComplexMatrix, trials: usize, seed: u64, tol: f64) -> Result<DegreeTrials, GreenError> {
    let s = f0_and_d(v)?;
    let eps = degree_eps();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = 10 * trials;
    let dirs: Vec<ComplexMatrix> = (0..budget).map(|_| random_unit_matrix(&mut rng, v.n())).collect();
    let fits: Vec<DegreeFit> = dirs.par_iter().map(|a| degree_fit(v, a, &eps)).collect();
    let (mut accepted, mut redrawn, mut within, mut worst) = (0, 0, 0, 0.0f64);
    for fit in &fits {
        if accepted == trials {
            break;
        }
        if fit.residuals.iter().any(|&r| r.is_nan() || r > DEGREE_RESIDUAL_LIMIT) {
            redrawn += 1;
            continue;
        }
        accepted += 1;
        let dev = fit
            .slopes
            .iter()
            .zip(&s.d)
            .map(|(sl, &d)| (sl - d as f64).abs())
            .fold(0.0, f64::max);
        worst = worst.max(dev);
        if dev <= tol {
            within += 1;
        }
    }
    if accepted < trials {
        return Err(GreenError::TooFewGeneric { accepted, drawn: budget });
    }
    Ok(DegreeTrials {
        d: s.d.clone(),
        estdi: s.estdi,
        accepted,
        redrawn,
        within,
        fraction: within as f64 / accepted as f64,
        worst,
    })
}

// --------------------------------------------------------------------------
// Pole report

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub radii: Vec<f64>,
    pub angles: usize,
    pub seed: u64,
    /// Šilov samples for the ball radii around `σ(pole)`.
    pub ball_samples: usize,
    pub cluster_radius: f64,
    pub rank_tol: f64,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            radii: default_radii(),
            angles: DEFAULT_ANGLES,
            seed: 0,
            ball_samples: 2000,
            cluster_radius: CLUSTER_RADIUS,
            rank_tol: RANK_TOL,
        }
    }
}

/// One fitted series of the report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesFit {
    pub name: String,
    /// How the perturbation direction was built.
    pub construction: String,
    pub expected_slope: f64,
    pub fit: ExponentFit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem2Report {
    pub n: usize,
    pub profile: JordanProfile,
    pub cyclic: bool,
    pub status: String,
    /// The eigenvalue `λ0` carrying the pole.
    #[serde(with = "crate::pairs::single")]
    pub lambda0: Complex64,
    pub n_lambda: usize,
    pub m_lambda: usize,
    /// `n(λ0) - m(λ0)`.
    pub gap: usize,
    pub block_sizes: Vec<usize>,
    /// Whether `mobius(V, λ0)` has the same blocks at `0` that `V` has at
    /// `λ0` (trivially true for `λ0 = 0`).
    pub shift_preserves_blocks: bool,
    /// Distance between the Möbius image of the Jordan model, brought back
    /// to Jordan form on the `λ0` part, and `diag(V0, W1)`.
    pub model_residual: f64,
    pub lower_path: LowerPath,
    pub ball: BallRadii,
    /// Exponent of the `Ω_n` lower bound along the roots-of-unity direction.
    pub slope_lower_omega: f64,
    /// Exponent of the `G_n` squeeze along the same direction.
    pub slope_g: f64,
    pub series: Vec<SeriesFit>,
    /// Largest `|lower - upper|` along the `E_{m,1}` direction.
    pub pinch: f64,
    /// Whether every sampled `GreenBounds` was ordered.
    pub bounds_consistent: bool,
    pub gap_x: Option<GapX>,
    pub config: ReportConfig,
}

impl Theorem2Report {
    pub fn series(&self, name: &str) -> Option<&SeriesFit> {
        self.series.iter().find(|s| s.name == name)
    }

    /// `series,radius,log_radius,value,fitted` with one row per radius.
    pub fn samples_csv(&self) -> String {
        let mut out = String::from("series,radius,log_radius,value,fitted\n");
        for s in &self.series {
            for [r, lr, v, f] in s.fit.rows() {
                out.push_str(&format!("{},{r:e},{lr},{v},{f}\n", s.name));
            }
        }
        out
    }
}

/// `‖σ(diag(B, W1)) - σ(diag(V0, W1))‖` for nilpotent `V0` of the size of
/// `B`, where `p1` is the characteristic polynomial of `W1`.
///
/// Both characteristic polynomials share the factor `p1`, so the
/// difference is `(P_B - t^{n0}) p1`; forming it directly avoids the
/// cancellation of subtracting two order-one coefficient vectors.
fn sigma_offset(b: &ComplexMatrix, p1: &Polynomial) -> f64 {
    let mut head = char_poly(b).coeffs().to_vec();
    head.pop();
    let tail = p1.coeffs();
    let mut prod = vec![c(0.0); head.len() + tail.len()];
    for (i, a) in head.iter().enumerate() {
        for (j, q) in tail.iter().enumerate() {
            prod[i + j] += a * q;
        }
    }
    prod.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

struct PoleModel {
    v0: ComplexMatrix,
    w1: ComplexMatrix,
    p1: Polynomial,
    residual: f64,
}

/// Jordan model of `V` with the `λ0` blocks first, moved to `0` by the
/// Möbius map and returned to Jordan form on that part.
fn pole_model(profile: &JordanProfile, idx: usize) -> Result<PoleModel, GreenError> {
    let rec = &profile.eigenvalues[idx];
    let lambda0 = rec.lambda;
    let mut spec: Vec<(Complex64, usize)> = rec.block_sizes.iter().map(|&s| (lambda0, s)).collect();
    for (k, other) in profile.eigenvalues.iter().enumerate() {
        if k != idx {
            spec.extend(other.block_sizes.iter().map(|&s| (other.lambda, s)));
        }
    }
    let j = jordan_build(&spec)?;
    let n0 = rec.alg_mult;
    let zero_spec: Vec<(Complex64, usize)> = rec.block_sizes.iter().map(|&s| (c(0.0), s)).collect();
    let v0 = jordan_build(&zero_spec)?;
    let (w, residual) = if lambda0 == c(0.0) {
        (j, 0.0)
    } else {
        let w = mobius(&j, lambda0)?;
        let h = w.principal_block(0, n0);
        let mut bases = Vec::new();
        let mut off = 0;
        for &s in &rec.block_sizes {
            bases.push(chain_basis(&h.principal_block(off, s))?);
            off += s;
        }
        let s = ComplexMatrix::block_diag(&bases.iter().collect::<Vec<_>>());
        let back = &(&s.inverse()? * &h) * &s;
        let residual = back.max_abs_diff(&v0).max(w.offdiag_norm(n0));
        (w, residual)
    };
    let n = profile.n;
    let w1 = w.principal_block(n0, n - n0);
    let p1 = if n0 < n { char_poly(&w1) } else { Polynomial::monomial(0) };
    Ok(PoleModel { v0, w1, p1, residual })
}

fn with_tail(b: &ComplexMatrix, w1: &ComplexMatrix) -> ComplexMatrix {
    if w1.n() == 0 {
        b.clone()
    } else {
        ComplexMatrix::block_diag(&[b, w1])
    }
}

/// Exponent report at a derogatory pole.
///
/// The eigenvalue with the largest `n(λ) - m(λ)` is moved to `0`, giving a
/// pole `diag(V0, W1)` with `V0` nilpotent Jordan. Along three directions
/// supported on the `V0` block the report fits:
///
/// * `E_{m,1}`: the `Ω_n` lower bound and the disc upper bound, both with
///   slope 1 and equal up to rounding;
/// * the companion of `t^{n0} - 1`: the `Ω_n` lower bound (slope `m0`) and
///   both sides of the `G_n` squeeze (slope `n0`);
/// * a companion with vanishing `σ_1..σ_{m0}`: `‖Δσ‖` with slope `m0 + 1`.
///
/// For a cyclic input the largest eigenvalue cluster is used instead and the
/// two exponents coincide.
pub fn theorem2_report(v: &ComplexMatrix, config: &ReportConfig) -> Result<Theorem2Report, GreenError> {
    let opts = JordanOptions {
        cluster_radius: config.cluster_radius,
        rank_tol: config.rank_tol,
    };
    let profile = jordan_profile(v, &opts)?;
    let n = profile.n;
    let key = |k: usize| {
        let e = &profile.eigenvalues[k];
        (e.alg_mult - e.nilpotence, e.alg_mult)
    };
    // first index with the largest key
    let idx = (0..profile.eigenvalues.len())
        .rev()
        .max_by_key(|&k| key(k))
        .expect("profile has an eigenvalue");
    let rec = profile.eigenvalues[idx].clone();
    let (lambda0, n0, m0) = (rec.lambda, rec.alg_mult, rec.nilpotence);

    let shift_preserves_blocks = if lambda0 == c(0.0) {
        true
    } else {
        let shifted = jordan_profile(&mobius(v, lambda0)?, &opts)?;
        shifted
            .eigenvalues
            .iter()
            .any(|e| e.lambda == c(0.0) && e.block_sizes == rec.block_sizes)
    };

    let model = pole_model(&profile, idx)?;
    let lower_path = if n0 == n {
        LowerPath::Nilpotent { m: m0 }
    } else {
        let inner = crate::cmatrix::eigenvalues(&model.w1)?
            .iter()
            .map(|z| z.norm())
            .fold(f64::INFINITY, f64::min);
        LowerPath::Split { m0, delta: inner / 2.0 }
    };

    let pole = sigma(&with_tail(&model.v0, &model.w1));
    let ball = ball_radii_at(&pole, config.ball_samples, config.seed)?;
    let (radii, angles, seed) = (&config.radii, config.angles, config.seed);
    let mut series = Vec::new();

    // E_{m,1} direction: pinched bounds
    let e = make_remark_x(&model.v0)?;
    let x_full = with_tail(&e, &ComplexMatrix::zeros(n - n0));
    let w_prime = with_tail(&model.v0, &model.w1);
    let bounds_at = |zeta: Complex64| -> Result<GreenBounds, GreenError> {
        let b = &model.v0 + &e.scale(zeta);
        let m = with_tail(&b, &model.w1);
        let lower = green_lower_omega(&lower_path, &m)?;
        let upper = lempert_upper_disc(&w_prime, &x_full, zeta)?;
        let squeeze = squeeze_from_distance(sigma_offset(&b, &model.p1), &ball)?;
        Ok(GreenBounds { lower, upper, squeeze })
    };
    let all: Vec<Result<GreenBounds, GreenError>> = radii
        .par_iter()
        .flat_map_iter(|&r| {
            (0..angles).map(move |k| Complex64::from_polar(r, TAU * k as f64 / angles as f64))
        })
        .map(bounds_at)
        .collect();
    let all: Vec<GreenBounds> = all.into_iter().collect::<Result<_, _>>()?;
    let pinch = all.iter().map(|b| (b.lower - b.upper).abs()).fold(0.0, f64::max);
    let bounds_consistent = all.iter().all(|b| b.consistent(1e-9));
    let remark = "E_{m,1}: unit entry at (m0, 1) of the pole block".to_string();
    series.push(SeriesFit {
        name: "remark_lower_omega".into(),
        construction: remark.clone(),
        expected_slope: 1.0,
        fit: exponent_fit(|z| Ok(bounds_at(z)?.lower), radii, angles, seed)?,
    });
    series.push(SeriesFit {
        name: "remark_upper_disc".into(),
        construction: remark,
        expected_slope: 1.0,
        fit: exponent_fit(|z| lempert_upper_disc(&w_prime, &x_full, z), radii, angles, seed)?,
    });

    // roots-of-unity direction
    let xr = make_roots_of_unity_x(n0);
    let unity = format!("companion of t^{n0} - 1 on the pole block");
    let rou_lower = exponent_fit(
        |z| green_lower_omega(&lower_path, &with_tail(&xr.scale(z), &model.w1)),
        radii,
        angles,
        seed,
    )?;
    let squeeze = |z: Complex64| squeeze_from_distance(sigma_offset(&xr.scale(z), &model.p1), &ball);
    let g_lower = exponent_fit(|z| Ok(squeeze(z)?.0), radii, angles, seed)?;
    let g_upper = exponent_fit(|z| Ok(squeeze(z)?.1), radii, angles, seed)?;
    let slope_lower_omega = rou_lower.slope;
    let slope_g = g_upper.slope;
    series.push(SeriesFit {
        name: "unity_lower_omega".into(),
        construction: unity.clone(),
        expected_slope: m0 as f64,
        fit: rou_lower,
    });
    series.push(SeriesFit {
        name: "unity_squeeze_lower".into(),
        construction: unity.clone(),
        expected_slope: n0 as f64,
        fit: g_lower,
    });
    series.push(SeriesFit {
        name: "unity_squeeze_upper".into(),
        construction: unity,
        expected_slope: n0 as f64,
        fit: g_upper,
    });

    // gap direction, only meaningful when m0 < n0
    let gap_x = if m0 < n0 {
        let g = make_gap_x(n0, m0, seed)?;
        let fit = exponent_fit(|z| Ok(sigma_offset(&g.matrix.scale(z), &model.p1).ln()), radii, angles, seed)?;
        series.push(SeriesFit {
            name: "gap_sigma_offset".into(),
            construction: format!("companion with sigma_1..sigma_{m0} = 0 and simple nonzero roots"),
            expected_slope: (m0 + 1) as f64,
            fit,
        });
        Some(g)
    } else {
        None
    };

    let cyclic = profile.cyclic;
    let status = if cyclic {
        "cyclic: exponents coincide".to_string()
    } else {
        format!("derogatory: n - m = {} at the pole eigenvalue", n0 - m0)
    };
    Ok(Theorem2Report {
        n,
        cyclic,
        status,
        lambda0,
        n_lambda: n0,
        m_lambda: m0,
        gap: n0 - m0,
        block_sizes: rec.block_sizes.clone(),
        shift_preserves_blocks,
        model_residual: model.residual,
        lower_path,
        ball,
        slope_lower_omega,
        slope_g,
        series,
        pinch,
        bounds_consistent,
        gap_x,
        config: config.clone(),
        profile,
    })
}
