//! Bounds for invariant metrics of `G_n` at the origin in the direction
//! `e_{n-1}`.
//!
//! A lower bound comes from the power sum `(λ_1^l + … + λ_n^l)/n` with
//! `l = (n-1)²`, whose leading coefficient in `z_{n-1}` has modulus
//! `(n-1)/n`. An upper bound comes from boundary points of the form
//! `((-1)ⁿt, 0, …, 0, (-1)^{n-1}t, -1)`, which lie on `∂G_n` whenever
//! `p_{n,t}(λ) = λⁿ + (-1)^{n-1}tλ^{n-1} + tλ + (-1)^{n-1}` has all its
//! roots on the unit circle.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cpoly::{roots_on_circle, PolyError, Polynomial};
use crate::domains::{shilov_sample, DomainError, GPoint};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("needs n >= {min}, got {n}")]
    Dimension { n: usize, min: usize },
    #[error("empty range: n_min = {n_min} > n_max = {n_max}")]
    Range { n_min: usize, n_max: usize },
    #[error("t = {t} is outside the admissible set for n = {n} ({interval})")]
    OutsideInterval { n: usize, t: f64, interval: Interval },
    #[error("{what} must be at least {min}, got {got}")]
    TooFew { what: &'static str, min: usize, got: usize },
    #[error("restart {restart}: objective stayed above its initial value for {iterations} iterations")]
    Diverged { restart: usize, iterations: usize },
}

fn need(n: usize, min: usize) -> Result<(), MetricsError> {
    if n < min {
        Err(MetricsError::Dimension { n, min })
    } else {
        Ok(())
    }
}

fn sign(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `((n-1)/n)^{1/(n-1)}`, the lower bound from the `(n-1)`-th order
/// Carathéodory–Reiffen metric.
pub fn gamma_lower(n: usize) -> Result<f64, MetricsError> {
    need(n, 2)?;
    let n = n as f64;
    Ok(((n - 1.0) / n).powf(1.0 / (n - 1.0)))
}

/// `(1 + q^{n-1}) / (q + q^{n-1})` with `q = n/(n-2)`, the upper bound for
/// the Carathéodory–Reiffen metric.
pub fn gamma_upper(n: usize) -> Result<f64, MetricsError> {
    need(n, 3)?;
    let q = n as f64 / (n as f64 - 2.0);
    let qn = q.powi(n as i32 - 1);
    Ok((1.0 + qn) / (q + qn))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricBoundsRow {
    pub n: usize,
    pub lower: f64,
    pub upper: f64,
    /// `upper < lower`: the first-order metric is strictly below the
    /// higher-order one.
    pub strict_gap: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

pub fn bounds_table(n_min: usize, n_max: usize) -> Result<Vec<MetricBoundsRow>, MetricsError> {
    need(n_min, 3)?;
    if n_min > n_max {
        return Err(MetricsError::Range { n_min, n_max });
    }
    (n_min..=n_max)
        .map(|n| {
            let lower = gamma_lower(n)?;
            let upper = gamma_upper(n)?;
            Ok(MetricBoundsRow {
                n,
                lower,
                upper,
                strict_gap: upper < lower,
                note: (n == 3).then(|| "n = 3 needs a separate argument: these two bounds do not separate".into()),
            })
        })
        .collect()
}

// --------------------------------------------------------------------------
// Unit-circle lemma for p_{n,t}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, t: f64) -> bool {
        let slack = 1e-12 * (1.0 + self.lo.abs().max(self.hi.abs()));
        t >= self.lo - slack && t <= self.hi + slack
    }

    /// `count` equispaced points including both endpoints.
    pub fn grid(&self, count: usize) -> Vec<f64> {
        if count == 1 {
            return vec![0.5 * (self.lo + self.hi)];
        }
        (0..count)
            .map(|k| self.lo + (self.hi - self.lo) * k as f64 / (count - 1) as f64)
            .collect()
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// `{t : (n-2)|1 + (-1)ⁿt| <= 2}`, the interval of radius `2/(n-2)` about
/// `(-1)^{n-1}` on which `p_{n,t}` has all roots on the unit circle.
pub fn lalo_interval(n: usize) -> Result<Interval, MetricsError> {
    need(n, 3)?;
    let c = sign(n - 1);
    let r = 2.0 / (n as f64 - 2.0);
    Ok(Interval { lo: c - r, hi: c + r })
}

/// The reflection `-I_n`, centred at `(-1)ⁿ`. For even `n` it is also
/// admissible because `p_{n,-t}(λ) = p_{n,t}(-λ)`.
pub fn lalo_interval_mirrored(n: usize) -> Result<Interval, MetricsError> {
    let i = lalo_interval(n)?;
    Ok(Interval { lo: -i.hi, hi: -i.lo })
}

/// `2 >= (n-2)|1 + (-1)ⁿt|`, with a `1e-12` allowance so that interval
/// endpoints computed in floating point pass.
pub fn lakatos_condition(n: usize, t: f64) -> bool {
    n >= 3 && (n as f64 - 2.0) * (1.0 + sign(n) * t).abs() <= 2.0 + 1e-12
}

/// Whether the boundary-point family is guaranteed on `∂G_n` at `t`.
pub fn admissible(n: usize, t: f64) -> bool {
    let Ok(i) = lalo_interval(n) else { return false };
    i.contains(t) || (n % 2 == 0 && i.contains(-t))
}

/// `λⁿ + (-1)^{n-1}tλ^{n-1} + tλ + (-1)^{n-1}`.
pub fn p_nt(n: usize, t: f64) -> Polynomial {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[0] += sign(n - 1);
    coeffs[1] += t;
    coeffs[n - 1] += sign(n - 1) * t;
    coeffs[n] = Complex64::new(1.0, 0.0);
    Polynomial::new(coeffs).expect("monic")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LaloCheck {
    pub n: usize,
    pub t: f64,
    pub condition: bool,
    /// `|p_{n,t}(-1)|`.
    pub p_at_minus_one: f64,
    /// `p_{n,t}(λ) / (λ + 1)`.
    pub q: Polynomial,
    pub on_circle: bool,
    pub deviation: f64,
}

pub fn lalo_check(n: usize, t: f64, tol: f64) -> Result<LaloCheck, MetricsError> {
    need(n, 3)?;
    let p = p_nt(n, t);
    let one = Complex64::new(1.0, 0.0);
    let (q, _) = p.div_rem(&Polynomial::new(vec![one, one])?);
    let circle = roots_on_circle(&p, tol)?;
    Ok(LaloCheck {
        n,
        t,
        condition: lakatos_condition(n, t),
        p_at_minus_one: p.eval(-one).norm(),
        q,
        on_circle: circle.on_circle,
        deviation: circle.deviation,
    })
}

/// `((-1)ⁿt, 0, …, 0, (-1)^{n-1}t, -1)`, whose polynomial is `p_{n,t}`.
///
/// Accepted for admissible `t`, and otherwise only if the roots of
/// `p_{n,t}` are found on the unit circle within `1e-8`.
pub fn boundary_point_from_t(n: usize, t: f64) -> Result<GPoint, MetricsError> {
    need(n, 3)?;
    if !admissible(n, t) && !lalo_check(n, t, 1e-8)?.on_circle {
        return Err(MetricsError::OutsideInterval {
            n,
            t,
            interval: lalo_interval(n)?,
        });
    }
    Ok(boundary_point_unchecked(n, t))
}

fn boundary_point_unchecked(n: usize, t: f64) -> GPoint {
    let mut z = vec![0.0; n];
    z[0] += sign(n) * t;
    z[n - 2] += sign(n - 1) * t;
    z[n - 1] = -1.0;
    GPoint::from_real(&z)
}

/// `(1, 0, …, 0, (-1)ⁿ, (-1)ⁿ)`, the σ-image of `(λ^{n-1} - 1)(λ - 1)`.
pub fn corner_point(n: usize) -> GPoint {
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    z[n - 2] += sign(n);
    z[n - 1] = sign(n);
    GPoint::from_real(&z)
}

/// `|t^{n-1} + t| / (1 + |t|^{n-1})` without any admissibility check.
pub fn mnt_value(n: usize, t: f64) -> f64 {
    let tn = t.powi(n as i32 - 1);
    (tn + t).abs() / (1.0 + tn.abs())
}

/// Lower bound for the minimax constant from the two boundary points
/// [`corner_point`] and [`boundary_point_from_t`]. `allow_outside` skips
/// the admissibility check.
pub fn mnt_lower(n: usize, t: f64, allow_outside: bool) -> Result<f64, MetricsError> {
    need(n, 3)?;
    if !allow_outside && !admissible(n, t) {
        return Err(MetricsError::OutsideInterval {
            n,
            t,
            interval: lalo_interval(n)?,
        });
    }
    Ok(mnt_value(n, t))
}

/// The optimal parameter `t* = (-1)^{n-1}(1 + 2/(n-2))` and its negative.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TStarReport {
    pub n: usize,
    pub interval: Interval,
    pub mirrored: Interval,
    pub t_star: f64,
    pub t_star_admissible: bool,
    pub minus_t_star_admissible: bool,
    pub mnt_t_star: f64,
    pub mnt_minus_t_star: f64,
    pub gamma_upper: f64,
    /// `|gamma_upper · mnt(t*) - 1|`.
    pub identity_residual: f64,
}

pub fn t_star_report(n: usize) -> Result<TStarReport, MetricsError> {
    need(n, 3)?;
    let t_star = sign(n - 1) * (1.0 + 2.0 / (n as f64 - 2.0));
    let g = gamma_upper(n)?;
    let mnt_t_star = mnt_value(n, t_star);
    Ok(TStarReport {
        n,
        interval: lalo_interval(n)?,
        mirrored: lalo_interval_mirrored(n)?,
        t_star,
        t_star_admissible: admissible(n, t_star),
        minus_t_star_admissible: admissible(n, -t_star),
        mnt_t_star,
        mnt_minus_t_star: mnt_value(n, -t_star),
        gamma_upper: g,
        identity_residual: (g * mnt_t_star - 1.0).abs(),
    })
}

// --------------------------------------------------------------------------
// Sampled minimax

/// `(n-2)`-tuples `α` with `α_1 + 2α_2 + … + (n-2)α_{n-2} = n-1`, in
/// decreasing lexicographic order.
pub fn index_set(n: usize) -> Vec<Vec<u32>> {
    fn fill(k: usize, len: usize, rest: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k > len {
            if rest == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for a in (0..=rest / k).rev() {
            cur.push(a as u32);
            fill(k + 1, len, rest - a * k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n >= 3 {
        fill(1, n - 2, n - 1, &mut Vec::new(), &mut out);
    }
    out
}

/// `inf_a max_z |z_{n-1} + Σ_α a_α z^α|` over sampled boundary points.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimaxProblem {
    pub n: usize,
    pub index_set: Vec<Vec<u32>>,
    pub samples: Vec<GPoint>,
    /// Only the coefficient of `z_1^{n-1}` is free.
    pub restricted: bool,
    base: Vec<Complex64>,
    /// `terms[s][k] = z_s^{α_k}`.
    terms: Vec<Vec<Complex64>>,
}

impl MinimaxProblem {
    pub fn new(n: usize, samples: Vec<GPoint>, restricted: bool) -> Result<Self, MetricsError> {
        need(n, 3)?;
        if let Some(p) = samples.iter().find(|p| p.n != n) {
            return Err(DomainError::Dimension { expected: n, got: p.n }.into());
        }
        let index_set = if restricted {
            let mut a = vec![0; n - 2];
            a[0] = n as u32 - 1;
            vec![a]
        } else {
            index_set(n)
        };
        let base = samples.iter().map(|p| p.z[n - 2]).collect();
        let terms = samples
            .iter()
            .map(|p| {
                index_set
                    .iter()
                    .map(|alpha| {
                        alpha
                            .iter()
                            .zip(&p.z)
                            .fold(Complex64::new(1.0, 0.0), |acc, (&e, z)| acc * z.powu(e))
                    })
                    .collect()
            })
            .collect();
        Ok(MinimaxProblem {
            n,
            index_set,
            samples,
            restricted,
            base,
            terms,
        })
    }

    /// `count` Šilov samples followed by [`corner_point`] and the
    /// boundary points for a 100-point grid of every admissible interval.
    pub fn with_boundary_families(n: usize, count: usize, seed: u64, restricted: bool) -> Result<Self, MetricsError> {
        need(n, 3)?;
        let mut samples = shilov_sample(n, count, seed);
        samples.extend(boundary_families(n)?);
        Self::new(n, samples, restricted)
    }

    fn residual(&self, s: usize, a: &[Complex64]) -> Complex64 {
        self.base[s] + self.terms[s].iter().zip(a).map(|(t, c)| t * c).sum::<Complex64>()
    }

    /// Maximum modulus over the samples and the first sample attaining it.
    fn max_with_index(&self, a: &[Complex64]) -> (f64, usize) {
        (0..self.samples.len())
            .map(|s| (self.residual(s, a).norm(), s))
            .fold((f64::NEG_INFINITY, 0), |best, x| if x.0 > best.0 { x } else { best })
    }

    pub fn objective(&self, a: &[Complex64]) -> f64 {
        self.max_with_index(a).0
    }
}

/// The corner point and the `p_{n,t}` points over the admissible `t`.
pub fn boundary_families(n: usize) -> Result<Vec<GPoint>, MetricsError> {
    let mut out = vec![corner_point(n)];
    let mut intervals = vec![lalo_interval(n)?];
    if n % 2 == 0 {
        intervals.push(lalo_interval_mirrored(n)?);
    }
    for i in intervals {
        out.extend(i.grid(100).into_iter().map(|t| boundary_point_unchecked(n, t)));
    }
    Ok(out)
}

/// Largest [`mnt_value`] over the same `t` grids as [`boundary_families`].
pub fn best_mnt_on_grid(n: usize) -> Result<(f64, f64), MetricsError> {
    let mut ts = lalo_interval(n)?.grid(100);
    if n % 2 == 0 {
        ts.extend(lalo_interval_mirrored(n)?.grid(100));
    }
    Ok(ts
        .into_iter()
        .map(|t| (mnt_value(n, t), t))
        .fold((f64::NEG_INFINITY, 0.0), |b, x| if x.0 > b.0 { x } else { b }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub iterations: usize,
    pub restarts: usize,
    /// `c` in the step size `c/√k`.
    pub step: f64,
    /// Coefficient vectors are projected onto the ball of this radius.
    pub radius: f64,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            iterations: 2000,
            restarts: 10,
            step: 0.5,
            radius: 100.0,
            seed: 0,
        }
    }
}

/// Consecutive iterations above the starting value tolerated before a
/// restart is declared divergent.
pub const DIVERGENCE_WINDOW: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimaxResult {
    pub estimate: f64,
    #[serde(with = "crate::pairs")]
    pub argmin: Vec<Complex64>,
    /// Best-so-far objective of the winning restart, one entry per iteration
    /// (entry 0 is the starting value).
    pub trace: Vec<f64>,
    pub restart: usize,
    pub sample_count: usize,
    /// Objective at `a = 0`, i.e. `max |z_{n-1}|`.
    pub baseline: f64,
    pub restricted: bool,
}

struct Run {
    best: f64,
    argmin: Vec<Complex64>,
    trace: Vec<f64>,
}

fn run_restart(problem: &MinimaxProblem, config: &SolverConfig, restart: usize) -> Result<Run, MetricsError> {
    let dim = problem.index_set.len();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(restart as u64);
    let mut a: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(0.0..TAU)))
        .collect();
    let start = problem.objective(&a);
    let mut best = start;
    let mut argmin = a.clone();
    let mut trace = Vec::with_capacity(config.iterations + 1);
    trace.push(best);
    let mut above = 0;
    for k in 1..=config.iterations {
        let (_, s) = problem.max_with_index(&a);
        let r = problem.residual(s, &a);
        if r.norm() == 0.0 {
            break;
        }
        let unit = r / r.norm();
        let g: Vec<Complex64> = problem.terms[s].iter().map(|t| t.conj() * unit).collect();
        let gn = g.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if gn == 0.0 {
            break;
        }
        let h = config.step / (k as f64).sqrt() / gn;
        for (x, gx) in a.iter_mut().zip(&g) {
            *x -= gx * h;
        }
        let an = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if an > config.radius {
            a.iter_mut().for_each(|x| *x *= config.radius / an);
        }
        let f = problem.objective(&a);
        if f < best {
            best = f;
            argmin.clone_from(&a);
        }
        trace.push(best);
        above = if f > start { above + 1 } else { 0 };
        if above >= DIVERGENCE_WINDOW {
            return Err(MetricsError::Diverged {
                restart,
                iterations: above,
            });
        }
    }
    Ok(Run { best, argmin, trace })
}

/// Projected subgradient descent with step `c/√k` from `restarts` random
/// starts in the unit polydisk.
///
/// The value is a sampled minimax: the maximum runs over the given samples
/// only, and the reported estimate is the best objective value reached.
pub fn minimax_mn(problem: &MinimaxProblem, config: &SolverConfig) -> Result<MinimaxResult, MetricsError> {
    const MIN_SAMPLES: usize = 1000;
    if problem.samples.len() < MIN_SAMPLES {
        return Err(MetricsError::TooFew {
            what: "boundary samples",
            min: MIN_SAMPLES,
            got: problem.samples.len(),
        });
    }
    if config.restarts == 0 {
        return Err(MetricsError::TooFew {
            what: "restarts",
            min: 1,
            got: 0,
        });
    }
    let runs: Vec<Result<Run, MetricsError>> =
        (0..config.restarts).into_par_iter().map(|r| run_restart(problem, config, r)).collect();
    let runs: Vec<Run> = runs.into_iter().collect::<Result<_, _>>()?;
    let (restart, run) = runs
        .into_iter()
        .enumerate()
        .reduce(|b, x| if x.1.best < b.1.best { x } else { b })
        .expect("at least one restart");
    Ok(MinimaxResult {
        estimate: run.best,
        argmin: run.argmin,
        trace: run.trace,
        restart,
        sample_count: problem.samples.len(),
        baseline: problem.objective(&vec![Complex64::new(0.0, 0.0); problem.index_set.len()]),
        restricted: problem.restricted,
    })
}

// --------------------------------------------------------------------------
// Asymptotics

/// `2/(1 + e²)`.
pub fn asymptotic_constant() -> f64 {
    2.0 / (1.0 + 2f64.exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticsRow {
    pub n: usize,
    /// `n (1 - gamma_upper(n))`.
    pub upper_scaled: f64,
    /// `n (1 - gamma_lower(n))`.
    pub lower_scaled: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticsReport {
    pub reference: f64,
    pub threshold: f64,
    pub rows: Vec<AsymptoticsRow>,
    /// Every `upper_scaled` is at least `threshold`.
    pub upper_above_threshold: bool,
    /// `lower_scaled` is strictly decreasing.
    pub lower_decreasing: bool,
}

/// Rows for `10 <= n <= n_max`.
pub fn asymptotics_report(n_max: usize) -> Result<AsymptoticsReport, MetricsError> {
    need(n_max, 10)?;
    let rows: Vec<AsymptoticsRow> = (10..=n_max)
        .map(|n| {
            Ok(AsymptoticsRow {
                n,
                upper_scaled: n as f64 * (1.0 - gamma_upper(n)?),
                lower_scaled: n as f64 * (1.0 - gamma_lower(n)?),
            })
        })
        .collect::<Result<_, MetricsError>>()?;
    let reference = asymptotic_constant();
    let threshold = reference - 0.01;
    Ok(AsymptoticsReport {
        reference,
        threshold,
        upper_above_threshold: rows.iter().all(|r| r.upper_scaled >= threshold),
        lower_decreasing: rows.windows(2).all(|w| w[1].lower_scaled < w[0].lower_scaled),
        rows,
    })
}
