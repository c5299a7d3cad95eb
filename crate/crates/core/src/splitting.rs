//! Contour-integral splitting of a spectrum into the eigenvalues inside a
//! circle `|ζ - c| = δ` and the rest.
//!
//! Power sums of the enclosed eigenvalues come from the argument principle,
//! `Σ_k = (1/2πi) ∮ ζ^k P'(ζ)/P(ζ) dζ`; the local factor `P⁰` follows by
//! Newton's identities and `P¹ = P / P⁰` by division. The Riesz projector
//! `π₀ = (1/2πi) ∮ (ζI - M)^{-1} dζ` gives the invariant subspaces used to
//! block-diagonalize `M`. All integrals use the trapezoid rule on the
//! circle, which converges geometrically for integrands analytic near it.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cmatrix::{char_poly, eigenvalues, ComplexMatrix, MatrixError, RANK_TOL};
use crate::cpoly::{newton_convert, NewtonDirection, Polynomial, SymCoeffs};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SplitError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("no admissible gap: nearest eigenvalue distances {inner:e} and {outer:e} from the centre")]
    NoGap { inner: f64, outer: f64 },
    #[error("an eigenvalue lies {distance:e} from the contour of radius {delta}; try delta = {suggestion}")]
    ContourTooClose {
        delta: f64,
        distance: f64,
        suggestion: f64,
    },
    #[error("quadrature did not settle: change {change:e} at {nodes} nodes")]
    NotConverged { nodes: usize, change: f64 },
    #[error("contour encloses {n0} of {n} eigenvalues; the splitting is trivial")]
    Degenerate { n0: usize, n: usize },
    #[error("factor residual {residual:e} exceeds {bound:e}")]
    FactorResidual { residual: f64, bound: f64 },
    #[error("projector is not idempotent: ‖π₀² - π₀‖ = {residual:e}")]
    NotIdempotent { residual: f64 },
    #[error("projector has rank {rank}, expected {n0}")]
    ProjectorRank { rank: usize, n0: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quadrature {
    /// Starting node count.
    pub nodes: usize,
    pub max_nodes: usize,
    /// Doubling stops once successive estimates differ by less than this.
    pub tol: f64,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature {
            nodes: 256,
            max_nodes: 4096,
            tol: 1e-10,
        }
    }
}

fn nodes_on(center: Complex64, delta: f64, count: usize) -> Vec<(Complex64, Complex64)> {
    // (ζ_j, ζ_j - c): the trapezoid weight of (1/2πi)∮f dζ is (ζ_j - c)/N
    (0..count)
        .map(|j| {
            let w = Complex64::from_polar(delta, TAU * j as f64 / count as f64);
            (center + w, w)
        })
        .collect()
}

/// Contour radius separating the eigenvalues nearest `center` from the rest.
///
/// Distances to `center` are sorted and split at the widest gap between
/// consecutive values. `δ` is the geometric mean of the two distances
/// bounding that gap, or half the outer one when the inner eigenvalues sit
/// on the centre itself (within `10·tol`).
pub fn choose_delta(m: &ComplexMatrix, center: Complex64, tol: f64) -> Result<f64, SplitError> {
    let mut dist: Vec<f64> = eigenvalues(m)?.iter().map(|z| (z - center).norm()).collect();
    dist.sort_by(f64::total_cmp);
    let Some((i, gap)) = dist
        .windows(2)
        .map(|w| w[1] - w[0])
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
    else {
        return Err(SplitError::NoGap {
            inner: dist[0],
            outer: f64::INFINITY,
        });
    };
    let (inner, outer) = (dist[i], dist[i + 1]);
    if gap < 10.0 * tol {
        return Err(SplitError::NoGap { inner, outer });
    }
    let delta = if inner >= 10.0 * tol {
        (inner * outer).sqrt()
    } else {
        0.5 * outer
    };
    let distance = dist.iter().map(|d| (d - delta).abs()).fold(f64::INFINITY, f64::min);
    if distance < 1e-3 * delta {
        return Err(SplitError::ContourTooClose {
            delta,
            distance,
            suggestion: 0.5 * (inner + outer),
        });
    }
    Ok(delta)
}

fn closest_root_distance(m: &ComplexMatrix, center: Complex64, delta: f64) -> Result<f64, SplitError> {
    Ok(eigenvalues(m)?
        .iter()
        .map(|z| ((z - center).norm() - delta).abs())
        .fold(f64::INFINITY, f64::min))
}

fn check_contour(m: &ComplexMatrix, center: Complex64, delta: f64) -> Result<(), SplitError> {
    let distance = closest_root_distance(m, center, delta)?;
    if distance < 1e-3 * delta {
        return Err(SplitError::ContourTooClose {
            delta,
            distance,
            suggestion: delta * 0.5,
        });
    }
    Ok(())
}

/// `Σ_0 … Σ_kmax` with a fixed number of trapezoid nodes.
pub fn contour_power_sums(
    m: &ComplexMatrix,
    center: Complex64,
    delta: f64,
    kmax: usize,
    nodes: usize,
) -> Result<Vec<Complex64>, SplitError> {
    check_contour(m, center, delta)?;
    Ok(power_sums_at(&char_poly(m), center, delta, kmax, nodes))
}

fn power_sums_at(p: &Polynomial, center: Complex64, delta: f64, kmax: usize, nodes: usize) -> Vec<Complex64> {
    let terms: Vec<Vec<Complex64>> = nodes_on(center, delta, nodes)
        .par_iter()
        .map(|&(z, w)| {
            let (v, dv) = p.eval_with_derivative(z);
            let mut f = dv / v * w;
            let mut row = Vec::with_capacity(kmax + 1);
            for _ in 0..=kmax {
                row.push(f);
                f *= z;
            }
            row
        })
        .collect();
    // indexed sequential reduction keeps the result independent of threading
    (0..=kmax)
        .map(|k| terms.iter().map(|row| row[k]).sum::<Complex64>() / nodes as f64)
        .collect()
}

/// Power sums with node doubling until successive estimates agree to
/// `quad.tol`. Returns the sums and the node count used.
pub fn contour_power_sums_adaptive(
    m: &ComplexMatrix,
    center: Complex64,
    delta: f64,
    kmax: usize,
    quad: &Quadrature,
) -> Result<(Vec<Complex64>, usize), SplitError> {
    check_contour(m, center, delta)?;
    let p = char_poly(m);
    let mut nodes = quad.nodes;
    let mut prev = power_sums_at(&p, center, delta, kmax, nodes);
    loop {
        let next = power_sums_at(&p, center, delta, kmax, 2 * nodes);
        let change = prev.iter().zip(&next).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        nodes *= 2;
        if change < quad.tol {
            return Ok((next, nodes));
        }
        if nodes >= quad.max_nodes {
            return Err(SplitError::NotConverged { nodes, change });
        }
        prev = next;
    }
}

/// Local factorization `P_M = P⁰ P¹` with `P⁰` carrying the enclosed roots.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitResult {
    #[serde(with = "crate::pairs::single")]
    pub center: Complex64,
    pub delta: f64,
    pub n0: usize,
    pub nodes: usize,
    /// Elementary symmetric functions of the enclosed eigenvalues.
    pub sigma0: SymCoeffs,
    pub p0: Polynomial,
    pub p1: Polynomial,
    /// Largest coefficient of `P⁰P¹ - P_M`.
    pub factor_residual: f64,
}

pub fn local_factor(m: &ComplexMatrix, center: Complex64, delta: f64) -> Result<SplitResult, SplitError> {
    local_factor_with(m, center, delta, &Quadrature::default())
}

pub fn local_factor_with(
    m: &ComplexMatrix,
    center: Complex64,
    delta: f64,
    quad: &Quadrature,
) -> Result<SplitResult, SplitError> {
    let n = m.n();
    let (sums, nodes) = contour_power_sums_adaptive(m, center, delta, n, quad)?;
    let n0 = sums[0].re.round().max(0.0) as usize;
    if n0 == 0 || n0 >= n {
        return Err(SplitError::Degenerate { n0, n });
    }
    let sigma0 = SymCoeffs::new(newton_convert(NewtonDirection::PowerToElementary, &sums[1..], n0));
    let p0 = Polynomial::from_sym(&sigma0);
    let full = char_poly(m);
    let (p1, _) = full.div_rem(&p0);
    let factor_residual = p0.mul(&p1).max_coeff_diff(&full);
    let bound = 1e-8 * (1.0 + full.max_coeff_abs());
    if factor_residual > bound {
        return Err(SplitError::FactorResidual {
            residual: factor_residual,
            bound,
        });
    }
    Ok(SplitResult {
        center,
        delta,
        n0,
        nodes,
        sigma0,
        p0,
        p1,
        factor_residual,
    })
}

/// `P M P^{-1} ≈ diag(M₀, M₁)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockDiag {
    pub p: ComplexMatrix,
    pub m0: ComplexMatrix,
    pub m1: ComplexMatrix,
    /// Riesz projector onto the enclosed spectral subspace.
    pub pi0: ComplexMatrix,
    /// `‖π₀² - π₀‖`.
    pub idempotence: f64,
    /// `‖π₀ π₁‖` with `π₁ = I - π₀`.
    pub cross: f64,
    pub offdiag_residual: f64,
    /// False when `π₀ e_1, …, π₀ e_{n₀}` were degenerate and the basis had to
    /// be picked by pivoting instead of from the leading coordinates.
    pub reference_basis: bool,
}

/// `π₀` with node doubling until the entries settle.
pub fn riesz_projector(
    m: &ComplexMatrix,
    center: Complex64,
    delta: f64,
    quad: &Quadrature,
) -> Result<ComplexMatrix, SplitError> {
    check_contour(m, center, delta)?;
    let at = |count: usize| -> Result<ComplexMatrix, SplitError> {
        let n = m.n();
        let id = ComplexMatrix::identity(n);
        let terms: Vec<ComplexMatrix> = nodes_on(center, delta, count)
            .par_iter()
            .map(|&(z, w)| Ok((&id.scale(z) - m).inverse()?.scale(w)))
            .collect::<Result<_, MatrixError>>()?;
        let mut acc = ComplexMatrix::zeros(n);
        for t in &terms {
            acc = &acc + t;
        }
        Ok(acc.scale(Complex64::new(1.0 / count as f64, 0.0)))
    };
    let mut nodes = quad.nodes;
    let mut prev = at(nodes)?;
    loop {
        let next = at(2 * nodes)?;
        let change = prev.max_abs_diff(&next);
        nodes *= 2;
        if change < quad.tol {
            return Ok(next);
        }
        if nodes >= quad.max_nodes {
            return Err(SplitError::NotConverged { nodes, change });
        }
        prev = next;
    }
}

/// Orthonormal basis of the range of `proj`, preferring the images of the
/// coordinate vectors in `preferred` (Gram–Schmidt in that order). Falls
/// back to pivoted Gram–Schmidt over all columns when those images are
/// numerically dependent.
fn range_basis(proj: &ComplexMatrix, preferred: std::ops::Range<usize>) -> (Vec<Vec<Complex64>>, bool) {
    let rank = preferred.len();
    let cols: Vec<Vec<Complex64>> = (0..proj.n()).map(|j| proj.column(j)).collect();
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(rank);
    let scale = proj.frobenius_norm();
    let mut ok = true;
    for j in preferred {
        match orthogonalize(&cols[j], &basis, scale) {
            Some(q) => basis.push(q),
            None => {
                ok = false;
                break;
            }
        }
    }
    if ok {
        return (basis, true);
    }
    basis.clear();
    while basis.len() < rank {
        let best = cols
            .iter()
            .filter_map(|c| residual(c, &basis))
            .max_by(|a, b| norm(a).total_cmp(&norm(b)))
            .expect("projector has nonempty range");
        let nrm = norm(&best);
        basis.push(best.into_iter().map(|x| x / nrm).collect());
    }
    (basis, false)
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn residual(v: &[Complex64], basis: &[Vec<Complex64>]) -> Option<Vec<Complex64>> {
    let mut r = v.to_vec();
    for q in basis {
        let dot: Complex64 = q.iter().zip(&r).map(|(a, b)| a.conj() * b).sum();
        for (x, y) in r.iter_mut().zip(q) {
            *x -= dot * y;
        }
    }
    (norm(&r) > 0.0).then_some(r)
}

fn orthogonalize(v: &[Complex64], basis: &[Vec<Complex64>], scale: f64) -> Option<Vec<Complex64>> {
    let r = residual(v, basis)?;
    let nrm = norm(&r);
    (nrm > 1e-8 * scale).then(|| r.into_iter().map(|x| x / nrm).collect())
}

/// Block diagonalization through the spectral projectors.
///
/// The columns of `P^{-1}` are orthonormal bases of `range π₀` (from
/// `π₀ e_1, …, π₀ e_{n₀}`) and of `range π₁` (from `π₁ e_{n₀+1}, …`), so a
/// small perturbation of a matrix that is block diagonal in the leading
/// `n₀` coordinates gives `P = I + O(‖A‖)`.
pub fn block_diagonalize(m: &ComplexMatrix, center: Complex64, delta: f64) -> Result<BlockDiag, SplitError> {
    block_diagonalize_with(m, center, delta, &Quadrature::default())
}

pub fn block_diagonalize_with(
    m: &ComplexMatrix,
    center: Complex64,
    delta: f64,
    quad: &Quadrature,
) -> Result<BlockDiag, SplitError> {
    let n = m.n();
    let pi0 = riesz_projector(m, center, delta, quad)?;
    let pi1 = &ComplexMatrix::identity(n) - &pi0;
    let idempotence = (&(&pi0 * &pi0) - &pi0).frobenius_norm();
    if idempotence > 1e-8 {
        return Err(SplitError::NotIdempotent { residual: idempotence });
    }
    let cross = (&pi0 * &pi1).frobenius_norm();
    let n0 = pi0.trace().re.round().max(0.0) as usize;
    if n0 == 0 || n0 >= n {
        return Err(SplitError::Degenerate { n0, n });
    }
    let rank = pi0.rank(RANK_TOL.max(1e-8));
    if rank != n0 {
        return Err(SplitError::ProjectorRank { rank, n0 });
    }
    let (b0, ref0) = range_basis(&pi0, 0..n0);
    let (b1, ref1) = range_basis(&pi1, n0..n);
    let cols: Vec<Vec<Complex64>> = b0.into_iter().chain(b1).collect();
    let s = ComplexMatrix::from_columns(&cols);
    let p = s.inverse()?;
    let conj = &(&p * m) * &s;
    Ok(BlockDiag {
        m0: conj.principal_block(0, n0),
        m1: conj.principal_block(n0, n - n0),
        offdiag_residual: conj.offdiag_norm(n0),
        p,
        pi0,
        idempotence,
        cross,
        reference_basis: ref0 && ref1,
    })
}
