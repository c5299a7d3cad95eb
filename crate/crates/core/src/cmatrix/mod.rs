//! Dense complex matrices at small dimension.
//!
//! Storage is row-major. Every norm is the Frobenius norm, and numerical
//! rank is read off a completely pivoted elimination against a threshold
//! relative to that norm.

mod jordan;
mod spectrum;

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cpoly::PolyError;

pub use jordan::{
    chain_basis, f0_and_d, jordan_build, jordan_profile, parse_block_spec, EigenRecord, JordanOptions,
    JordanProfile, NilpotentStructure,
};
pub use spectrum::{char_poly, eigenvalues, mobius, sigma_pencil, spectral_radius, SigmaPencil};

/// Relative threshold for numerical rank.
pub const RANK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MatrixError {
    #[error("matrix dimension must be at least 1")]
    Empty,
    #[error("expected {expected} entries, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is numerically singular in {context} (pivot {pivot:e})")]
    Singular { context: &'static str, pivot: f64 },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("eigenvalue clusters {a} and {b} are only {gap:e} apart (need > {required:e})")]
    ClusterGap {
        a: String,
        b: String,
        gap: f64,
        required: f64,
    },
    #[error("ranks of powers of M - ({lambda})I never reach n - {alg_mult}")]
    RankMismatch { lambda: String, alg_mult: usize },
    #[error("not a nilpotent Jordan matrix: {0}")]
    NotNilpotentJordan(String),
    #[error("bad block spec: {0}")]
    BlockSpec(String),
    #[error("Möbius map needs |λ0| < 1, got {modulus}")]
    MobiusPole { modulus: f64 },
}

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix", into = "RawMatrix")]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct RawMatrix {
    n: usize,
    #[serde(with = "crate::pairs")]
    entries: Vec<Complex64>,
}

impl TryFrom<RawMatrix> for ComplexMatrix {
    type Error = MatrixError;

    fn try_from(raw: RawMatrix) -> Result<Self, MatrixError> {
        ComplexMatrix::from_row_major(raw.n, raw.entries)
    }
}

impl From<ComplexMatrix> for RawMatrix {
    fn from(m: ComplexMatrix) -> Self {
        RawMatrix {
            n: m.n,
            entries: m.data,
        }
    }
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        ComplexMatrix {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { n, data }
    }

    pub fn from_row_major(n: usize, entries: Vec<Complex64>) -> Result<Self, MatrixError> {
        if n == 0 {
            return Err(MatrixError::Empty);
        }
        if entries.len() != n * n {
            return Err(MatrixError::Shape {
                expected: n * n,
                got: entries.len(),
            });
        }
        if let Some(k) = entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(MatrixError::NonFinite { row: k / n, col: k % n });
        }
        Ok(ComplexMatrix { n, data: entries })
    }

    /// Real matrix from rows; panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "rows must form a square matrix");
        Self::from_fn(n, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        Self::from_fn(values.len(), |i, j| if i == j { values[i] } else { ZERO })
    }

    /// The matrix unit `E_{row,col}` (zero-based indices).
    pub fn unit(n: usize, row: usize, col: usize) -> Self {
        let mut m = Self::zeros(n);
        m[(row, col)] = ONE;
        m
    }

    /// Companion matrix of a monic polynomial given lowest degree first:
    /// ones on the subdiagonal, `-a_j` in the last column.
    pub fn companion(coeffs: &[Complex64]) -> Self {
        let n = coeffs.len() - 1;
        let mut m = Self::zeros(n);
        for i in 1..n {
            m[(i, i - 1)] = ONE;
        }
        for i in 0..n {
            m[(i, n - 1)] = -coeffs[i] / coeffs[n];
        }
        m
    }

    pub fn block_diag(blocks: &[&ComplexMatrix]) -> Self {
        let n = blocks.iter().map(|b| b.n).sum();
        let mut m = Self::zeros(n);
        let mut off = 0;
        for b in blocks {
            for i in 0..b.n {
                for j in 0..b.n {
                    m[(off + i, off + j)] = b[(i, j)];
                }
            }
            off += b.n;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    /// Principal square block starting at `start`.
    pub fn principal_block(&self, start: usize, size: usize) -> Self {
        Self::from_fn(size, |i, j| self[(start + i, start + j)])
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn from_columns(cols: &[Vec<Complex64>]) -> Self {
        let n = cols.len();
        Self::from_fn(n, |i, j| cols[j][i])
    }

    pub fn mat_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::identity(self.n);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Whether every entry outside the two diagonal blocks of sizes `split`
    /// and `n - split` is exactly zero.
    pub fn is_block_diagonal(&self, split: usize) -> bool {
        self.offdiag_norm(split) == 0.0
    }

    /// Frobenius norm of the two off-diagonal blocks for the split at `split`.
    pub fn offdiag_norm(&self, split: usize) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if (i < split) != (j < split) {
                    s += self[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    }

    /// Numerical rank by Gaussian elimination with complete pivoting; pivots
    /// at or below `rel_tol·‖M‖` count as zero.
    pub fn rank(&self, rel_tol: f64) -> usize {
        self.rank_above(rel_tol * self.frobenius_norm())
    }

    /// Numerical rank with an absolute pivot threshold.
    pub fn rank_above(&self, thresh: f64) -> usize {
        let n = self.n;
        let mut a = self.data.clone();
        for k in 0..n {
            let (mut pi, mut pj, mut best) = (k, k, 0.0);
            for i in k..n {
                for j in k..n {
                    let v = a[i * n + j].norm();
                    if v > best {
                        (pi, pj, best) = (i, j, v);
                    }
                }
            }
            if best <= thresh || best == 0.0 {
                return k;
            }
            for j in 0..n {
                a.swap(k * n + j, pi * n + j);
            }
            for i in 0..n {
                a.swap(i * n + k, i * n + pj);
            }
            let pivot = a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                if f == ZERO {
                    continue;
                }
                for j in k..n {
                    let t = a[k * n + j];
                    a[i * n + j] -= f * t;
                }
            }
        }
        n
    }

    fn lu(&self, context: &'static str) -> Result<Lu, MatrixError> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = self.frobenius_norm().max(f64::MIN_POSITIVE);
        for k in 0..n {
            let p = (k..n)
                .max_by(|&x, &y| a[x * n + k].norm().total_cmp(&a[y * n + k].norm()))
                .unwrap_or(k);
            let pivot = a[p * n + k].norm();
            if pivot <= 1e-14 * scale {
                return Err(MatrixError::Singular { context, pivot });
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let piv = a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] / piv;
                a[i * n + k] = f;
                for j in k + 1..n {
                    let t = a[k * n + j];
                    a[i * n + j] -= f * t;
                }
            }
        }
        Ok(Lu { n, a, perm })
    }

    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>, MatrixError> {
        Ok(self.lu("solve")?.solve(b))
    }

    pub fn inverse(&self) -> Result<ComplexMatrix, MatrixError> {
        self.inverse_in("inverse")
    }

    pub(crate) fn inverse_in(&self, context: &'static str) -> Result<ComplexMatrix, MatrixError> {
        let lu = self.lu(context)?;
        let cols: Vec<Vec<Complex64>> = (0..self.n)
            .map(|j| {
                let mut e = vec![ZERO; self.n];
                e[j] = ONE;
                lu.solve(&e)
            })
            .collect();
        Ok(Self::from_columns(&cols))
    }
}

struct Lu {
    n: usize,
    a: Vec<Complex64>,
    perm: Vec<usize>,
}

impl Lu {
    fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let t = self.a[i * n + j] * x[j];
                x[i] -= t;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let t = self.a[i * n + j] * x[j];
                x[i] -= t;
            }
            x[i] /= self.a[i * n + i];
        }
        x
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let n = self.n;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn json_round_trip() {
        let m = ComplexMatrix::from_fn(2, |i, j| c(i as f64, j as f64));
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"n":2,"entries":[[0.0,0.0],[0.0,1.0],[1.0,0.0],[1.0,1.0]]}"#);
        let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<ComplexMatrix>(r#"{"n":2,"entries":[[0,0]]}"#).is_err());
        assert!(serde_json::from_str::<ComplexMatrix>(r#"{"n":0,"entries":[]}"#).is_err());
    }

    #[test]
    fn inverse_of_small_matrix() {
        let m = ComplexMatrix::from_fn(3, |i, j| c((i + 2 * j) as f64, if i == j { 3.0 } else { 0.5 }));
        let inv = m.inverse().unwrap();
        assert!((&m * &inv).max_abs_diff(&ComplexMatrix::identity(3)) < 1e-13);
        let singular = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(matches!(singular.inverse(), Err(MatrixError::Singular { .. })));
    }

    #[test]
    fn rank_of_nilpotent_powers() {
        // full 3x3 Jordan block: ranks 3 -> 2 -> 1 -> 0
        let mut j = ComplexMatrix::zeros(3);
        j[(0, 1)] = ONE;
        j[(1, 2)] = ONE;
        assert_eq!(j.rank(RANK_TOL), 2);
        assert_eq!(j.pow(2).rank(RANK_TOL), 1);
        assert_eq!(j.pow(3).rank(RANK_TOL), 0);
        assert_eq!(ComplexMatrix::identity(4).rank(RANK_TOL), 4);
    }

    #[test]
    fn offdiag_norm_splits_blocks() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 3.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 4.0, 2.0]]);
        assert!((m.offdiag_norm(2) - 4.0).abs() < 1e-15);
        assert!(!m.is_block_diagonal(2));
        assert!(ComplexMatrix::identity(3).is_block_diagonal(1));
    }

    #[test]
    fn companion_has_last_column_coefficients() {
        // t^2 - 3t + 2
        let m = ComplexMatrix::companion(&[c(2.0, 0.0), c(-3.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(m, ComplexMatrix::from_real_rows(&[&[0.0, -2.0], &[1.0, 3.0]]));
    }
}
