//! Jordan structure: per-eigenvalue multiplicities from clustered roots of
//! the characteristic polynomial, block sizes from ranks of powers of
//! `M - λI`, and the column data `F_0`, `d_i` of nilpotent Jordan matrices.

use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use super::{char_poly, ComplexMatrix, MatrixError, RANK_TOL};
use crate::cpoly::{roots_with_multiplicity, CLUSTER_RADIUS};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JordanOptions {
    /// Base radius for merging roots into one eigenvalue.
    pub cluster_radius: f64,
    /// Relative pivot threshold for numerical rank.
    pub rank_tol: f64,
}

impl Default for JordanOptions {
    fn default() -> Self {
        JordanOptions {
            cluster_radius: CLUSTER_RADIUS,
            rank_tol: RANK_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenRecord {
    #[serde(with = "crate::pairs::single")]
    pub lambda: Complex64,
    /// `n(λ)`.
    pub alg_mult: usize,
    /// `m(λ)`, the size of the largest block.
    pub nilpotence: usize,
    /// Block sizes, non-increasing.
    pub block_sizes: Vec<usize>,
}

/// Column data of a nilpotent Jordan matrix whose block sizes decrease
/// along the diagonal. Indices are one-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NilpotentStructure {
    /// Zero columns `b_1 < … < b_r`, one per block.
    pub f0: Vec<usize>,
    /// `d_i = #(F_0 ∩ [1, i])`, the number of blocks needed to cover `i`
    /// columns. This is the lowest order of `σ_i(V + A)` in the entries of
    /// a generic `A`.
    pub d: Vec<usize>,
    /// `1 + #(F_0 ∩ [n-i+2, n])`. Agrees with `d` only when the blocks are
    /// listed in increasing size; with decreasing sizes it overshoots
    /// (blocks `(2,1)` give `(1,2,2)` against the true `(1,1,2)`).
    pub d_printed: Vec<usize>,
    /// `b_2 - b_1`, the size of the first (largest) block.
    pub m: usize,
    /// Gaps `b_{l+1} - b_l` with `b_{r+1} = n + 1`; these are the block sizes.
    pub block_sizes: Vec<usize>,
    /// Whether `m d_i >= i` for every `i`.
    pub estdi: bool,
}

impl NilpotentStructure {
    fn from_block_sizes(sizes: &[usize]) -> Self {
        let n: usize = sizes.iter().sum();
        let mut f0 = Vec::with_capacity(sizes.len());
        let mut b = 1;
        for s in sizes {
            f0.push(b);
            b += s;
        }
        let d: Vec<usize> = (1..=n).map(|i| f0.iter().filter(|&&j| j <= i).count()).collect();
        let d_printed: Vec<usize> = (1..=n)
            .map(|i| 1 + f0.iter().filter(|&&j| j + i >= n + 2 && j <= n).count())
            .collect();
        let m = sizes[0];
        let estdi = d.iter().enumerate().all(|(k, &di)| m * di > k);
        NilpotentStructure {
            f0,
            d,
            d_printed,
            m,
            block_sizes: sizes.to_vec(),
            estdi,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JordanProfile {
    pub n: usize,
    pub eigenvalues: Vec<EigenRecord>,
    /// `m(λ) = n(λ)` for every eigenvalue.
    pub cyclic: bool,
    /// Present when the only eigenvalue is zero.
    pub nilpotent: Option<NilpotentStructure>,
}

impl JordanProfile {
    /// Eigenvalues with `m(λ) < n(λ)`.
    pub fn derogatory(&self) -> impl Iterator<Item = &EigenRecord> {
        self.eigenvalues.iter().filter(|e| e.nilpotence < e.alg_mult)
    }
}

/// Jordan profile of `m`.
///
/// Eigenvalue centres within `cluster_radius` of the origin are snapped to
/// zero so that nilpotent inputs are recognized as such.
pub fn jordan_profile(m: &ComplexMatrix, opts: &JordanOptions) -> Result<JordanProfile, MatrixError> {
    let n = m.n();
    let mut clusters = roots_with_multiplicity(&char_poly(m), crate::ROOT_TOL, opts.cluster_radius)?;
    for c in clusters.iter_mut() {
        if c.center.norm() <= opts.cluster_radius {
            c.center = Complex64::new(0.0, 0.0);
        }
    }
    let required = 10.0 * opts.cluster_radius;
    for (i, a) in clusters.iter().enumerate() {
        for b in &clusters[i + 1..] {
            let gap = (a.center - b.center).norm();
            if gap <= required {
                return Err(MatrixError::ClusterGap {
                    a: a.center.to_string(),
                    b: b.center.to_string(),
                    gap,
                    required,
                });
            }
        }
    }

    let id = ComplexMatrix::identity(n);
    let mut records = Vec::with_capacity(clusters.len());
    for cl in &clusters {
        let shifted = m - &id.scale(cl.center);
        let k = cl.multiplicity;
        let mut ranks = vec![n];
        let mut power = id.clone();
        // thresholds scale with ‖M - λI‖^j, not with the power itself, which
        // is tiny once the λ-part is annihilated
        let base = shifted.frobenius_norm().max(1.0);
        for j in 1..=k {
            power = &power * &shifted;
            ranks.push(power.rank_above(opts.rank_tol * base.powi(j as i32)));
            if *ranks.last().unwrap() <= n - k {
                break;
            }
        }
        let mismatch = || MatrixError::RankMismatch {
            lambda: cl.center.to_string(),
            alg_mult: k,
        };
        if *ranks.last().unwrap() != n - k {
            return Err(mismatch());
        }
        // blocks of size >= j: r_{j-1} - r_j
        let at_least: Vec<usize> = ranks.windows(2).map(|w| w[0] - w[1]).collect();
        let mut sizes = Vec::new();
        for j in (1..=at_least.len()).rev() {
            let exact = at_least[j - 1] - at_least.get(j).copied().unwrap_or(0);
            sizes.extend(std::iter::repeat_n(j, exact));
        }
        if sizes.iter().sum::<usize>() != k || at_least.windows(2).any(|w| w[0] < w[1]) {
            return Err(mismatch());
        }
        records.push(EigenRecord {
            lambda: cl.center,
            alg_mult: k,
            nilpotence: sizes[0],
            block_sizes: sizes,
        });
    }

    let cyclic = records.iter().all(|r| r.nilpotence == r.alg_mult);
    let nilpotent = match records.as_slice() {
        [only] if only.lambda == Complex64::new(0.0, 0.0) => Some(NilpotentStructure::from_block_sizes(&only.block_sizes)),
        _ => None,
    };
    Ok(JordanProfile {
        n,
        eigenvalues: records,
        cyclic,
        nilpotent,
    })
}

/// Jordan matrix for `(λ, size)` blocks.
///
/// Blocks of one eigenvalue are placed contiguously in decreasing size;
/// eigenvalues keep their order of first appearance.
pub fn jordan_build(spec: &[(Complex64, usize)]) -> Result<ComplexMatrix, MatrixError> {
    if let Some((l, _)) = spec.iter().find(|(_, s)| *s == 0) {
        return Err(MatrixError::BlockSpec(format!("block for {l} has size 0")));
    }
    let n: usize = spec.iter().map(|(_, s)| s).sum();
    if n == 0 {
        return Err(MatrixError::Empty);
    }
    let mut groups: Vec<(Complex64, Vec<usize>)> = Vec::new();
    for &(l, s) in spec {
        match groups.iter_mut().find(|(g, _)| *g == l) {
            Some((_, sizes)) => sizes.push(s),
            None => groups.push((l, vec![s])),
        }
    }
    let mut m = ComplexMatrix::zeros(n);
    let mut off = 0;
    for (l, mut sizes) in groups {
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        for s in sizes {
            for i in 0..s {
                m[(off + i, off + i)] = l;
                if i + 1 < s {
                    m[(off + i, off + i + 1)] = Complex64::new(1.0, 0.0);
                }
            }
            off += s;
        }
    }
    Ok(m)
}

/// Parses `"0:2,0:1;0.8:1"`: `λ:size` entries separated by `,` or `;`.
/// `λ` may be complex, e.g. `0.3-0.1i`.
pub fn parse_block_spec(text: &str) -> Result<Vec<(Complex64, usize)>, MatrixError> {
    let bad = |msg: String| MatrixError::BlockSpec(msg);
    let mut out = Vec::new();
    for entry in text.split([',', ';']) {
        let entry = entry.trim();
        if entry.is_empty() {
            return Err(bad(format!("empty entry in {text:?}")));
        }
        let (l, s) = entry
            .rsplit_once(':')
            .ok_or_else(|| bad(format!("entry {entry:?} is not of the form λ:size")))?;
        let lambda = Complex64::from_str(l.trim()).map_err(|_| bad(format!("cannot parse eigenvalue {l:?}")))?;
        let size: usize = s.trim().parse().map_err(|_| bad(format!("cannot parse block size {s:?}")))?;
        out.push((lambda, size));
    }
    Ok(out)
}

/// `F_0` and `d` of a nilpotent Jordan matrix.
///
/// The input must be exactly zero except for superdiagonal entries in
/// `{0, 1}`, with block sizes non-increasing down the diagonal.
pub fn f0_and_d(v: &ComplexMatrix) -> Result<NilpotentStructure, MatrixError> {
    let n = v.n();
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let x = v[(i, j)];
            let ok = if j == i + 1 { x == zero || x == one } else { x == zero };
            if !ok {
                return Err(MatrixError::NotNilpotentJordan(format!("entry ({}, {}) = {x}", i + 1, j + 1)));
            }
        }
    }
    let f0: Vec<usize> = (1..=n).filter(|&j| j == 1 || v[(j - 2, j - 1)] == zero).collect();
    let mut sizes: Vec<usize> = f0.windows(2).map(|w| w[1] - w[0]).collect();
    sizes.push(n + 1 - f0[f0.len() - 1]);
    if sizes.windows(2).any(|w| w[0] < w[1]) {
        return Err(MatrixError::NotNilpotentJordan(format!("block sizes {sizes:?} are not non-increasing")));
    }
    Ok(NilpotentStructure::from_block_sizes(&sizes))
}

/// Basis `S` with `S^{-1} H S` equal to the single nilpotent Jordan block,
/// for a nilpotent `H` with cyclic vector `e_k`.
///
/// Columns are `f_j = H^{k-j} e_k`, so `H f_j = f_{j-1}` and `H f_1 = 0`.
pub fn chain_basis(h: &ComplexMatrix) -> Result<ComplexMatrix, MatrixError> {
    let k = h.n();
    let mut cols = vec![vec![Complex64::new(0.0, 0.0); k]; k];
    cols[k - 1][k - 1] = Complex64::new(1.0, 0.0);
    for j in (0..k - 1).rev() {
        cols[j] = h.mat_vec(&cols[j + 1]);
    }
    let s = ComplexMatrix::from_columns(&cols);
    let tail: f64 = h.mat_vec(&cols[0]).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if tail > 1e-9 * h.frobenius_norm().max(1.0) || s.rank(RANK_TOL) < k {
        return Err(MatrixError::NotNilpotentJordan("e_k is not a cyclic vector of a nilpotent block".into()));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmatrix::mobius;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn zero_blocks(sizes: &[usize]) -> ComplexMatrix {
        let spec: Vec<_> = sizes.iter().map(|&s| (c(0.0, 0.0), s)).collect();
        jordan_build(&spec).unwrap()
    }

    #[test]
    fn derogatory_nilpotent_profile() {
        let p = jordan_profile(&zero_blocks(&[2, 1]), &JordanOptions::default()).unwrap();
        assert_eq!(p.eigenvalues.len(), 1);
        let e = &p.eigenvalues[0];
        assert_eq!((e.alg_mult, e.nilpotence), (3, 2));
        assert!(!p.cyclic);
        let nil = p.nilpotent.unwrap();
        assert_eq!(nil.f0, vec![1, 3]);
        assert_eq!(nil.d, vec![1, 1, 2]);
        assert_eq!(nil.d_printed, vec![1, 2, 2]);
    }

    #[test]
    fn full_block_and_distinct_diagonal_are_cyclic() {
        let p = jordan_profile(&zero_blocks(&[4]), &JordanOptions::default()).unwrap();
        assert!(p.cyclic);
        assert_eq!(p.eigenvalues[0].nilpotence, 4);
        let d = ComplexMatrix::diagonal(&[c(0.1, 0.0), c(-0.5, 0.2), c(0.7, 0.0)]);
        let p = jordan_profile(&d, &JordanOptions::default()).unwrap();
        assert!(p.cyclic);
        assert!(p.eigenvalues.iter().all(|e| e.alg_mult == 1 && e.nilpotence == 1));
        assert!(p.nilpotent.is_none());
    }

    #[test]
    fn build_places_superdiagonal_ones() {
        let m = zero_blocks(&[1, 2]);
        let mut expected = ComplexMatrix::zeros(3);
        expected[(0, 1)] = c(1.0, 0.0);
        assert_eq!(m, expected);
        assert_eq!(zero_blocks(&[1]), ComplexMatrix::zeros(1));
        assert!(matches!(jordan_build(&[]), Err(MatrixError::Empty)));
    }

    #[test]
    fn build_profile_round_trip_two_eigenvalues() {
        let m = jordan_build(&[(c(0.3, 0.0), 2), (c(-0.2, 0.0), 2)]).unwrap();
        let p = jordan_profile(&m, &JordanOptions::default()).unwrap();
        assert_eq!(p.eigenvalues.len(), 2);
        for e in &p.eigenvalues {
            assert_eq!(e.block_sizes, vec![2]);
        }
    }

    #[test]
    fn f0_examples() {
        let s = f0_and_d(&zero_blocks(&[2, 1])).unwrap();
        assert_eq!((s.f0.clone(), s.d.clone(), s.m), (vec![1, 3], vec![1, 1, 2], 2));
        assert_eq!(s.d_printed, vec![1, 2, 2]);
        assert!(s.estdi);
        let s = f0_and_d(&zero_blocks(&[3])).unwrap();
        assert_eq!((s.f0, s.d, s.m), (vec![1], vec![1, 1, 1], 3));
        let s = f0_and_d(&zero_blocks(&[3, 2, 1])).unwrap();
        assert_eq!(s.f0, vec![1, 4, 6]);
        assert_eq!(s.d, vec![1, 1, 1, 2, 2, 3]);
        assert_eq!(s.d_printed, vec![1, 2, 2, 3, 3, 3]);
        assert_eq!(s.block_sizes, vec![3, 2, 1]);
    }

    #[test]
    fn printed_degree_formula_matches_on_reversed_order() {
        for sizes in [vec![2, 1], vec![3, 2], vec![3, 2, 1], vec![4, 2, 2, 1]] {
            let s = NilpotentStructure::from_block_sizes(&sizes);
            let rev: Vec<usize> = sizes.iter().rev().copied().collect();
            assert_eq!(NilpotentStructure::from_block_sizes(&rev).d_printed, s.d);
        }
    }

    #[test]
    fn f0_rejects_bad_input() {
        let mut m = zero_blocks(&[1, 2]);
        // increasing gaps: blocks (1,2)
        m[(0, 1)] = c(0.0, 0.0);
        m[(1, 2)] = c(1.0, 0.0);
        assert!(matches!(f0_and_d(&m), Err(MatrixError::NotNilpotentJordan(_))));
        assert!(f0_and_d(&ComplexMatrix::identity(2)).is_err());
    }

    #[test]
    fn block_spec_parsing() {
        let spec = parse_block_spec("0:2,0:1;0.8:1").unwrap();
        assert_eq!(spec, vec![(c(0.0, 0.0), 2), (c(0.0, 0.0), 1), (c(0.8, 0.0), 1)]);
        let spec = parse_block_spec(" 0.3-0.1i : 2 ").unwrap();
        assert_eq!(spec, vec![(c(0.3, -0.1), 2)]);
        assert!(parse_block_spec("0:2,,0:1").is_err());
        assert!(parse_block_spec("0-2").is_err());
        assert!(parse_block_spec("x:2").is_err());
    }

    #[test]
    fn chain_basis_conjugates_mobius_image_to_jordan_block() {
        let l0 = c(0.5, 0.2);
        let j = jordan_build(&[(l0, 3)]).unwrap();
        let h = mobius(&j, l0).unwrap();
        let s = chain_basis(&h).unwrap();
        let conj = &(&s.inverse().unwrap() * &h) * &s;
        assert!(conj.max_abs_diff(&zero_blocks(&[3])) < 1e-12);
        assert!(chain_basis(&zero_blocks(&[2, 1])).is_err());
    }

    fn arb_spec() -> impl Strategy<Value = Vec<(Complex64, usize)>> {
        // eigenvalue candidates pairwise at least 0.1 apart
        let grid: Vec<Complex64> = (0..4)
            .flat_map(|i| (0..4).map(move |j| c(-0.6 + 0.4 * i as f64, -0.6 + 0.4 * j as f64)))
            .collect();
        (prop::sample::subsequence(grid, 1..=3), prop::collection::vec(prop::collection::vec(1usize..=3, 1..=2), 3))
            .prop_map(|(eigs, blocks)| {
                let mut spec = Vec::new();
                for (l, sizes) in eigs.into_iter().zip(blocks) {
                    for s in sizes {
                        spec.push((l, s));
                    }
                }
                spec
            })
            .prop_filter("n <= 8", |spec| spec.iter().map(|(_, s)| s).sum::<usize>() <= 8)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn profile_inverts_build(spec in arb_spec()) {
            let m = jordan_build(&spec).unwrap();
            let p = jordan_profile(&m, &JordanOptions::default()).unwrap();
            let total: usize = spec.iter().map(|(_, s)| s).sum();
            prop_assert_eq!(p.n, total);
            for rec in &p.eigenvalues {
                let mut expected: Vec<usize> = spec
                    .iter()
                    .filter(|(l, _)| (l - rec.lambda).norm() < 1e-6)
                    .map(|(_, s)| *s)
                    .collect();
                expected.sort_unstable_by(|a, b| b.cmp(a));
                prop_assert_eq!(&rec.block_sizes, &expected);
                prop_assert_eq!(rec.alg_mult, expected.iter().sum::<usize>());
            }
            prop_assert_eq!(p.eigenvalues.iter().map(|e| e.alg_mult).sum::<usize>(), total);
            prop_assert_eq!(p.cyclic, p.eigenvalues.iter().all(|e| e.block_sizes.len() == 1));
        }

        #[test]
        fn estdi_holds_on_every_nilpotent_profile(sizes in prop::collection::vec(1usize..=4, 1..=4)) {
            let mut sizes = sizes;
            sizes.sort_unstable_by(|a, b| b.cmp(a));
            let s = f0_and_d(&zero_blocks(&sizes)).unwrap();
            prop_assert!(s.estdi);
            prop_assert_eq!(s.m, sizes[0]);
            prop_assert!(s.block_sizes.windows(2).all(|w| w[0] >= w[1]));
        }
    }
}
