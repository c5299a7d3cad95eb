//! Exact expansion of power sums in elementary symmetric functions.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::PolyError;

/// `p_l` as an integer polynomial in `e_1, …, e_n`. Keys are exponent
/// vectors `(r_1, …, r_n)` standing for `Π e_i^{r_i}`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ElementaryExpansion {
    pub n: usize,
    pub terms: BTreeMap<Vec<u32>, BigInt>,
}

impl ElementaryExpansion {
    pub fn coefficient(&self, exponents: &[u32]) -> BigInt {
        self.terms.get(exponents).cloned().unwrap_or_else(BigInt::zero)
    }
}

fn add_scaled(
    target: &mut BTreeMap<Vec<u32>, BigInt>,
    source: &BTreeMap<Vec<u32>, BigInt>,
    var: usize,
    factor: i64,
    keep: &dyn Fn(&[u32]) -> bool,
) {
    for (mono, coeff) in source {
        let mut m = mono.clone();
        m[var] += 1;
        if !keep(&m) {
            continue;
        }
        let entry = target.entry(m).or_insert_with(BigInt::zero);
        *entry += coeff * factor;
    }
}

/// Newton recursion `p_l = Σ_{i=1}^{l-1} (-1)^{i-1} e_i p_{l-i} + (-1)^{l-1} l e_l`
/// with `e_i = 0` for `i > n`. Monomials rejected by `keep` are dropped as
/// they appear; `keep` must be closed under taking divisors for the
/// surviving coefficients to stay exact.
fn expand(l: usize, n: usize, keep: &dyn Fn(&[u32]) -> bool) -> ElementaryExpansion {
    let mut sums: Vec<BTreeMap<Vec<u32>, BigInt>> = vec![BTreeMap::new()];
    for k in 1..=l {
        let mut pk = BTreeMap::new();
        for i in 1..k.min(n + 1) {
            let sign = if i % 2 == 1 { 1 } else { -1 };
            add_scaled(&mut pk, &sums[k - i], i - 1, sign, keep);
        }
        if k <= n {
            let mut m = vec![0u32; n];
            m[k - 1] = 1;
            if keep(&m) {
                let sign: i64 = if k % 2 == 1 { 1 } else { -1 };
                *pk.entry(m).or_insert_with(BigInt::zero) += BigInt::from(sign * k as i64);
            }
        }
        pk.retain(|_, v| !v.is_zero());
        sums.push(pk);
    }
    ElementaryExpansion {
        n,
        terms: sums.pop().unwrap_or_default(),
    }
}

/// Full symbolic expansion of `p_l` in `e_1, …, e_n`.
pub fn power_sum_in_elementary(l: usize, n: usize) -> ElementaryExpansion {
    expand(l, n, &|_| true)
}

/// Coefficient of `σ_{n-1}^k` in `p_l / n` for `l = k(n-1)`, exactly.
///
/// This is the coefficient of `z_{n-1}^k` in the normalized power sum
/// `(λ_1^l + … + λ_n^l)/n` read as a function on `G_n`; its modulus is
/// `(n-1)/n`.
pub fn waring_coefficient(n: usize, l: usize, k: usize) -> Result<BigRational, PolyError> {
    if n < 2 || k == 0 {
        return Err(PolyError::WaringRange { n, k });
    }
    let expected = k * (n - 1);
    if l != expected {
        return Err(PolyError::WaringIndex { n, l, k, expected });
    }
    let target = n - 2;
    let max_power = k as u32;
    // only divisors of e_{n-1}^k can contribute to that monomial
    let keep = move |m: &[u32]| m.iter().enumerate().all(|(i, &r)| if i == target { r <= max_power } else { r == 0 });
    let expansion = expand(l, n, &keep);
    let mut mono = vec![0u32; n];
    mono[target] = max_power;
    Ok(BigRational::new(expansion.coefficient(&mono), BigInt::from(n)))
}
