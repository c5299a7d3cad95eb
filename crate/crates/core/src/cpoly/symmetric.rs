use num_complex::Complex64;

use super::SymCoeffs;

/// Elementary symmetric functions `(s_1, …, s_n)` of `roots`, so that
/// `Π (t - λ_i) = t^n + Σ (-1)^j s_j t^{n-j}`.
pub fn elem_sym(roots: &[Complex64]) -> SymCoeffs {
    let n = roots.len();
    let mut e = vec![Complex64::new(0.0, 0.0); n + 1];
    e[0] = Complex64::new(1.0, 0.0);
    for (count, &r) in roots.iter().enumerate() {
        for j in (1..=count + 1).rev() {
            let prev = e[j - 1];
            e[j] += r * prev;
        }
    }
    SymCoeffs::new(e[1..].to_vec())
}

/// `(p_1, …, p_kmax)` with `p_k = Σ λ_i^k`.
pub fn power_sums(roots: &[Complex64], kmax: usize) -> Vec<Complex64> {
    let mut powers = roots.to_vec();
    let mut out = Vec::with_capacity(kmax);
    for _ in 0..kmax {
        out.push(powers.iter().sum());
        for (p, r) in powers.iter_mut().zip(roots) {
            *p *= r;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NewtonDirection {
    PowerToElementary,
    ElementaryToPower,
}

/// Newton's identities `k e_k = Σ_{i=1}^k (-1)^{i-1} e_{k-i} p_i`, in either
/// direction, for the first `n` entries of `input`.
pub fn newton_convert(direction: NewtonDirection, input: &[Complex64], n: usize) -> Vec<Complex64> {
    assert!(input.len() >= n, "newton_convert: need {n} inputs, got {}", input.len());
    let zero = Complex64::new(0.0, 0.0);
    match direction {
        NewtonDirection::PowerToElementary => {
            let p = input;
            let mut e = vec![zero; n + 1];
            e[0] = Complex64::new(1.0, 0.0);
            for k in 1..=n {
                let mut acc = zero;
                for i in 1..=k {
                    let term = e[k - i] * p[i - 1];
                    if i % 2 == 1 {
                        acc += term;
                    } else {
                        acc -= term;
                    }
                }
                e[k] = acc / k as f64;
            }
            e.remove(0);
            e
        }
        NewtonDirection::ElementaryToPower => {
            let e = input;
            let mut p: Vec<Complex64> = Vec::with_capacity(n);
            for k in 1..=n {
                // p_k = Σ_{i=1}^{k-1} (-1)^{i-1} e_i p_{k-i} + (-1)^{k-1} k e_k
                let mut acc = zero;
                for i in 1..k {
                    let term = e[i - 1] * p[k - i - 1];
                    if i % 2 == 1 {
                        acc += term;
                    } else {
                        acc -= term;
                    }
                }
                let last = e[k - 1] * k as f64;
                if k % 2 == 1 {
                    acc += last;
                } else {
                    acc -= last;
                }
                p.push(acc);
            }
            p
        }
    }
}
