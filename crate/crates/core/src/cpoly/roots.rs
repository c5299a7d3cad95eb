use num_complex::Complex64;

use super::{PolyError, Polynomial};

/// Base radius under which two roots are always treated as one cluster.
pub const CLUSTER_RADIUS: f64 = 1e-6;

const MAX_ABERTH_ITER: usize = 500;
const EPS: f64 = f64::EPSILON;

/// All roots of `p`, repeated according to multiplicity.
///
/// Simultaneous Aberth–Ehrlich iteration; when it stalls or leaves a
/// residual above `tol·(1 + max|a_j|)`, the eigenvalues of the companion
/// matrix are computed by shifted QR instead. Exact zero roots (vanishing
/// low-order coefficients) are split off before iterating.
pub fn roots(p: &Polynomial, tol: f64) -> Result<Vec<Complex64>, PolyError> {
    if p.degree() == 0 {
        return Err(PolyError::Constant);
    }
    let zeros = p.coeffs().iter().take_while(|c| **c == Complex64::new(0.0, 0.0)).count();
    let reduced = &p.coeffs()[zeros..];
    let mut out = vec![Complex64::new(0.0, 0.0); zeros];
    if reduced.len() == 1 {
        return Ok(out);
    }

    let bound = tol * (1.0 + p.max_coeff_abs());
    let accept = |rs: &[Complex64]| rs.iter().all(|r| p.eval(*r).norm() <= bound);

    if reduced.len() == 2 {
        out.push(-reduced[0]);
        return Ok(out);
    }
    if let Some(rs) = aberth(reduced, MAX_ABERTH_ITER) {
        if accept(&rs) {
            out.extend(rs);
            return Ok(out);
        }
    }
    if let Some(rs) = companion_eigenvalues(reduced) {
        if accept(&rs) {
            out.extend(rs);
            return Ok(out);
        }
    }
    Err(PolyError::NoConvergence { poly: p.to_string() })
}

/// Value, derivative and the running bound `Σ |a_j| |z|^j` used to decide
/// when a residual is at rounding level.
fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64, f64) {
    let zero = Complex64::new(0.0, 0.0);
    let (mut p, mut dp, mut bound) = (zero, zero, 0.0);
    let az = z.norm();
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
        bound = bound * az + c.norm();
    }
    (p, dp, bound)
}

pub(crate) fn aberth(coeffs: &[Complex64], max_iter: usize) -> Option<Vec<Complex64>> {
    let d = coeffs.len() - 1;
    // geometric mean of the root moduli
    let radius = coeffs[0].norm().powf(1.0 / d as f64).max(f64::MIN_POSITIVE);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / d as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();
    let mut done = vec![false; d];

    for _ in 0..max_iter {
        for i in 0..d {
            if done[i] {
                continue;
            }
            let (p, dp, bound) = horner(coeffs, z[i]);
            if p.norm() <= 4.0 * EPS * bound {
                done[i] = true;
                continue;
            }
            let correction = if dp.norm() == 0.0 {
                Complex64::from_polar(1e-8 * (1.0 + z[i].norm()), i as f64)
            } else {
                let w = p / dp;
                let s: Complex64 = (0..d).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
                w / (Complex64::new(1.0, 0.0) - w * s)
            };
            if !correction.re.is_finite() || !correction.im.is_finite() {
                return None;
            }
            z[i] -= correction;
            if correction.norm() <= 4.0 * EPS * z[i].norm() {
                done[i] = true;
            }
        }
        if done.iter().all(|&b| b) {
            return Some(z);
        }
    }
    None
}

/// Eigenvalues of the companion matrix by single-shift complex QR.
pub(crate) fn companion_eigenvalues(coeffs: &[Complex64]) -> Option<Vec<Complex64>> {
    let d = coeffs.len() - 1;
    let zero = Complex64::new(0.0, 0.0);
    let mut h = vec![vec![zero; d]; d];
    for j in 0..d {
        h[0][j] = -coeffs[d - 1 - j];
    }
    for i in 1..d {
        h[i][i - 1] = Complex64::new(1.0, 0.0);
    }

    let mut eigs = Vec::with_capacity(d);
    let mut hi = d - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    loop {
        if hi == 0 {
            eigs.push(h[0][0]);
            break;
        }
        let mut lo = hi;
        while lo > 0 {
            let scale = h[lo][lo].norm() + h[lo - 1][lo - 1].norm();
            if h[lo][lo - 1].norm() <= EPS * scale.max(f64::MIN_POSITIVE) {
                h[lo][lo - 1] = zero;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eigs.push(h[hi][hi]);
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > 100 * d {
            return None;
        }

        let a = h[hi - 1][hi - 1];
        let b = h[hi - 1][hi];
        let c = h[hi][hi - 1];
        let dd = h[hi][hi];
        let mu = if iter % 11 == 10 {
            // exceptional shift
            dd + Complex64::new(0.75 * c.norm(), 0.25 * c.norm())
        } else {
            let half = (a - dd) * 0.5;
            let disc = (half * half + b * c).sqrt();
            let m1 = (a + dd) * 0.5 + disc;
            let m2 = (a + dd) * 0.5 - disc;
            if (m1 - dd).norm() < (m2 - dd).norm() {
                m1
            } else {
                m2
            }
        };

        for i in lo..=hi {
            h[i][i] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let x = h[k][k];
            let y = h[k + 1][k];
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (cs, sn) = if r == 0.0 {
                (Complex64::new(1.0, 0.0), zero)
            } else {
                (x / r, y / r)
            };
            for j in k..=hi {
                let t1 = h[k][j];
                let t2 = h[k + 1][j];
                h[k][j] = cs.conj() * t1 + sn.conj() * t2;
                h[k + 1][j] = -sn * t1 + cs * t2;
            }
            rots.push((cs, sn));
        }
        for (offset, (cs, sn)) in rots.into_iter().enumerate() {
            let k = lo + offset;
            for row in h.iter_mut().take((k + 2).min(hi + 1)).skip(lo) {
                let t1 = row[k];
                let t2 = row[k + 1];
                row[k] = t1 * cs + t2 * sn;
                row[k + 1] = -t1 * sn.conj() + t2 * cs.conj();
            }
        }
        for i in lo..=hi {
            h[i][i] += mu;
        }
    }
    Some(eigs)
}

/// A group of numerically coincident roots.
#[derive(Debug, Clone, PartialEq)]
pub struct RootCluster {
    /// Mean of the member roots.
    pub center: Complex64,
    pub multiplicity: usize,
}

/// Groups roots that are perturbations of one multiple root.
///
/// A `k`-fold root computed in double precision scatters over a radius of
/// order `(ε·scale)^{1/k}`, so the admissible cluster radius grows with the
/// candidate multiplicity: a group of `k` roots is accepted when it lies
/// within `max(base_radius, 10 (ε·scale)^{1/k})` of its mean. Groups are
/// formed by single linkage and split again at the next smaller radius
/// whenever the acceptance test fails.
pub fn cluster_roots(roots: &[Complex64], scale: f64, base_radius: f64) -> Vec<RootCluster> {
    cluster_roots_gated(roots, scale, base_radius, &|_, _| true)
}

/// [`cluster_roots`] with an extra veto: a group of `k` roots around
/// `center` is only accepted when `accept(k, center)` holds.
fn cluster_roots_gated(
    roots: &[Complex64],
    scale: f64,
    base_radius: f64,
    accept: &dyn Fn(usize, Complex64) -> bool,
) -> Vec<RootCluster> {
    let radius = |k: usize, center: Complex64| {
        let spread = 10.0 * (EPS * scale.max(1.0)).powf(1.0 / k as f64) * center.norm().max(1.0);
        spread.max(base_radius)
    };
    let all: Vec<usize> = (0..roots.len()).collect();
    let mut groups = Vec::new();
    split_groups(roots, all, roots.len().max(1), &radius, accept, &mut groups);

    let mut clusters: Vec<RootCluster> = groups
        .into_iter()
        .map(|g| {
            let center = g.iter().map(|&i| roots[i]).sum::<Complex64>() / g.len() as f64;
            RootCluster {
                center,
                multiplicity: g.len(),
            }
        })
        .collect();
    clusters.sort_by(|a, b| {
        a.center
            .re
            .total_cmp(&b.center.re)
            .then(a.center.im.total_cmp(&b.center.im))
    });
    clusters
}

fn split_groups(
    roots: &[Complex64],
    members: Vec<usize>,
    level: usize,
    radius: &dyn Fn(usize, Complex64) -> f64,
    accept: &dyn Fn(usize, Complex64) -> bool,
    out: &mut Vec<Vec<usize>>,
) {
    if members.len() == 1 {
        out.push(members);
        return;
    }
    let threshold = radius(level, Complex64::new(0.0, 0.0));
    for comp in single_linkage(roots, &members, threshold) {
        let k = comp.len();
        let center = comp.iter().map(|&i| roots[i]).sum::<Complex64>() / k as f64;
        let spread = comp.iter().map(|&i| (roots[i] - center).norm()).fold(0.0, f64::max);
        if k == 1 || level == 1 || (spread <= radius(k, center) && accept(k, center)) {
            out.push(comp);
        } else {
            let next = if level > k { k } else { level - 1 };
            split_groups(roots, comp, next, radius, accept, out);
        }
    }
}

fn single_linkage(roots: &[Complex64], members: &[usize], threshold: f64) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..members.len()).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut j = i;
        while parent[j] != r {
            let next = parent[j];
            parent[j] = r;
            j = next;
        }
        r
    }
    for a in 0..members.len() {
        for b in a + 1..members.len() {
            if (roots[members[a]] - roots[members[b]]).norm() <= threshold {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[rb.max(ra)] = rb.min(ra);
                }
            }
        }
    }
    let mut comps: Vec<Vec<usize>> = Vec::new();
    let mut index_of_root = vec![usize::MAX; members.len()];
    for a in 0..members.len() {
        let r = find(&mut parent, a);
        if index_of_root[r] == usize::MAX {
            index_of_root[r] = comps.len();
            comps.push(Vec::new());
        }
        comps[index_of_root[r]].push(members[a]);
    }
    comps
}

/// Roots of `p` merged into clusters with multiplicities.
pub fn roots_with_multiplicity(
    p: &Polynomial,
    tol: f64,
    base_radius: f64,
) -> Result<Vec<RootCluster>, PolyError> {
    let rs = roots(p, tol)?;
    let accept = |k: usize, center: Complex64| taylor_vanishes(p.coeffs(), refine_multiple_root(p, center, k), k);
    let mut clusters = cluster_roots_gated(&rs, 1.0 + p.max_coeff_abs(), base_radius, &accept);
    for cluster in clusters.iter_mut().filter(|c| c.multiplicity > 1) {
        cluster.center = refine_multiple_root(p, cluster.center, cluster.multiplicity);
    }
    Ok(clusters)
}

/// Relative size below which a Taylor coefficient counts as rounding noise.
const TAYLOR_TOL: f64 = 1e-10;

/// Whether `p` looks like it has a `k`-fold root at the refined centre `c`:
/// the Taylor coefficients of orders `0..k` at `c` must all be negligible
/// next to the sums of moduli that produce them. Tightly split simple roots, such as
/// those of `t^m - ζ` for small `ζ`, fail this even when they fall inside
/// the distance-based cluster radius.
fn taylor_vanishes(coeffs: &[Complex64], c: Complex64, k: usize) -> bool {
    let mut q = coeffs.to_vec();
    let mut mag: Vec<f64> = coeffs.iter().map(|a| a.norm()).collect();
    let ac = c.norm();
    for _ in 0..k {
        if q.is_empty() {
            return false;
        }
        // synthetic division by (t - c): the remainder is the next Taylor coefficient
        let d = q.len() - 1;
        let (mut acc, mut bound) = (q[d], mag[d]);
        let mut quot = vec![Complex64::new(0.0, 0.0); d];
        let mut qmag = vec![0.0; d];
        for i in (0..d).rev() {
            quot[i] = acc;
            qmag[i] = bound;
            acc = acc * c + q[i];
            bound = bound * ac + mag[i];
        }
        if acc.norm() > TAYLOR_TOL * bound.max(1.0) {
            return false;
        }
        q = quot;
        mag = qmag;
    }
    true
}

/// A `k`-fold root is a simple root of `p^{(k-1)}`; a few Newton steps on
/// that derivative pull the cluster mean onto it.
fn refine_multiple_root(p: &Polynomial, start: Complex64, k: usize) -> Complex64 {
    let mut coeffs: Vec<Complex64> = p.coeffs().to_vec();
    for _ in 0..k - 1 {
        coeffs = coeffs.iter().enumerate().skip(1).map(|(j, c)| c * j as f64).collect();
    }
    let spread = 10.0 * (EPS * (1.0 + p.max_coeff_abs())).powf(1.0 / k as f64) * start.norm().max(1.0);
    let mut z = start;
    for _ in 0..8 {
        let (v, dv, _) = horner(&coeffs, z);
        if dv.norm() == 0.0 {
            break;
        }
        let step = v / dv;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        z -= step;
        if step.norm() <= EPS * z.norm().max(1e-300) {
            break;
        }
    }
    if (z - start).norm() <= spread {
        z
    } else {
        start
    }
}
