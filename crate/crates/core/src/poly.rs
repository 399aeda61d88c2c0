//! Fundamental solutions of the second-order difference equation
//! `(tau u)(n) = z u(n)` with
//! `(tau u)(n) = a(n-1) u(n-1) + omega(n) u(n) + a(n) u(n+1)`,
//! Wronskians, and zeros of the `s`-polynomials.
//!
//! For a base site `m`, the pair `c_m(z, .)`, `s_m(z, .)` is pinned by
//! `c_m(z, m-1) = 1, c_m(z, m) = 0` and `s_m(z, m-1) = 0, s_m(z, m) = 1`;
//! for fixed `n` both are polynomials in `z`. Values are always produced by
//! running the recurrence at the given `z`, never by expanding coefficients.
//! A coefficient multiplying an exact zero of the initial data is never read,
//! so `s_lo` (forward from the lower edge) and `c_{hi+1}` (backward from the
//! upper edge) need nothing outside the operator interval.

use crate::error::{JacobiError, Result};
use crate::operator::{IndexInterval, JacobiOperator, SiteSeq};
use crate::eigen::EigenDecomposition;
use crate::Scalar;

/// Which member of the fundamental system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionFamily {
    C,
    S,
}

impl SolutionFamily {
    /// Initial data at sites `base - 1`, `base`.
    fn initial(self) -> (f64, f64) {
        match self {
            SolutionFamily::C => (1.0, 0.0),
            SolutionFamily::S => (0.0, 1.0),
        }
    }
}

/// Values of `c_base(z, .)` and `s_base(z, .)` over a site range.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionPair<T = f64> {
    base: i64,
    z: T,
    range: IndexInterval,
    c: Vec<T>,
    s: Vec<T>,
}

impl<T: Scalar> SolutionPair<T> {
    pub fn base(&self) -> i64 {
        self.base
    }

    pub fn z(&self) -> T {
        self.z
    }

    pub fn range(&self) -> IndexInterval {
        self.range
    }

    pub fn c_at(&self, n: i64) -> T {
        self.c[self.range.offset(n)]
    }

    pub fn s_at(&self, n: i64) -> T {
        self.s[self.range.offset(n)]
    }

    pub fn family_at(&self, family: SolutionFamily, n: i64) -> T {
        match family {
            SolutionFamily::C => self.c_at(n),
            SolutionFamily::S => self.s_at(n),
        }
    }
}

fn off_diag_at(a: &SiteSeq, n: i64) -> Result<f64> {
    let v = a.get(n).ok_or(JacobiError::RangeError {
        site: n,
        lo: a.start(),
        hi: a.end(),
    })?;
    let positive = v.is_finite() && v > 0.0;
    if !positive {
        return Err(JacobiError::NonPositiveOffDiagonal { site: n, value: v });
    }
    Ok(v)
}

fn diag_at(omega: &SiteSeq, n: i64) -> Result<f64> {
    omega.get(n).ok_or(JacobiError::RangeError {
        site: n,
        lo: omega.start(),
        hi: omega.end(),
    })
}

/// One family of the fundamental system over `range`.
///
/// The term `a(base-1) * u(base-1)` in the first forward step (and the
/// mirrored term in the first backward step) is skipped when the initial
/// value is the structural zero, which is exactly when the polynomial does
/// not depend on that coefficient.
fn solve_family<T: Scalar>(
    a: &SiteSeq,
    omega: &SiteSeq,
    base: i64,
    z: T,
    range: IndexInterval,
    init: (f64, f64),
) -> Result<Vec<T>> {
    let (at_prev, at_base) = init;
    let lo = range.lo();
    let hi = range.hi();
    let mut u = vec![T::from(0.0); range.size()];
    let idx = |n: i64| (n - lo) as usize;
    u[idx(base - 1)] = T::from(at_prev);
    u[idx(base)] = T::from(at_base);

    // forward: u(n+1) = ((z - omega(n)) u(n) - a(n-1) u(n-1)) / a(n)
    for n in base..hi {
        let prev_term = if n == base && at_prev == 0.0 {
            T::from(0.0)
        } else {
            T::from(off_diag_at(a, n - 1)?) * u[idx(n - 1)]
        };
        let num = (z - T::from(diag_at(omega, n)?)) * u[idx(n)] - prev_term;
        u[idx(n + 1)] = num / T::from(off_diag_at(a, n)?);
    }

    // backward: u(n-1) = ((z - omega(n)) u(n) - a(n) u(n+1)) / a(n-1)
    let mut n = base - 1;
    while n > lo {
        let next_term = if n == base - 1 && at_base == 0.0 {
            T::from(0.0)
        } else {
            T::from(off_diag_at(a, n)?) * u[idx(n + 1)]
        };
        let num = (z - T::from(diag_at(omega, n)?)) * u[idx(n)] - next_term;
        u[idx(n - 1)] = num / T::from(off_diag_at(a, n - 1)?);
        n -= 1;
    }
    Ok(u)
}

/// Both fundamental solutions at spectral parameter `z` over `range`, which
/// must cover the initial sites `base - 1` and `base`.
pub fn fundamental_solutions<T: Scalar>(
    a: &SiteSeq,
    omega: &SiteSeq,
    base: i64,
    z: T,
    range: IndexInterval,
) -> Result<SolutionPair<T>> {
    if !range.contains(base - 1) || !range.contains(base) {
        return Err(JacobiError::RangeError {
            site: base - 1,
            lo: range.lo(),
            hi: range.hi(),
        });
    }
    let c = solve_family(a, omega, base, z, range, SolutionFamily::C.initial())?;
    let s = solve_family(a, omega, base, z, range, SolutionFamily::S.initial())?;
    Ok(SolutionPair { base, z, range, c, s })
}

/// Single value `c_base(z, site)` or `s_base(z, site)`.
pub fn family_value(
    a: &SiteSeq,
    omega: &SiteSeq,
    family: SolutionFamily,
    base: i64,
    z: f64,
    site: i64,
) -> Result<f64> {
    let lo = site.min(base - 1);
    let hi = site.max(base);
    let range = IndexInterval::new(lo, hi)?;
    let u = solve_family(a, omega, base, z, range, family.initial())?;
    Ok(u[(site - lo) as usize])
}

pub fn s_value(a: &SiteSeq, omega: &SiteSeq, base: i64, z: f64, site: i64) -> Result<f64> {
    family_value(a, omega, SolutionFamily::S, base, z, site)
}

pub fn c_value(a: &SiteSeq, omega: &SiteSeq, base: i64, z: f64, site: i64) -> Result<f64> {
    family_value(a, omega, SolutionFamily::C, base, z, site)
}

/// `W_n(xi, eta) = a(n) (xi(n) eta(n+1) - eta(n) xi(n+1))`.
pub fn wronskian(a: &SiteSeq, xi: &SiteSeq, eta: &SiteSeq, n: i64) -> Result<f64> {
    for seq in [xi, eta] {
        if !seq.covers(n) || !seq.covers(n + 1) {
            return Err(JacobiError::RangeError {
                site: n,
                lo: seq.start(),
                hi: seq.end(),
            });
        }
    }
    let an = off_diag_at(a, n)?;
    Ok(an * (xi.at(n) * eta.at(n + 1) - eta.at(n) * xi.at(n + 1)))
}

/// Interior three-term expression `(tau xi)(n)`.
pub fn tau(a: &SiteSeq, omega: &SiteSeq, xi: &SiteSeq, n: i64) -> Result<f64> {
    if !xi.covers(n - 1) || !xi.covers(n + 1) {
        return Err(JacobiError::RangeError {
            site: n,
            lo: xi.start(),
            hi: xi.end(),
        });
    }
    Ok(off_diag_at(a, n - 1)? * xi.at(n - 1)
        + diag_at(omega, n)? * xi.at(n)
        + off_diag_at(a, n)? * xi.at(n + 1))
}

/// `p(H) delta_source` where `p(z) = c_base(z, site)` or `s_base(z, site)`,
/// evaluated through the eigendecomposition of the same operator.
pub fn polynomial_at_operator(
    op: &JacobiOperator,
    ed: &EigenDecomposition,
    family: SolutionFamily,
    base: i64,
    site: i64,
    source: i64,
) -> Result<SiteSeq> {
    let interval = op.interval();
    if !interval.contains(source) {
        return Err(JacobiError::RangeError {
            site: source,
            lo: interval.lo(),
            hi: interval.hi(),
        });
    }
    let n = op.size();
    let mut out = vec![0.0; n];
    for j in 0..ed.size() {
        let p = family_value(op.a_seq(), op.omega_seq(), family, base, ed.eigenvalues()[j], site)?;
        let coeff = p * ed.vector_component(j, source);
        for (o, v) in out.iter_mut().zip(ed.vector(j)) {
            *o += coeff * v;
        }
    }
    Ok(SiteSeq::new(interval.lo(), out))
}

/// Zeros of `z -> s_base(z, site)`, one per polynomial degree.
///
/// Computed as the eigenvalues of the Jacobi restriction to sites
/// `base..=site-1`, which is much better conditioned than coefficient
/// root-finding; requires `site >= base + 1`.
pub fn s_polynomial_zeros(a: &SiteSeq, omega: &SiteSeq, base: i64, site: i64) -> Result<Vec<f64>> {
    let sub = IndexInterval::new(base, site - 1)?;
    let mut sub_a = Vec::with_capacity(sub.size() - 1);
    for n in sub.lo()..sub.hi() {
        sub_a.push(off_diag_at(a, n)?);
    }
    let mut sub_w = Vec::with_capacity(sub.size());
    for n in sub.sites() {
        sub_w.push(diag_at(omega, n)?);
    }
    let op = JacobiOperator::new(sub, sub_a, sub_w)?;
    Ok(crate::eigen::eigendecompose(&op)?.eigenvalues().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn interval(lo: i64, hi: i64) -> IndexInterval {
        IndexInterval::new(lo, hi).unwrap()
    }

    /// Free coefficients over a window wide enough for all bases used here.
    fn free_coeffs(lo: i64, hi: i64) -> (SiteSeq, SiteSeq) {
        let a = SiteSeq::from_fn(interval(lo, hi), |_| 1.0);
        let omega = SiteSeq::from_fn(interval(lo, hi), |_| 0.0);
        (a, omega)
    }

    fn rand_stream(seed: u64) -> impl FnMut() -> f64 {
        let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
        move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        }
    }

    #[test]
    fn free_case_s_polynomials() {
        let (a, w) = free_coeffs(0, 4);
        for z in [-1.5, 0.0, 0.3, 2.0] {
            assert_eq!(s_value(&a, &w, 1, z, 2).unwrap(), z);
            assert!((s_value(&a, &w, 1, z, 3).unwrap() - (z * z - 1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn free_case_c_polynomial() {
        let (a, w) = free_coeffs(0, 4);
        for z in [-1.0, 0.0, 0.7] {
            assert_eq!(c_value(&a, &w, 1, z, 2).unwrap(), -1.0);
        }
    }

    #[test]
    fn initial_conditions_exact() {
        let mut next = rand_stream(3);
        let iv = interval(-2, 6);
        let a = SiteSeq::from_fn(iv, |_| 0.5 + next());
        let w = SiteSeq::from_fn(iv, |_| 2.0 * next() - 1.0);
        let pair = fundamental_solutions(&a, &w, 2, 0.37, interval(-1, 5)).unwrap();
        assert_eq!(pair.c_at(1), 1.0);
        assert_eq!(pair.c_at(2), 0.0);
        assert_eq!(pair.s_at(1), 0.0);
        assert_eq!(pair.s_at(2), 1.0);
    }

    #[test]
    fn solutions_satisfy_recurrence() {
        let mut next = rand_stream(5);
        let iv = interval(-5, 9);
        let a = SiteSeq::from_fn(iv, |_| 0.5 + next());
        let w = SiteSeq::from_fn(iv, |_| 2.0 * next() - 1.0);
        let z = 0.83;
        let range = interval(-4, 9);
        let pair = fundamental_solutions(&a, &w, 1, z, range).unwrap();
        for family in [SolutionFamily::C, SolutionFamily::S] {
            let u = SiteSeq::from_fn(range, |n| pair.family_at(family, n));
            for n in range.lo() + 1..range.hi() {
                let lhs = tau(&a, &w, &u, n).unwrap();
                assert!(
                    (lhs - z * u.at(n)).abs() <= 1e-12 * u.at(n).abs().max(1.0),
                    "family {family:?} site {n}"
                );
            }
        }
    }

    #[test]
    fn edge_bases_need_nothing_outside_the_interval() {
        // s anchored at the lower edge, c anchored one above the upper edge.
        let mut next = rand_stream(7);
        let iv = interval(1, 8);
        let a = SiteSeq::from_fn(interval(1, 7), |_| 0.5 + next());
        let w = SiteSeq::from_fn(iv, |_| 2.0 * next() - 1.0);
        let s = solve_family(&a, &w, 1, 0.4, interval(0, 8), SolutionFamily::S.initial()).unwrap();
        assert_eq!(s[0], 0.0);
        assert_eq!(s[1], 1.0);
        let c = solve_family(&a, &w, 9, 0.4, interval(1, 9), SolutionFamily::C.initial()).unwrap();
        assert_eq!(c[7], 1.0);
        assert_eq!(c[8], 0.0);
        // the c family from the lower edge genuinely needs a(0)
        let err =
            solve_family(&a, &w, 1, 0.4, interval(0, 8), SolutionFamily::C.initial()).unwrap_err();
        assert!(matches!(err, JacobiError::RangeError { site: 0, .. }));
    }

    #[test]
    fn complex_evaluation() {
        let (a, w) = free_coeffs(0, 4);
        let z = Complex64::new(0.0, 1.0);
        let pair = fundamental_solutions(&a, &w, 1, z, interval(0, 3)).unwrap();
        assert_eq!(pair.s_at(2), z);
        let want = z * z - Complex64::new(1.0, 0.0);
        assert!((pair.s_at(3) - want).norm() < 1e-15);
    }

    #[test]
    fn wronskian_at_initial_sites_is_off_diagonal() {
        let mut next = rand_stream(9);
        let iv = interval(0, 6);
        let a = SiteSeq::from_fn(iv, |_| 0.5 + next());
        let w = SiteSeq::from_fn(iv, |_| 2.0 * next() - 1.0);
        let m = 3;
        let range = interval(m - 1, 6);
        let pair = fundamental_solutions(&a, &w, m, 0.21, range).unwrap();
        let c = SiteSeq::from_fn(range, |n| pair.c_at(n));
        let s = SiteSeq::from_fn(range, |n| pair.s_at(n));
        let got = wronskian(&a, &c, &s, m - 1).unwrap();
        assert!((got - a.at(m - 1)).abs() < 1e-15);
    }

    #[test]
    fn wronskian_of_equal_sequences_vanishes() {
        let (a, w) = free_coeffs(0, 5);
        let pair = fundamental_solutions(&a, &w, 1, 0.9, interval(0, 5)).unwrap();
        let s = SiteSeq::from_fn(interval(0, 5), |n| pair.s_at(n));
        assert_eq!(wronskian(&a, &s, &s, 2).unwrap(), 0.0);
        let _ = w;
    }

    #[test]
    fn wronskian_free_case_value() {
        let (a, w) = free_coeffs(0, 4);
        let pair = fundamental_solutions(&a, &w, 1, 0.0, interval(0, 3)).unwrap();
        let c = SiteSeq::from_fn(interval(0, 3), |n| pair.c_at(n));
        let s = SiteSeq::from_fn(interval(0, 3), |n| pair.s_at(n));
        assert_eq!(wronskian(&a, &c, &s, 1).unwrap(), 1.0);
    }

    #[test]
    fn wronskian_range_error() {
        let (a, _) = free_coeffs(0, 3);
        let xi = SiteSeq::from_fn(interval(0, 2), |n| n as f64);
        let err = wronskian(&a, &xi, &xi, 2).unwrap_err();
        assert!(matches!(err, JacobiError::RangeError { .. }));
    }

    #[test]
    fn wronskian_constant_for_solutions_at_same_z() {
        let mut next = rand_stream(13);
        for _ in 0..50 {
            let iv = interval(0, 14);
            let a = SiteSeq::from_fn(iv, |_| 0.5 + 1.5 * next());
            let w = SiteSeq::from_fn(iv, |_| 2.0 * next() - 1.0);
            let z = 6.0 * next() - 3.0;
            let range = interval(0, 14);
            let pair = fundamental_solutions(&a, &w, 4, z, range).unwrap();
            let c = SiteSeq::from_fn(range, |n| pair.c_at(n));
            let s = SiteSeq::from_fn(range, |n| pair.s_at(n));
            let w0 = wronskian(&a, &c, &s, 0).unwrap();
            for n in 1..14 {
                let wn = wronskian(&a, &c, &s, n).unwrap();
                assert!(
                    (wn - w0).abs() <= 1e-10 * w0.abs().max(1.0),
                    "n={n}: {wn} vs {w0}"
                );
            }
        }
    }

    #[test]
    fn zero_wronskian_implies_linear_dependence() {
        let mut next = rand_stream(17);
        let iv = interval(0, 10);
        let a = SiteSeq::from_fn(iv, |_| 0.5 + next());
        let w = SiteSeq::from_fn(iv, |_| 2.0 * next() - 1.0);
        let z = 0.44;
        let range = interval(0, 10);
        // xi = 3 * s by construction: same solution up to scale.
        let s = solve_family(&a, &w, 2, z, range, (0.0, 1.0)).unwrap();
        let xi = solve_family(&a, &w, 2, z, range, (0.0, 3.0)).unwrap();
        let s_seq = SiteSeq::new(0, s.clone());
        let xi_seq = SiteSeq::new(0, xi.clone());
        for n in 0..10 {
            assert!(wronskian(&a, &xi_seq, &s_seq, n).unwrap().abs() < 1e-12);
        }
        let ratio = xi_seq.dot(&s_seq) / s_seq.dot(&s_seq);
        let resid: f64 = xi
            .iter()
            .zip(&s)
            .map(|(x, y)| (x - ratio * y).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(resid <= 1e-9 * xi_seq.norm());
    }

    #[test]
    fn green_formula_random_instances() {
        let mut next = rand_stream(19);
        for _ in 0..100 {
            let span = interval(0, 12);
            let a = SiteSeq::from_fn(span, |_| 0.5 + 1.5 * next());
            let w = SiteSeq::from_fn(span, |_| 2.0 * next() - 1.0);
            let xi = SiteSeq::from_fn(span, |_| 2.0 * next() - 1.0);
            let eta = SiteSeq::from_fn(span, |_| 2.0 * next() - 1.0);
            let m = (next() * 5.0) as i64;
            let n = m + 1 + (next() * (10 - m - 1) as f64) as i64;
            let mut sum = 0.0;
            for k in m + 1..=n {
                sum += xi.at(k) * tau(&a, &w, &eta, k).unwrap()
                    - tau(&a, &w, &xi, k).unwrap() * eta.at(k);
            }
            let want =
                wronskian(&a, &xi, &eta, n).unwrap() - wronskian(&a, &xi, &eta, m).unwrap();
            assert!((sum - want).abs() <= 1e-10, "m={m} n={n}: {sum} vs {want}");
        }
    }

    #[test]
    fn zeros_free_degree_two() {
        let (a, w) = free_coeffs(0, 4);
        let zeros = s_polynomial_zeros(&a, &w, 1, 3).unwrap();
        assert_eq!(zeros.len(), 2);
        assert!((zeros[0] + 1.0).abs() < 1e-14);
        assert!((zeros[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zeros_single_site_is_potential_value() {
        let iv = interval(0, 3);
        let a = SiteSeq::from_fn(iv, |_| 2.0);
        let w = SiteSeq::from_fn(iv, |n| n as f64 + 0.25);
        let zeros = s_polynomial_zeros(&a, &w, 1, 2).unwrap();
        assert_eq!(zeros, vec![1.25]);
        let (fa, fw) = free_coeffs(0, 3);
        assert_eq!(s_polynomial_zeros(&fa, &fw, 1, 2).unwrap(), vec![0.0]);
    }

    #[test]
    fn zeros_match_evaluation_sign_changes() {
        // cross-check: the polynomial evaluated by recurrence changes sign
        // at each reported zero.
        let mut next = rand_stream(29);
        let iv = interval(0, 8);
        let a = SiteSeq::from_fn(iv, |_| 0.5 + next());
        let w = SiteSeq::from_fn(iv, |_| 2.0 * next() - 1.0);
        let zeros = s_polynomial_zeros(&a, &w, 1, 7).unwrap();
        let eps = 1e-6;
        for z in &zeros {
            let left = s_value(&a, &w, 1, z - eps, 7).unwrap();
            let right = s_value(&a, &w, 1, z + eps, 7).unwrap();
            assert!(left * right < 0.0, "no sign change at {z}");
            assert!(s_value(&a, &w, 1, *z, 7).unwrap().abs() < 1e-8);
        }
    }

    #[test]
    fn lemma_reconstruction_free_3x3() {
        use crate::eigen::eigendecompose;
        let op = JacobiOperator::free(interval(1, 3));
        let ed = eigendecompose(&op).unwrap();
        // s_1(H, 2) delta_1 = H delta_1 = delta_2
        let out = polynomial_at_operator(&op, &ed, SolutionFamily::S, 1, 2, 1).unwrap();
        for (n, want) in [(1, 0.0), (2, 1.0), (3, 0.0)] {
            assert!((out.at(n) - want).abs() < 1e-12);
        }
        // s_1(H, 3) delta_1 = (H^2 - 1) delta_1 = delta_3
        let out = polynomial_at_operator(&op, &ed, SolutionFamily::S, 1, 3, 1).unwrap();
        for (n, want) in [(1, 0.0), (2, 0.0), (3, 1.0)] {
            assert!((out.at(n) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn lemma_reconstruction_all_branches_random() {
        use crate::eigen::eigendecompose;
        let mut next = rand_stream(31);
        for _ in 0..10 {
            let iv = interval(1, 9);
            let a: Vec<f64> = (0..8).map(|_| 0.5 + 1.5 * next()).collect();
            let w: Vec<f64> = (0..9).map(|_| 2.0 * next() - 1.0).collect();
            let op = JacobiOperator::new(iv, a, w).unwrap();
            let ed = eigendecompose(&op).unwrap();
            for n in iv.sites() {
                let delta_n = SiteSeq::delta(iv, n).unwrap();
                // forward branch from the lower edge
                let got = polynomial_at_operator(&op, &ed, SolutionFamily::S, iv.lo(), n, iv.lo())
                    .unwrap();
                assert!(diff_norm(&got, &delta_n) <= 1e-8, "s branch n={n}");
                // backward branch from one above the upper edge
                let got =
                    polynomial_at_operator(&op, &ed, SolutionFamily::C, iv.hi() + 1, n, iv.hi())
                        .unwrap();
                assert!(diff_norm(&got, &delta_n) <= 1e-8, "c branch n={n}");
                // interior two-term branch
                for m in iv.lo()..iv.hi() {
                    let s_part =
                        polynomial_at_operator(&op, &ed, SolutionFamily::S, m + 1, n, m + 1)
                            .unwrap();
                    let c_part =
                        polynomial_at_operator(&op, &ed, SolutionFamily::C, m + 1, n, m).unwrap();
                    let sum = SiteSeq::from_fn(iv, |k| s_part.at(k) + c_part.at(k));
                    assert!(diff_norm(&sum, &delta_n) <= 1e-8, "interior m={m} n={n}");
                }
            }
        }
    }

    fn diff_norm(x: &SiteSeq, y: &SiteSeq) -> f64 {
        x.values()
            .iter()
            .zip(y.values())
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}
