//! Finite Jacobi operators on integer site intervals.
//!
//! An operator lives on the interior sites `lo..=hi` of an integer interval
//! and is determined by a positive off-diagonal sequence `a` (entry `a(n)`
//! couples sites `n` and `n+1`) and a diagonal potential `omega`. Rows at the
//! interval ends drop the out-of-range neighbor term, so the matrix is the
//! usual symmetric tridiagonal truncation. Semi- or bi-infinite operators are
//! represented only through finite truncations chosen by the caller.

use serde::{Deserialize, Serialize};

use crate::error::{JacobiError, Result};
use crate::Scalar;

/// Closed interval of integer sites `lo..=hi` with `lo <= hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IndexInterval {
    lo: i64,
    hi: i64,
}

impl IndexInterval {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(JacobiError::InvalidInterval { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    /// Number of sites.
    pub fn size(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn contains(&self, n: i64) -> bool {
        self.lo <= n && n <= self.hi
    }

    pub fn contains_interval(&self, other: &IndexInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn sites(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }

    /// Position of site `n` relative to `lo`; caller guarantees containment.
    pub(crate) fn offset(&self, n: i64) -> usize {
        debug_assert!(self.contains(n));
        (n - self.lo) as usize
    }
}

impl std::fmt::Display for IndexInterval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Real-valued sequence on consecutive integer sites. May be empty.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteSeq {
    start: i64,
    vals: Vec<f64>,
}

impl SiteSeq {
    pub fn new(start: i64, vals: Vec<f64>) -> Self {
        Self { start, vals }
    }

    /// Sequence over exactly the sites of `interval`.
    pub fn from_interval(interval: IndexInterval, vals: Vec<f64>) -> Result<Self> {
        if vals.len() != interval.size() {
            return Err(JacobiError::LengthMismatch {
                expected: interval.size(),
                got: vals.len(),
            });
        }
        Ok(Self {
            start: interval.lo(),
            vals,
        })
    }

    pub fn from_fn(interval: IndexInterval, f: impl FnMut(i64) -> f64) -> Self {
        Self {
            start: interval.lo(),
            vals: interval.sites().map(f).collect(),
        }
    }

    pub fn zeros(interval: IndexInterval) -> Self {
        Self {
            start: interval.lo(),
            vals: vec![0.0; interval.size()],
        }
    }

    /// Canonical basis vector: 1 at `site`, 0 elsewhere.
    pub fn delta(interval: IndexInterval, site: i64) -> Result<Self> {
        if !interval.contains(site) {
            return Err(JacobiError::RangeError {
                site,
                lo: interval.lo(),
                hi: interval.hi(),
            });
        }
        let mut vals = vec![0.0; interval.size()];
        vals[interval.offset(site)] = 1.0;
        Ok(Self {
            start: interval.lo(),
            vals,
        })
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    /// Last covered site; one below `start` when empty.
    pub fn end(&self) -> i64 {
        self.start + self.vals.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.vals
    }

    pub fn covers(&self, n: i64) -> bool {
        self.start <= n && n <= self.end()
    }

    pub fn get(&self, n: i64) -> Option<f64> {
        if self.covers(n) {
            Some(self.vals[(n - self.start) as usize])
        } else {
            None
        }
    }

    /// Value at site `n`; panics outside the covered range.
    pub fn at(&self, n: i64) -> f64 {
        self.get(n)
            .unwrap_or_else(|| panic!("site {} outside [{}, {}]", n, self.start, self.end()))
    }

    /// Euclidean inner product; the two sequences must cover the same sites.
    pub fn dot(&self, other: &SiteSeq) -> f64 {
        assert_eq!(self.start, other.start);
        assert_eq!(self.len(), other.len());
        self.vals
            .iter()
            .zip(&other.vals)
            .map(|(x, y)| x * y)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn iter_sites(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.vals
            .iter()
            .enumerate()
            .map(move |(k, &v)| (self.start + k as i64, v))
    }
}

/// Index of a canonical basis vector `delta_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisIndex(pub i64);

impl From<i64> for BasisIndex {
    fn from(site: i64) -> Self {
        BasisIndex(site)
    }
}

/// On-disk representation; field names are part of the file format.
#[derive(Serialize, Deserialize)]
struct MatrixFile {
    lo: i64,
    hi: i64,
    a: Vec<f64>,
    omega: Vec<f64>,
}

/// Symmetric tridiagonal operator with positive off-diagonal entries.
///
/// Immutable after construction; cheap to share across worker threads.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiOperator {
    interval: IndexInterval,
    a: SiteSeq,
    omega: SiteSeq,
}

impl JacobiOperator {
    /// Validates and builds the operator. `a` has one entry per site pair
    /// (length `size - 1`), `omega` one per site.
    pub fn new(interval: IndexInterval, a: Vec<f64>, omega: Vec<f64>) -> Result<Self> {
        let n = interval.size();
        if a.len() != n - 1 {
            return Err(JacobiError::LengthMismatch {
                expected: n - 1,
                got: a.len(),
            });
        }
        if omega.len() != n {
            return Err(JacobiError::LengthMismatch {
                expected: n,
                got: omega.len(),
            });
        }
        for (k, &v) in a.iter().enumerate() {
            let positive = v.is_finite() && v > 0.0;
            if !positive {
                return Err(JacobiError::NonPositiveOffDiagonal {
                    site: interval.lo() + k as i64,
                    value: v,
                });
            }
        }
        Ok(Self {
            interval,
            a: SiteSeq::new(interval.lo(), a),
            omega: SiteSeq::new(interval.lo(), omega),
        })
    }

    /// Free operator: `a == 1`, `omega == 0`.
    pub fn free(interval: IndexInterval) -> Self {
        Self::new(interval, vec![1.0; interval.size() - 1], vec![0.0; interval.size()])
            .expect("free coefficients are valid")
    }

    pub fn interval(&self) -> IndexInterval {
        self.interval
    }

    pub fn size(&self) -> usize {
        self.interval.size()
    }

    /// Off-diagonal sequence on sites `lo..=hi-1`.
    pub fn a_seq(&self) -> &SiteSeq {
        &self.a
    }

    /// Diagonal sequence on sites `lo..=hi`.
    pub fn omega_seq(&self) -> &SiteSeq {
        &self.omega
    }

    pub fn a(&self, n: i64) -> f64 {
        self.a.at(n)
    }

    pub fn omega(&self, n: i64) -> f64 {
        self.omega.at(n)
    }

    /// Matrix-vector product over a slice keyed by offset from `lo`.
    pub fn apply_to<T: Scalar>(&self, xi: &[T]) -> Result<Vec<T>> {
        let n = self.size();
        if xi.len() != n {
            return Err(JacobiError::LengthMismatch {
                expected: n,
                got: xi.len(),
            });
        }
        let a = self.a.values();
        let w = self.omega.values();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = T::from(w[i]) * xi[i];
            if i > 0 {
                acc = acc + T::from(a[i - 1]) * xi[i - 1];
            }
            if i + 1 < n {
                acc = acc + T::from(a[i]) * xi[i + 1];
            }
            out.push(acc);
        }
        Ok(out)
    }

    /// `H xi` with boundary rows dropping the out-of-range neighbor term.
    pub fn apply(&self, xi: &SiteSeq) -> Result<SiteSeq> {
        if xi.start() != self.interval.lo() || xi.len() != self.size() {
            return Err(JacobiError::LengthMismatch {
                expected: self.size(),
                got: xi.len(),
            });
        }
        let out = self.apply_to(xi.values())?;
        Ok(SiteSeq::new(self.interval.lo(), out))
    }

    /// Restriction to a subinterval, as a standalone operator.
    pub fn submatrix(&self, sub: IndexInterval) -> Result<JacobiOperator> {
        if !self.interval.contains_interval(&sub) {
            return Err(JacobiError::NotContained {
                sub_lo: sub.lo(),
                sub_hi: sub.hi(),
                lo: self.interval.lo(),
                hi: self.interval.hi(),
            });
        }
        let a = (sub.lo()..sub.hi()).map(|n| self.a.at(n)).collect();
        let omega = sub.sites().map(|n| self.omega.at(n)).collect();
        JacobiOperator::new(sub, a, omega)
    }

    /// Gershgorin bound on the operator norm.
    pub fn norm_bound(&self) -> f64 {
        self.interval
            .sites()
            .map(|n| {
                let left = self.a.get(n - 1).unwrap_or(0.0).abs();
                let right = self.a.get(n).unwrap_or(0.0).abs();
                self.omega.at(n).abs() + left + right
            })
            .fold(0.0, f64::max)
    }

    /// Parses the JSON matrix format `{"lo", "hi", "a", "omega"}`.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let f: MatrixFile =
            serde_json::from_str(s).map_err(|e| JacobiError::BadMatrixFile(e.to_string()))?;
        Self::new(IndexInterval::new(f.lo, f.hi)?, f.a, f.omega)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&MatrixFile {
            lo: self.interval.lo(),
            hi: self.interval.hi(),
            a: self.a.values().to_vec(),
            omega: self.omega.values().to_vec(),
        })
        .expect("matrix serialization cannot fail")
    }
}
