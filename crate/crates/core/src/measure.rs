//! Atomic spectral measures and their matrix-valued refinements.
//!
//! For a finite operator the measure `mu_phi(.) = <phi, E(.) phi>` is purely
//! atomic: one atom per eigenvalue with weight `<v_j, phi>^2`. Zero-weight
//! atoms are kept so that a failed equivalence can name the exact spectral
//! point responsible. The 2x2 matrix measure built from two consecutive
//! sites has rank-one atoms; its trace-normalized atom is the Radon-Nikodym
//! matrix `R_m = [[a, b], [b, 1-a]]` with respect to `mu_m + mu_{m+1}`, and
//! `g_{(m,n)}(lambda) = <R_m p, p>` with `p = (c_{m+1}(lambda, n),
//! s_{m+1}(lambda, n))` transports weights between sites.

use std::io::Write;

use crate::eigen::EigenDecomposition;
use crate::error::{JacobiError, Result};
use crate::operator::{BasisIndex, SiteSeq};
use crate::poly::{c_value, s_value};

/// Location/weight pair of one atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub weight: f64,
}

/// Finite positive measure supported on finitely many points.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    atoms: Vec<Atom>,
}

impl AtomicMeasure {
    /// Sorts by location; exact duplicates merge by adding weights.
    pub fn new(mut atoms: Vec<Atom>) -> Result<Self> {
        for atom in &atoms {
            let ok = atom.weight.is_finite() && atom.weight >= 0.0;
            if !ok {
                return Err(JacobiError::NegativeWeight {
                    location: atom.location,
                    weight: atom.weight,
                });
            }
        }
        atoms.sort_by(|x, y| x.location.total_cmp(&y.location));
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for atom in atoms {
            match merged.last_mut() {
                Some(last) if last.location == atom.location => last.weight += atom.weight,
                _ => merged.push(atom),
            }
        }
        Ok(Self { atoms: merged })
    }

    pub fn empty() -> Self {
        Self { atoms: Vec::new() }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    /// Mass within `tol` of `location`.
    pub fn weight_near(&self, location: f64, tol: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|a| (a.location - location).abs() <= tol)
            .map(|a| a.weight)
            .sum()
    }

    /// Measure of a finite target set: mass of all atoms within `tol` of any
    /// target point.
    pub fn measure_of(&self, targets: &[f64], tol: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|a| targets.iter().any(|t| (a.location - t).abs() <= tol))
            .map(|a| a.weight)
            .sum()
    }

    /// Spread of the support (0 for fewer than two atoms).
    pub fn support_diameter(&self) -> f64 {
        match (self.atoms.first(), self.atoms.last()) {
            (Some(first), Some(last)) => last.location - first.location,
            _ => 0.0,
        }
    }

    /// Pointwise sum; atoms at bitwise-equal locations merge.
    pub fn sum(&self, other: &AtomicMeasure) -> AtomicMeasure {
        let mut atoms = self.atoms.clone();
        atoms.extend_from_slice(&other.atoms);
        AtomicMeasure::new(atoms).expect("weights already validated")
    }

    /// CSV dump, columns `location,weight`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "location,weight")?;
        for atom in &self.atoms {
            writeln!(w, "{:?},{:?}", atom.location, atom.weight)?;
        }
        Ok(())
    }
}

/// Atom-weight floor and location-matching scale used by the equivalence
/// predicates. `tol_match_rel` is relative to the support diameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchTolerances {
    pub tol_atom: f64,
    pub tol_match_rel: f64,
}

impl Default for MatchTolerances {
    fn default() -> Self {
        Self {
            tol_atom: 1e-12,
            tol_match_rel: 1e-8,
        }
    }
}

impl MatchTolerances {
    pub fn match_tol_for(&self, diameter: f64) -> f64 {
        self.tol_match_rel * diameter
    }
}

/// `mu_phi`: one atom per eigenvalue with weight `<v_j, phi>^2`.
pub fn spectral_measure(ed: &EigenDecomposition, phi: &SiteSeq) -> Result<AtomicMeasure> {
    if phi.start() != ed.interval().lo() || phi.len() != ed.size() {
        return Err(JacobiError::LengthMismatch {
            expected: ed.size(),
            got: phi.len(),
        });
    }
    if phi.values().iter().all(|&x| x == 0.0) {
        return Err(JacobiError::ZeroVector);
    }
    let atoms = (0..ed.size())
        .map(|j| {
            let overlap: f64 = ed
                .vector(j)
                .iter()
                .zip(phi.values())
                .map(|(v, p)| v * p)
                .sum();
            Atom {
                location: ed.eigenvalues()[j],
                weight: overlap * overlap,
            }
        })
        .collect();
    AtomicMeasure::new(atoms)
}

/// `mu_n = mu_{delta_n}`.
pub fn site_measure(ed: &EigenDecomposition, site: BasisIndex) -> Result<AtomicMeasure> {
    let phi = SiteSeq::delta(ed.interval(), site.0)?;
    spectral_measure(ed, &phi)
}

/// Per-form maxima of the semi-infinite relation residuals at one site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemiInfiniteResiduals {
    /// max over atoms of `|mu_n({l}) - s_lo(l, n)^2 mu_lo({l})|`
    pub s_form: f64,
    /// max over atoms of `|mu_n({l}) - c_{hi+1}(l, n)^2 mu_hi({l})|`
    pub c_form: f64,
}

/// Checks the semi-infinite expressions for `mu_n` against both edges of a
/// finite operator: through `s_lo` anchored at the lower edge and through
/// `c_{hi+1}` anchored at the upper edge.
pub fn check_semiinfinite_relation(
    op: &crate::operator::JacobiOperator,
    ed: &EigenDecomposition,
    site: i64,
) -> Result<SemiInfiniteResiduals> {
    let interval = op.interval();
    if !interval.contains(site) {
        return Err(JacobiError::RangeError {
            site,
            lo: interval.lo(),
            hi: interval.hi(),
        });
    }
    let (lo, hi) = (interval.lo(), interval.hi());
    let mut s_form = 0.0f64;
    let mut c_form = 0.0f64;
    for j in 0..ed.size() {
        let lambda = ed.eigenvalues()[j];
        let w_site = ed.vector_component(j, site).powi(2);
        let w_lo = ed.vector_component(j, lo).powi(2);
        let w_hi = ed.vector_component(j, hi).powi(2);
        let s = s_value(op.a_seq(), op.omega_seq(), lo, lambda, site)?;
        let c = c_value(op.a_seq(), op.omega_seq(), hi + 1, lambda, site)?;
        s_form = s_form.max((w_site - s * s * w_lo).abs());
        c_form = c_form.max((w_site - c * c * w_hi).abs());
    }
    Ok(SemiInfiniteResiduals { s_form, c_form })
}

/// One atom of the 2x2 matrix measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixAtom {
    pub location: f64,
    pub m11: f64,
    pub m12: f64,
    pub m22: f64,
}

impl MatrixAtom {
    pub fn trace(&self) -> f64 {
        self.m11 + self.m22
    }
}

/// Matrix measure built from sites `m`, `m+1`: the atom at `lambda_j` is the
/// outer product of `(v_j(m), v_j(m+1))` with itself.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixMeasure {
    site: i64,
    atoms: Vec<MatrixAtom>,
}

impl MatrixMeasure {
    /// Lower of the two sites.
    pub fn site(&self) -> i64 {
        self.site
    }

    pub fn atoms(&self) -> &[MatrixAtom] {
        &self.atoms
    }

    pub fn support_diameter(&self) -> f64 {
        match (self.atoms.first(), self.atoms.last()) {
            (Some(first), Some(last)) => last.location - first.location,
            _ => 0.0,
        }
    }

    /// CSV dump, columns `location,m11,m12,m22`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "location,m11,m12,m22")?;
        for atom in &self.atoms {
            writeln!(
                w,
                "{:?},{:?},{:?},{:?}",
                atom.location, atom.m11, atom.m12, atom.m22
            )?;
        }
        Ok(())
    }
}

pub fn matrix_measure(ed: &EigenDecomposition, m: i64) -> Result<MatrixMeasure> {
    let interval = ed.interval();
    if !interval.contains(m) || !interval.contains(m + 1) {
        return Err(JacobiError::RangeError {
            site: m,
            lo: interval.lo(),
            hi: interval.hi() - 1,
        });
    }
    let atoms = (0..ed.size())
        .map(|j| {
            let x = ed.vector_component(j, m);
            let y = ed.vector_component(j, m + 1);
            MatrixAtom {
                location: ed.eigenvalues()[j],
                m11: x * x,
                m12: x * y,
                m22: y * y,
            }
        })
        .collect();
    Ok(MatrixMeasure { site: m, atoms })
}

/// Trace-one PSD matrix `[[a, b], [b, 1-a]]`: the density of the matrix
/// measure with respect to `mu_m + mu_{m+1}` at one atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RnMatrix {
    pub location: f64,
    pub a: f64,
    pub b: f64,
}

impl RnMatrix {
    pub fn entries(&self) -> [[f64; 2]; 2] {
        [[self.a, self.b], [self.b, 1.0 - self.a]]
    }

    /// `<R p, p>` for a real 2-vector.
    pub fn quadratic_form(&self, p: [f64; 2]) -> f64 {
        self.a * p[0] * p[0] + 2.0 * self.b * p[0] * p[1] + (1.0 - self.a) * p[1] * p[1]
    }
}

/// Normalizes the matrix atom nearest `location` by its trace. The trace is
/// `(mu_m + mu_{m+1})({lambda})`; where it vanishes, the density is undefined
/// and `NullAtom` is returned.
pub fn rn_matrix(mm: &MatrixMeasure, location: f64, tol: &MatchTolerances) -> Result<RnMatrix> {
    let match_tol = tol.match_tol_for(mm.support_diameter());
    let atom = mm
        .atoms
        .iter()
        .min_by(|x, y| {
            (x.location - location)
                .abs()
                .total_cmp(&(y.location - location).abs())
        })
        .filter(|atom| (atom.location - location).abs() <= match_tol)
        .ok_or(JacobiError::NullAtom {
            location,
            mass: 0.0,
            tol: tol.tol_atom,
        })?;
    let trace = atom.trace();
    if trace <= tol.tol_atom {
        return Err(JacobiError::NullAtom {
            location,
            mass: trace,
            tol: tol.tol_atom,
        });
    }
    Ok(RnMatrix {
        location: atom.location,
        a: atom.m11 / trace,
        b: atom.m12 / trace,
    })
}

/// `g_{(m,n)}(lambda) = <R_m(lambda) p, p>`, `p = (c_{m+1}(lambda, n),
/// s_{m+1}(lambda, n))`; transports `(mu_m + mu_{m+1})({lambda})` to
/// `mu_n({lambda})`.
pub fn g_factor(
    a: &SiteSeq,
    omega: &SiteSeq,
    m: i64,
    n: i64,
    rn: &RnMatrix,
) -> Result<f64> {
    let lambda = rn.location;
    let c = c_value(a, omega, m + 1, lambda, n)?;
    let s = s_value(a, omega, m + 1, lambda, n)?;
    Ok(rn.quadratic_form([c, s]))
}

/// `mu` absolutely continuous with respect to `nu`: every atom of `mu` with
/// mass above the floor has a matching atom of `nu` (within the location
/// tolerance) with mass above the floor.
pub fn absolutely_continuous(mu: &AtomicMeasure, nu: &AtomicMeasure, tol: &MatchTolerances) -> bool {
    let diameter = mu.support_diameter().max(nu.support_diameter());
    let match_tol = tol.match_tol_for(diameter);
    mu.atoms()
        .iter()
        .filter(|atom| atom.weight > tol.tol_atom)
        .all(|atom| {
            nu.atoms().iter().any(|other| {
                (other.location - atom.location).abs() <= match_tol
                    && other.weight > tol.tol_atom
            })
        })
}

/// Mutual absolute continuity.
pub fn equivalent(mu: &AtomicMeasure, nu: &AtomicMeasure, tol: &MatchTolerances) -> bool {
    absolutely_continuous(mu, nu, tol) && absolutely_continuous(nu, mu, tol)
}
