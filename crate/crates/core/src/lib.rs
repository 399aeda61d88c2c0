//! Numerical toolkit for finite Jacobi (symmetric tridiagonal) operators with
//! random diagonal potentials.
//!
//! The crate is organized around a small set of objects:
//!
//! - [`operator`]: operators `H` on integer site intervals, built from a
//!   positive off-diagonal sequence `a` and a potential `omega`;
//! - [`eigen`]: full eigendecomposition of such operators, the finite stand-in
//!   for the family of spectral projections;
//! - [`poly`]: the fundamental solutions `c_m(z, n)`, `s_m(z, n)` of the
//!   three-term recurrence, Wronskians, and zeros of the `s`-polynomials;
//! - [`measure`]: atomic spectral measures, 2x2 matrix measures, and their
//!   trace-normalized Radon-Nikodym matrices;
//! - [`random`]: seeded per-site sampling of the potential from continuous
//!   distributions, including a singular-continuous (Cantor) one;
//! - [`experiment`]: reproducible Monte Carlo harnesses over eigenvalue
//!   collisions, measure equivalence, and related statistics.

pub mod eigen;
pub mod error;
pub mod experiment;
pub mod measure;
pub mod operator;
pub mod poly;
pub mod random;

pub use eigen::{eigendecompose, sturm_count, EigenDecomposition};
pub use error::{JacobiError, Result};
pub use measure::{
    absolutely_continuous, equivalent, matrix_measure, rn_matrix, site_measure, spectral_measure,
    AtomicMeasure, MatchTolerances, MatrixMeasure, RnMatrix,
};
pub use operator::{BasisIndex, IndexInterval, JacobiOperator, SiteSeq};
pub use poly::{fundamental_solutions, s_polynomial_zeros, wronskian, SolutionFamily, SolutionPair};
pub use random::{cantor_cdf, sample_potential, sample_value, DistributionSpec, PotentialModel, SeededSampler};

/// Scalar accepted by the recurrence kernels: `f64` for real spectral
/// parameters, `Complex64` for evaluation at complex ones.
pub trait Scalar:
    Copy
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
    + From<f64>
{
}

impl<T> Scalar for T where
    T: Copy
        + std::ops::Add<Output = T>
        + std::ops::Sub<Output = T>
        + std::ops::Mul<Output = T>
        + std::ops::Div<Output = T>
        + From<f64>
{
}
