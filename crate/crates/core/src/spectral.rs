//! Spectral decomposition of Hermitian operators and gauge-invariant
//! projection derivatives.
//!
//! Frames expose spectral projections rather than eigenvectors, so every
//! quantity derived from them is independent of eigenvector phases.

use nalgebra::{ComplexField, DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_deviation};
use crate::scalar::{re, CMatrix, Real};

/// Default minimum spacing between consecutive eigenvalues.
pub const DEFAULT_GAP_TOL: f64 = 1e-10;

/// A dense Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator<T: Real> {
    matrix: CMatrix<T>,
}

impl<T: Real> HermitianOperator<T> {
    /// Validates Hermiticity (`max |A - A†| ≤ 1e-12`, or a few ulps for `f32`).
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        let scale = T::one().max(linalg::max_abs(&matrix));
        let deviation = hermitian_deviation(&matrix);
        if deviation > T::rounding_tol(1e-12) * scale {
            return Err(Error::NotHermitian { deviation: deviation.as_f64() });
        }
        Ok(Self { matrix })
    }

    /// Takes the Hermitian part of `matrix` without validation. Used for
    /// results that are Hermitian up to rounding.
    pub fn from_hermitian_part(matrix: &CMatrix<T>) -> Self {
        Self { matrix: linalg::hermitian_part(matrix) }
    }

    pub fn from_real_symmetric(matrix: &DMatrix<T>) -> Result<Self> {
        Self::new(linalg::complexify(matrix))
    }

    pub fn diagonal(values: &[T]) -> Self {
        let n = values.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = re(*v);
        }
        Self { matrix: m }
    }

    pub fn zeros(n: usize) -> Self {
        Self { matrix: CMatrix::zeros(n, n) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn scale(&self, factor: T) -> Self {
        Self { matrix: self.matrix.map(|z| z * re(factor)) }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: T, other: &Self, b: T) -> Self {
        Self { matrix: self.matrix.map(|z| z * re(a)) + other.matrix.map(|z| z * re(b)) }
    }
}

/// Ordered simple eigenvalues of a Hermitian operator and the matching
/// orthogonal spectral projections.
#[derive(Debug, Clone)]
pub struct SpectralFrame<T: Real> {
    q: Option<T>,
    eigenvalues: Vec<T>,
    projections: Vec<CMatrix<T>>,
    // Columns are eigenvectors in ascending eigenvalue order. Phases are
    // arbitrary; only used for basis changes whose results are gauge invariant.
    eigenvectors: CMatrix<T>,
}

/// Diagonalizes `h`, requiring every consecutive gap to exceed `gap_tol`.
pub fn spectral_frame<T: Real>(h: &HermitianOperator<T>, gap_tol: T) -> Result<SpectralFrame<T>> {
    let n = h.dim();
    let eig = SymmetricEigen::new(h.matrix().clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let eigenvalues: Vec<T> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    if eigenvalues.iter().any(|e| !e.is_finite()) {
        return Err(Error::InvalidInput("non-finite eigenvalue".into()));
    }
    for (index, pair) in eigenvalues.windows(2).enumerate() {
        let gap = pair[1] - pair[0];
        if gap <= gap_tol {
            return Err(Error::DegenerateSpectrum { index, gap: gap.as_f64() });
        }
    }
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        eigenvectors.set_column(k, &eig.eigenvectors.column(i));
    }
    let projections = (0..n)
        .map(|k| {
            let v = eigenvectors.column(k);
            &v * v.adjoint()
        })
        .collect();
    Ok(SpectralFrame { q: None, eigenvalues, projections, eigenvectors })
}

impl<T: Real> SpectralFrame<T> {
    pub fn with_q(mut self, q: T) -> Self {
        self.q = Some(q);
        self
    }

    pub fn q(&self) -> Option<T> {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn projection(&self, a: usize) -> &CMatrix<T> {
        &self.projections[a]
    }

    pub fn projections(&self) -> &[CMatrix<T>] {
        &self.projections
    }

    pub(crate) fn eigenvectors(&self) -> &CMatrix<T> {
        &self.eigenvectors
    }

    /// Smallest spacing between consecutive eigenvalues.
    pub fn min_gap(&self) -> T {
        self.eigenvalues
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(T::max_value().unwrap_or_else(T::one), |a, b| a.min(b))
    }

    /// `Σ_a e_a P_a`.
    pub fn reconstruct(&self) -> CMatrix<T> {
        let n = self.dim();
        self.projections
            .iter()
            .zip(&self.eigenvalues)
            .fold(CMatrix::zeros(n, n), |acc, (p, &e)| acc + p.map(|z| z * re(e)))
    }

    /// Derivative of the `a`-th projection given the derivative `dh` of the
    /// operator, by first-order perturbation theory:
    /// `P'_a = Σ_{b≠a} (P_b H' P_a + P_a H' P_b) / (e_a - e_b)`.
    pub fn projection_derivative(&self, dh: &HermitianOperator<T>, a: usize) -> Result<HermitianOperator<T>> {
        if dh.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: dh.dim() });
        }
        if a >= self.dim() {
            return Err(Error::InvalidInput(format!("level {a} out of range")));
        }
        // Work in the eigenbasis: (V† H' V)_{ba} carries P_b H' P_a.
        let v = &self.eigenvectors;
        let dh_eig = v.adjoint() * dh.matrix() * v;
        let n = self.dim();
        let mut block = CMatrix::zeros(n, n);
        for b in (0..n).filter(|&b| b != a) {
            let inv = re(T::one() / (self.eigenvalues[a] - self.eigenvalues[b]));
            block[(b, a)] = dh_eig[(b, a)] * inv;
            block[(a, b)] = dh_eig[(a, b)] * inv;
        }
        Ok(HermitianOperator::from_hermitian_part(&(v * block * v.adjoint())))
    }

    /// Largest violation of idempotence, orthonormality, completeness and
    /// reconstruction against `h`.
    pub fn invariant_residual(&self, h: &HermitianOperator<T>) -> T {
        let n = self.dim();
        let mut worst = T::zero();
        for (a, pa) in self.projections.iter().enumerate() {
            worst = worst.max(linalg::max_abs(&(pa * pa - pa)));
            for (b, pb) in self.projections.iter().enumerate() {
                let target = if a == b { T::one() } else { T::zero() };
                worst = worst.max((linalg::trace_product(pa, pb) - re(target)).modulus());
            }
        }
        let sum = self.projections.iter().fold(CMatrix::zeros(n, n), |acc, p| acc + p);
        worst = worst.max(linalg::max_abs(&(sum - linalg::identity::<T>(n))));
        worst.max(linalg::max_abs(&(self.reconstruct() - h.matrix())))
    }
}
