//! Small dense linear-algebra helpers over complex matrices.
//!
//! Operators are stored as `DMatrix<Complex<T>>`. Superoperators act on
//! column-stacked vectorizations: `vec(A)` lists column 0 first, then
//! column 1, and so on, so that `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.

use nalgebra::{ComplexField, DMatrix, DVector, Vector3};

use crate::scalar::{cx, re, CMatrix, Cx, Real};

pub fn identity<T: Real>(n: usize) -> CMatrix<T> {
    CMatrix::identity(n, n)
}

/// Largest entry modulus.
pub fn max_abs<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(z.modulus()))
}

/// `max |A - A†|` entrywise.
pub fn hermitian_deviation<T: Real>(m: &CMatrix<T>) -> T {
    if !m.is_square() {
        return T::max_value().unwrap_or_else(T::one);
    }
    let n = m.nrows();
    let mut dev = T::zero();
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).modulus());
        }
    }
    dev
}

/// `(A + A†) / 2`.
pub fn hermitian_part<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    (m + m.adjoint()).scale(T::lit(0.5))
}

pub fn commutator<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    a * b - b * a
}

pub fn anticommutator<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    a * b + b * a
}

/// `tr(A B)` without forming the product.
pub fn trace_product<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Cx<T> {
    let n = a.nrows();
    let mut acc = Cx::new(T::zero(), T::zero());
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Smallest eigenvalue of a Hermitian matrix (the Hermitian part is used).
pub fn min_eigenvalue<T: Real>(m: &CMatrix<T>) -> T {
    let eig = nalgebra::SymmetricEigen::new(hermitian_part(m));
    eig.eigenvalues
        .iter()
        .copied()
        .fold(T::max_value().unwrap_or_else(T::one), |a, b| a.min(b))
}

/// Pauli matrices `(σx, σy, σz)`.
pub fn pauli<T: Real>() -> [CMatrix<T>; 3] {
    let (o, l) = (T::zero(), T::one());
    let sx = CMatrix::from_row_slice(2, 2, &[re(o), re(l), re(l), re(o)]);
    let sy = CMatrix::from_row_slice(2, 2, &[re(o), cx(o, -l), cx(o, l), re(o)]);
    let sz = CMatrix::from_row_slice(2, 2, &[re(l), re(o), re(o), re(-l)]);
    [sx, sy, sz]
}

/// `v · σ` for a real 3-vector.
pub fn bloch_operator<T: Real>(v: &Vector3<T>) -> CMatrix<T> {
    let (x, y, z) = (v.x, v.y, v.z);
    CMatrix::from_row_slice(2, 2, &[re(z), cx(x, -y), cx(x, y), re(-z)])
}

/// Bloch vector `(tr ρσx, tr ρσy, tr ρσz)` of a 2×2 operator.
pub fn bloch_vector<T: Real>(rho: &CMatrix<T>) -> Vector3<T> {
    let two = T::lit(2.0);
    Vector3::new(
        two * rho[(0, 1)].re,
        two * rho[(1, 0)].im,
        rho[(0, 0)].re - rho[(1, 1)].re,
    )
}

/// Column-stacking vectorization.
pub fn vectorize<T: Real>(m: &CMatrix<T>) -> DVector<Cx<T>> {
    DVector::from_column_slice(m.as_slice())
}

/// Inverse of [`vectorize`] for an `n × n` operator.
pub fn unvectorize<T: Real>(v: &DVector<Cx<T>>, n: usize) -> CMatrix<T> {
    CMatrix::from_column_slice(n, n, v.as_slice())
}

/// Matrix exponential by scaling and squaring with a Taylor core.
///
/// The input is scaled so that its 1-norm is at most 1/2, the series is
/// summed until terms fall below machine precision, and the result is
/// squared back.
pub fn expm<T: Real>(a: &CMatrix<T>) -> CMatrix<T> {
    assert!(a.is_square(), "expm of a non-square matrix");
    let n = a.nrows();
    let norm1 = (0..n)
        .map(|j| a.column(j).iter().fold(T::zero(), |s, z| s + z.modulus()))
        .fold(T::zero(), |x, y| x.max(y));
    let half = T::lit(0.5);
    let mut squarings = 0u32;
    let mut scale = T::one();
    while norm1 * scale > half {
        scale *= half;
        squarings += 1;
    }
    let scaled = a.map(|z| z * re(scale));
    let mut result = identity::<T>(n);
    let mut term = identity::<T>(n);
    let eps = T::default_epsilon();
    for k in 1..=40 {
        term = (&term * &scaled).map(|z| z / re(T::from_count(k)));
        result += &term;
        if max_abs(&term) <= eps * max_abs(&result) {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Promotes a real matrix to a complex one.
pub fn complexify<T: Real>(m: &DMatrix<T>) -> CMatrix<T> {
    m.map(re)
}
