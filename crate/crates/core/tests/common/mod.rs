//! Seeded fixtures shared by the integration tests.
#![allow(dead_code)]

pub mod oracle;

use std::sync::Arc;

use nalgebra::{DMatrix, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tunnelopt::paths::{bloch_path, linear_path, BlochPath, LinearPath};
use tunnelopt::{CMatrix, Cx, HermitianOperator};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Hermitian part of a matrix with entries uniform in the unit square.
pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix<f64> {
    let a = CMatrix::<f64>::from_fn(n, n, |_, _| Cx::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    (&a + a.adjoint()).scale(0.5)
}

pub fn random_operator(rng: &mut ChaCha8Rng, n: usize) -> CMatrix<f64> {
    CMatrix::<f64>::from_fn(n, n, |_, _| Cx::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// Random density matrix `B B† / tr(B B†)`.
pub fn random_density(rng: &mut ChaCha8Rng, n: usize) -> CMatrix<f64> {
    let b = random_operator(rng, n);
    let m = &b * b.adjoint();
    let tr = m.trace().re;
    m.map(|z| z / tr)
}

/// Random positive semidefinite rate matrix `B Bᵀ`.
pub fn random_psd(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let b = DMatrix::<f64>::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    &b * b.transpose()
}

pub fn random_linear_path(rng: &mut ChaCha8Rng, n: usize) -> LinearPath<f64> {
    let h0 = HermitianOperator::new(random_hermitian(rng, n)).unwrap();
    let h1 = HermitianOperator::new(random_hermitian(rng, n)).unwrap();
    linear_path(h0, h1).unwrap()
}

/// `g(q) = (q, 0, 1 - q)`: minimal gap `1/√2` at `q = 1/2`, `|ĝ'| = 1/g²`.
pub fn chord_path() -> BlochPath<f64> {
    bloch_path(
        Arc::new(|q: f64| Vector3::new(q, 0.0, 1.0 - q)),
        Arc::new(|_| Vector3::new(1.0, 0.0, -1.0)),
    )
    .unwrap()
}

/// `g(q) = (sin q, 0, cos q)`.
pub fn unit_arc_path() -> BlochPath<f64> {
    bloch_path(
        Arc::new(|q: f64| Vector3::new(q.sin(), 0.0, q.cos())),
        Arc::new(|q: f64| Vector3::new(q.cos(), 0.0, -q.sin())),
    )
    .unwrap()
}

pub fn max_abs(m: &CMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}
