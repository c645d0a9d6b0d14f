//! Reference computations that avoid the library's spectral code.

use tunnelopt::{CMatrix, Cx};

/// Ground-state projection by repeated squaring of `c·I - H` with
/// `c` above the spectrum; the normalized power converges to the rank-one
/// projector onto the lowest eigenvector.
pub fn ground_projection(h: &CMatrix<f64>) -> CMatrix<f64> {
    let n = h.nrows();
    let bound = h.iter().fold(0.0, |a, z| a + z.norm()) + 1.0;
    let mut a = CMatrix::<f64>::identity(n, n).scale(bound) - h;
    for _ in 0..60 {
        a = &a * &a;
        let tr = a.trace().re;
        a = a.map(|z| z / tr);
    }
    (&a + a.adjoint()).scale(0.5)
}

/// Central difference of a matrix-valued function.
pub fn central_difference(f: impl Fn(f64) -> CMatrix<f64>, q: f64, h: f64) -> CMatrix<f64> {
    (f(q + h) - f(q - h)).map(|z| z / Cx::new(2.0 * h, 0.0))
}

/// Eigenvalues and eigenprojections from nalgebra's Hermitian solver.
pub fn eigen_projections(h: &CMatrix<f64>) -> (Vec<f64>, Vec<CMatrix<f64>>) {
    let eig = nalgebra::SymmetricEigen::new(h.clone());
    let mut idx: Vec<usize> = (0..h.nrows()).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let projs = idx
        .iter()
        .map(|&i| {
            let v = eig.eigenvectors.column(i);
            &v * v.adjoint()
        })
        .collect();
    (vals, projs)
}
