//! Dephasing Lindblad generators and the integrator for `ε ρ̇ = L_q(ρ)`.
//!
//! Superoperators are stored as `N² × N²` matrices acting on column-stacked
//! operators (see [`crate::linalg::vectorize`]). With that convention
//! `A ρ B` corresponds to the matrix `Bᵀ ⊗ A`.
//!
//! A dephasing generator acts diagonally on the blocks `P_a ρ P_b` of its
//! own eigenframe, `L(P_a ρ P_b) = λ_ab P_a ρ P_b`, which makes the
//! exponential of a frozen generator exact and cheap. [`evolve`] uses this
//! for its exponential-midpoint steps.

use std::fmt;
use std::sync::Arc;

use nalgebra::{ComplexField, DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::linalg::{self, identity, max_abs, min_eigenvalue};
use crate::paths::{HamiltonianPath, Schedule};
use crate::scalar::{cx, re, CMatrix, Real};
use crate::spectral::{HermitianOperator, SpectralFrame};

/// A validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Real> {
    matrix: CMatrix<T>,
}

/// Deviations of a state from the density-matrix invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hygiene<T> {
    pub trace_error: T,
    pub hermiticity_error: T,
    pub min_eigenvalue: T,
}

impl<T: Real> Hygiene<T> {
    pub fn of(m: &CMatrix<T>) -> Self {
        Self {
            trace_error: (m.trace() - re(T::one())).modulus(),
            hermiticity_error: linalg::hermitian_deviation(m),
            min_eigenvalue: min_eigenvalue(m),
        }
    }

    /// `None` if all three bounds hold, otherwise a description of the first violation.
    pub fn violation(&self, trace_tol: T, herm_tol: T, min_eig: T) -> Option<String> {
        if !(self.trace_error <= trace_tol) {
            Some(format!("trace error {:e}", self.trace_error.as_f64()))
        } else if !(self.hermiticity_error <= herm_tol) {
            Some(format!("hermiticity error {:e}", self.hermiticity_error.as_f64()))
        } else if !(self.min_eigenvalue >= min_eig) {
            Some(format!("negative eigenvalue {:e}", self.min_eigenvalue.as_f64()))
        } else {
            None
        }
    }
}

impl<T: Real> DensityMatrix<T> {
    /// Validates with trace and Hermiticity tolerance `1e-10` and minimum
    /// eigenvalue `-1e-8`.
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        let tol = T::rounding_tol(1e-10);
        if let Some(reason) = Hygiene::of(&matrix).violation(tol, tol, -T::rounding_tol(1e-8)) {
            return Err(Error::InvalidState { s: 0.0, reason });
        }
        Ok(Self { matrix })
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self { matrix: identity::<T>(n).map(|z| z / re(T::from_count(n))) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn hygiene(&self) -> Hygiene<T> {
        Hygiene::of(&self.matrix)
    }

    /// `tr(A ρ)`, real part.
    pub fn expectation(&self, a: &CMatrix<T>) -> T {
        linalg::trace_product(a, &self.matrix).re
    }
}

pub type RateFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Grid on which scalar rates are checked for positivity.
pub const RATE_GRID_POINTS: usize = 1001;

/// Dephasing attached to a path.
#[derive(Clone)]
pub enum DephasingModel<T: Real> {
    /// No dephasing; the evolution is unitary.
    Unitary,
    /// `γ(q)` times the identity matrix of rates, in the form
    /// `L(ρ) = -i[H, ρ] - γ Σ_{j≠k} P_j ρ P_k`.
    Scalar(RateFn<T>),
    /// A constant positive semidefinite rate matrix `γ_ba` with its square
    /// root `√γ`, whose rows define the jump operators `Γ_j = Σ_a √γ_ja P_a`.
    Matrix { gamma: DMatrix<T>, jump_factor: DMatrix<T> },
}

impl<T: Real> fmt::Debug for DephasingModel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Unitary => f.write_str("Unitary"),
            Self::Scalar(_) => f.write_str("Scalar(..)"),
            Self::Matrix { gamma, .. } => f.debug_struct("Matrix").field("gamma", gamma).finish(),
        }
    }
}

impl<T: Real> DephasingModel<T> {
    pub fn unitary() -> Self {
        Self::Unitary
    }

    /// Constant scalar rate `γ > 0`.
    pub fn constant(gamma: T) -> Result<Self> {
        if !(gamma > T::zero()) || !gamma.is_finite() {
            return Err(Error::NonPositiveRate { value: gamma.as_f64() });
        }
        Ok(Self::Scalar(Arc::new(move |_| gamma)))
    }

    /// `q`-dependent scalar rate; must be positive on a uniform grid.
    pub fn scalar(rate: RateFn<T>) -> Result<Self> {
        for i in 0..RATE_GRID_POINTS {
            let q = T::from_count(i) / T::from_count(RATE_GRID_POINTS - 1);
            let g = rate(q);
            if !(g > T::zero()) || !g.is_finite() {
                return Err(Error::NonPositiveRate { value: g.as_f64() });
            }
        }
        Ok(Self::Scalar(rate))
    }

    /// Matrix of rates; must be symmetric positive semidefinite.
    pub fn matrix(gamma: DMatrix<T>) -> Result<Self> {
        let jump_factor = psd_sqrt(&gamma)?;
        Ok(Self::Matrix { gamma, jump_factor })
    }

    /// Scalar rate at `q` (`None` for the unitary and matrix modes).
    pub fn rate(&self, q: T) -> Option<T> {
        match self {
            Self::Scalar(f) => Some(f(q)),
            _ => None,
        }
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        match self {
            Self::Matrix { gamma, .. } if gamma.nrows() != n => {
                Err(Error::DimensionMismatch { expected: n, found: gamma.nrows() })
            }
            _ => Ok(()),
        }
    }

    /// Decay rate `d_ab` of the coherence block `P_a ρ P_b`, so that
    /// `L(P_a ρ P_b) = (-i(e_a - e_b) - d_ab) P_a ρ P_b`.
    pub fn coherence_decay(&self, n: usize, q: T) -> DMatrix<T> {
        match self {
            Self::Unitary => DMatrix::zeros(n, n),
            Self::Scalar(f) => {
                let g = f(q);
                DMatrix::from_fn(n, n, |a, b| if a == b { T::zero() } else { g })
            }
            Self::Matrix { gamma, .. } => DMatrix::from_fn(n, n, |a, b| {
                if a == b {
                    T::zero()
                } else {
                    gamma[(a, a)] + gamma[(b, b)] - T::lit(2.0) * gamma[(b, a)]
                }
            }),
        }
    }
}

/// Symmetric square root of a positive semidefinite real matrix.
fn psd_sqrt<T: Real>(gamma: &DMatrix<T>) -> Result<DMatrix<T>> {
    if !gamma.is_square() {
        return Err(Error::DimensionMismatch { expected: gamma.nrows(), found: gamma.ncols() });
    }
    let asym = (gamma - gamma.transpose()).abs().max();
    if asym > T::rounding_tol(1e-12) * (T::one() + gamma.abs().max()) {
        return Err(Error::InvalidInput("rate matrix is not symmetric".into()));
    }
    let eig = SymmetricEigen::new((gamma + gamma.transpose()) * T::lit(0.5));
    let min = eig.eigenvalues.min();
    if min < -T::rounding_tol(1e-12) {
        return Err(Error::NotPsd { min_eigenvalue: min.as_f64() });
    }
    let sqrt_vals = eig.eigenvalues.map(|v| v.max(T::zero()).sqrt());
    Ok(&eig.eigenvectors * DMatrix::from_diagonal(&sqrt_vals) * eig.eigenvectors.transpose())
}

/// A linear map on `N × N` operators, as an `N² × N²` matrix in the
/// column-stacking convention.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator<T: Real> {
    n: usize,
    matrix: CMatrix<T>,
}

impl<T: Real> Superoperator<T> {
    pub fn from_matrix(n: usize, matrix: CMatrix<T>) -> Result<Self> {
        if matrix.nrows() != n * n || matrix.ncols() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: matrix.nrows() });
        }
        Ok(Self { n, matrix })
    }

    /// Operator dimension `N` (the matrix is `N² × N²`).
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn apply(&self, rho: &CMatrix<T>) -> Result<CMatrix<T>> {
        if rho.nrows() != self.n || rho.ncols() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: rho.nrows() });
        }
        Ok(linalg::unvectorize(&(&self.matrix * linalg::vectorize(rho)), self.n))
    }

    /// Heisenberg-picture dual: the operator `L*(A)` with
    /// `tr(L*(A) ρ) = tr(A L(ρ))` for every `ρ`.
    pub fn adjoint_apply(&self, a: &CMatrix<T>) -> Result<CMatrix<T>> {
        if a.nrows() != self.n || a.ncols() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: a.nrows() });
        }
        // tr(A L(ρ)) = vec(Aᵀ)ᵀ L vec(ρ), hence vec(L*(A)ᵀ) = Lᵀ vec(Aᵀ).
        let v = self.matrix.transpose() * linalg::vectorize(&a.transpose());
        Ok(linalg::unvectorize(&v, self.n).transpose())
    }

    /// `exp(t L)` as a superoperator.
    pub fn exp(&self, t: T) -> Self {
        Self { n: self.n, matrix: linalg::expm(&self.matrix.map(|z| z * re(t))) }
    }

    /// `max_k |Σ_i L_(ii),k|`: how far `tr L(ρ)` is from vanishing.
    pub fn trace_residual(&self) -> T {
        let n = self.n;
        (0..n * n)
            .map(|k| (0..n).fold(cx(T::zero(), T::zero()), |acc, i| acc + self.matrix[(i * n + i, k)]).modulus())
            .fold(T::zero(), |a, b| a.max(b))
    }
}

fn left<T: Real>(a: &CMatrix<T>) -> CMatrix<T> {
    identity::<T>(a.nrows()).kronecker(a)
}

fn right<T: Real>(b: &CMatrix<T>) -> CMatrix<T> {
    b.transpose().kronecker(&identity::<T>(b.nrows()))
}

/// `ρ ↦ -i[H, ρ]`.
pub fn hamiltonian_generator<T: Real>(h: &HermitianOperator<T>) -> Superoperator<T> {
    let m = (left(h.matrix()) - right(h.matrix())).map(|z| z * cx(T::zero(), -T::one()));
    Superoperator { n: h.dim(), matrix: m }
}

/// General Lindblad form
/// `L(ρ) = -i[H, ρ] + Σ_j (2 Γ_j ρ Γ_j† - Γ_j†Γ_j ρ - ρ Γ_j†Γ_j)`.
pub fn lindblad_generator<T: Real>(h: &HermitianOperator<T>, jumps: &[CMatrix<T>]) -> Result<Superoperator<T>> {
    let n = h.dim();
    let mut gen = hamiltonian_generator(h);
    for g in jumps {
        if g.nrows() != n || g.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: g.nrows() });
        }
        let gdg = g.adjoint() * g;
        // Γ ρ Γ† ↔ (Γ†)ᵀ ⊗ Γ = conj(Γ) ⊗ Γ
        let sandwich = g.conjugate().kronecker(g).map(|z| z * re(T::lit(2.0)));
        gen.matrix += sandwich - left(&gdg) - right(&gdg);
    }
    Ok(gen)
}

/// Dephasing generator with a positive semidefinite rate matrix:
/// `L(ρ) = -i[H, ρ] + Σ_ab 2γ_ba P_a ρ P_b - Σ_a γ_aa {P_a, ρ}`.
pub fn general_dephasing_generator<T: Real>(frame: &SpectralFrame<T>, gamma: &DMatrix<T>) -> Result<Superoperator<T>> {
    let n = frame.dim();
    if gamma.nrows() != n || gamma.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: gamma.nrows() });
    }
    psd_sqrt(gamma)?;
    let h = HermitianOperator::from_hermitian_part(&frame.reconstruct());
    let mut gen = hamiltonian_generator(&h);
    let p = frame.projections();
    for a in 0..n {
        for b in 0..n {
            let w = T::lit(2.0) * gamma[(b, a)];
            if w != T::zero() {
                gen.matrix += p[b].transpose().kronecker(&p[a]).map(|z| z * re(w));
            }
        }
        let g = gamma[(a, a)];
        if g != T::zero() {
            gen.matrix -= (left(&p[a]) + right(&p[a])).map(|z| z * re(g));
        }
    }
    Ok(gen)
}

/// Scalar-rate dephasing generator `L(ρ) = -i[H, ρ] - γ Σ_{j≠k} P_j ρ P_k`.
pub fn dephasing_generator<T: Real>(frame: &SpectralFrame<T>, gamma: T) -> Result<Superoperator<T>> {
    if !(gamma > T::zero()) {
        return Err(Error::NonPositiveRate { value: gamma.as_f64() });
    }
    let h = HermitianOperator::from_hermitian_part(&frame.reconstruct());
    let mut gen = hamiltonian_generator(&h);
    let p = frame.projections();
    for j in 0..frame.dim() {
        for k in (0..frame.dim()).filter(|&k| k != j) {
            gen.matrix -= p[k].transpose().kronecker(&p[j]).map(|z| z * re(gamma));
        }
    }
    Ok(gen)
}

/// Generator of a [`DephasingModel`] at a frame (rates evaluated at the frame's `q`).
pub fn model_generator<T: Real>(frame: &SpectralFrame<T>, model: &DephasingModel<T>) -> Result<Superoperator<T>> {
    model.check_dim(frame.dim())?;
    match model {
        DephasingModel::Unitary => Ok(hamiltonian_generator(&HermitianOperator::from_hermitian_part(&frame.reconstruct()))),
        DephasingModel::Scalar(f) => dephasing_generator(frame, f(frame.q().unwrap_or_else(T::zero))),
        DephasingModel::Matrix { gamma, .. } => general_dephasing_generator(frame, gamma),
    }
}

/// Free-function form of [`Superoperator::adjoint_apply`].
pub fn adjoint_apply<T: Real>(l: &Superoperator<T>, a: &CMatrix<T>) -> Result<CMatrix<T>> {
    l.adjoint_apply(a)
}

/// Witness operator `X = Σ_{a≠b} P_a P'₀ P_b / (i(e_a - e_b) - γ)`, the
/// solution of `L*(X) = P'₀` for the scalar dephasing generator.
pub fn witness_x<T: Real>(frame: &SpectralFrame<T>, p0_prime: &HermitianOperator<T>, gamma: T) -> Result<CMatrix<T>> {
    if !(gamma > T::zero()) {
        return Err(Error::NonPositiveRate { value: gamma.as_f64() });
    }
    let n = frame.dim();
    if p0_prime.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: p0_prime.dim() });
    }
    if frame.min_gap() <= T::zero() {
        return Err(Error::DegenerateSpectrum { index: 0, gap: frame.min_gap().as_f64() });
    }
    let e = frame.eigenvalues();
    let p = frame.projections();
    let mut x = CMatrix::zeros(n, n);
    for a in 0..n {
        let left_block = &p[a] * p0_prime.matrix();
        for b in (0..n).filter(|&b| b != a) {
            let denom = cx(-gamma, e[a] - e[b]);
            x += (&left_block * &p[b]).map(|z| z / denom);
        }
    }
    Ok(x)
}

/// Integrator settings for [`evolve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveConfig {
    /// Upper bound on `h / ε`.
    pub step_ratio: f64,
    /// Step count is doubled until the final state changes by less than this
    /// (largest entry modulus).
    pub rtol: f64,
    pub max_steps: usize,
    /// Number of stored samples, including both endpoints.
    pub samples: usize,
    pub gap_tol: f64,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self { step_ratio: 0.5, rtol: 1e-8, max_steps: 1 << 24, samples: 201, gap_tol: crate::spectral::DEFAULT_GAP_TOL }
    }
}

/// Hygiene bounds enforced on every stored sample, widened to the rounding
/// drift of the step count when `T` is coarser than f64.
pub const TRAJECTORY_TRACE_TOL: f64 = 1e-9;
pub const TRAJECTORY_HERMITICITY_TOL: f64 = 1e-9;
pub const TRAJECTORY_MIN_EIGENVALUE: f64 = -1e-7;

#[derive(Debug, Clone)]
pub struct TrajectorySample<T: Real> {
    pub s: T,
    pub q: T,
    pub rho: DensityMatrix<T>,
}

/// Sampled solution of `ε ρ̇ = L_q(ρ)` on slow time `s ∈ [0, 1]`.
#[derive(Debug, Clone)]
pub struct Trajectory<T: Real> {
    pub samples: Vec<TrajectorySample<T>>,
    /// Adiabaticity `ε`; the total physical time is `1/ε`.
    pub epsilon: T,
    /// Step count of the accepted run.
    pub steps: usize,
    /// Change of the final state between the accepted run and the one with half the steps.
    pub last_change: T,
}

impl<T: Real> Trajectory<T> {
    pub fn final_state(&self) -> &DensityMatrix<T> {
        &self.samples[self.samples.len() - 1].rho
    }

    pub fn total_time(&self) -> T {
        T::one() / self.epsilon
    }
}

/// Applies `exp(t L)` of the frozen dephasing generator at `frame` to `rho`.
pub fn propagate_frozen<T: Real>(frame: &SpectralFrame<T>, decay: &DMatrix<T>, t: T, rho: &CMatrix<T>) -> CMatrix<T> {
    let v = frame.eigenvectors();
    let e = frame.eigenvalues();
    let mut block = v.adjoint() * rho * v;
    let n = frame.dim();
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let phase = -(e[a] - e[b]) * t;
            let damp = (-decay[(a, b)] * t).exp();
            block[(a, b)] *= cx(damp * phase.cos(), damp * phase.sin());
        }
    }
    v * block * v.adjoint()
}

struct Run<T: Real> {
    samples: Vec<TrajectorySample<T>>,
    final_rho: CMatrix<T>,
    min_gap: T,
    min_rate: Option<T>,
}

struct Problem<'a, T: Real, P: ?Sized> {
    path: &'a P,
    schedule: &'a Schedule<T>,
    deph: &'a DephasingModel<T>,
    epsilon: T,
    rho0: &'a DensityMatrix<T>,
    intervals: usize,
    gap_tol: T,
}

fn run_fixed<T: Real, P: HamiltonianPath<T> + ?Sized>(pb: &Problem<'_, T, P>, steps: usize) -> Result<Run<T>> {
    let Problem { path, schedule, deph, epsilon, rho0, intervals, gap_tol } = *pb;
    let n = path.dim();
    let h = T::one() / T::from_count(steps);
    let per_sample = steps / intervals;
    let t = h / epsilon;
    let mut rho = rho0.matrix().clone();
    let mut samples = Vec::with_capacity(intervals + 1);
    let mut min_gap = T::max_value().unwrap_or_else(T::one);
    let mut min_rate: Option<T> = None;
    // Rounding drift grows like sqrt(steps) ulps; only matters below f64.
    let drift = T::default_epsilon() * T::lit(64.0) * T::from_count(steps).sqrt();
    let tol_tr = T::lit(TRAJECTORY_TRACE_TOL).max(drift);
    let tol_h = T::lit(TRAJECTORY_HERMITICITY_TOL).max(drift);
    let tol_eig = T::lit(TRAJECTORY_MIN_EIGENVALUE).min(-drift);
    samples.push(TrajectorySample { s: T::zero(), q: schedule.q(T::zero()), rho: rho0.clone() });
    for k in 0..steps {
        let s_mid = (T::from_count(k) + T::lit(0.5)) * h;
        let q_mid = schedule.q(s_mid);
        let frame = path.frame(q_mid, gap_tol)?;
        min_gap = min_gap.min(frame.min_gap());
        if let Some(r) = deph.rate(q_mid) {
            min_rate = Some(min_rate.map_or(r, |m: T| m.min(r)));
        }
        let decay = deph.coherence_decay(n, q_mid);
        rho = propagate_frozen(&frame, &decay, t, &rho);
        if (k + 1) % per_sample == 0 {
            let s = T::from_count(k + 1) * h;
            let s = if k + 1 == steps { T::one() } else { s };
            if let Some(reason) = Hygiene::of(&rho).violation(tol_tr, tol_h, tol_eig) {
                return Err(Error::InvalidState { s: s.as_f64(), reason });
            }
            samples.push(TrajectorySample { s, q: schedule.q(s), rho: DensityMatrix { matrix: rho.clone() } });
        }
    }
    Ok(Run { samples, final_rho: rho, min_gap, min_rate })
}

/// Integrates `ε dρ/ds = L_{q(s)}(ρ)` over `s ∈ [0, 1]`.
///
/// Each step of width `h` applies the exact exponential of the generator
/// frozen at the step midpoint, `exp((h/ε) L_{q(s + h/2)})`. The initial
/// step count satisfies `h ≤ step_ratio·ε`; it is doubled until the final
/// state moves by less than `rtol`, failing with
/// [`Error::StepLimitExceeded`] past `max_steps`.
pub fn evolve<T: Real, P: HamiltonianPath<T> + ?Sized>(
    path: &P,
    schedule: &Schedule<T>,
    deph: &DephasingModel<T>,
    epsilon: T,
    rho0: &DensityMatrix<T>,
    config: &EvolveConfig,
) -> Result<Trajectory<T>> {
    if !(epsilon > T::zero()) || !epsilon.is_finite() {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {}", epsilon.as_f64())));
    }
    if rho0.dim() != path.dim() {
        return Err(Error::DimensionMismatch { expected: path.dim(), found: rho0.dim() });
    }
    deph.check_dim(path.dim())?;
    if config.samples < 2 || !(config.step_ratio > 0.0) || !(config.rtol > 0.0) {
        return Err(Error::InvalidInput("invalid integrator settings".into()));
    }
    let intervals = config.samples - 1;
    let min_steps = (1.0 / (config.step_ratio * epsilon.as_f64())).ceil() as usize;
    let mut steps = intervals * min_steps.div_ceil(intervals).max(1);
    let problem = Problem { path, schedule, deph, epsilon, rho0, intervals, gap_tol: T::lit(config.gap_tol) };
    let rtol = T::lit(config.rtol);
    let mut prev = run_fixed(&problem, steps)?;
    let mut last_change = T::max_value().unwrap_or_else(T::one);
    loop {
        let next_steps = steps * 2;
        if next_steps > config.max_steps {
            return Err(Error::StepLimitExceeded { max_steps: config.max_steps, change: last_change.as_f64() });
        }
        let next = run_fixed(&problem, next_steps)?;
        last_change = max_abs(&(&next.final_rho - &prev.final_rho));
        steps = next_steps;
        if last_change < rtol {
            let scale = next.min_gap.min(next.min_rate.unwrap_or_else(|| next.min_gap));
            if epsilon > scale / T::lit(10.0) {
                log::warn!(
                    "epsilon = {} is not small against min(gamma, gap) = {}",
                    epsilon.as_f64(),
                    scale.as_f64()
                );
            }
            return Ok(Trajectory { samples: next.samples, epsilon, steps, last_change });
        }
        prev = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli;
    use crate::spectral::spectral_frame;

    fn frame_of(m: CMatrix<f64>) -> SpectralFrame<f64> {
        spectral_frame(&HermitianOperator::new(m).unwrap(), 1e-10).unwrap()
    }

    #[test]
    fn pure_hamiltonian_rotates_coherence() {
        let [_, _, sz] = pauli::<f64>();
        let h = HermitianOperator::new(sz.scale(0.5)).unwrap();
        let l = lindblad_generator(&h, &[]).unwrap();
        let mut rho = CMatrix::zeros(2, 2);
        rho[(0, 1)] = re(1.0);
        let out = l.apply(&rho).unwrap();
        // In the σz basis e(|0⟩) = 1/2, e(|1⟩) = -1/2, so -i(e_0 - e_1) = -i.
        assert!((out[(0, 1)] - cx(0.0, -1.0)).modulus() < 1e-15);
        assert!(out[(1, 0)].modulus() < 1e-15 && out[(0, 0)].modulus() < 1e-15);
    }

    #[test]
    fn commuting_jump_leaves_projection_stationary() {
        let f = frame_of(pauli::<f64>()[0].scale(0.5) + pauli::<f64>()[2].scale(0.2));
        let h = HermitianOperator::from_hermitian_part(&f.reconstruct());
        let jump = f.projection(0).scale(0.8_f64.sqrt());
        let l = lindblad_generator(&h, &[jump]).unwrap();
        assert!(max_abs(&l.apply(f.projection(0)).unwrap()) < 1e-14);
        assert!(l.trace_residual() < 1e-14);
    }

    #[test]
    fn identity_rate_matrix_doubles_scalar_rate() {
        let f = frame_of(pauli::<f64>()[0].scale(0.3) + pauli::<f64>()[2].scale(-0.4));
        let g0 = 0.35;
        let general = general_dephasing_generator(&f, &DMatrix::identity(2, 2).scale(g0)).unwrap();
        let scalar = dephasing_generator(&f, 2.0 * g0).unwrap();
        assert!(max_abs(&(general.matrix() - scalar.matrix())) < 1e-14);
    }

    #[test]
    fn zero_rate_matrix_is_hamiltonian() {
        let f = frame_of(pauli::<f64>()[1].scale(0.5));
        let general = general_dephasing_generator(&f, &DMatrix::zeros(2, 2)).unwrap();
        let h = HermitianOperator::from_hermitian_part(&f.reconstruct());
        assert!(max_abs(&(general.matrix() - hamiltonian_generator(&h).matrix())) < 1e-15);
    }

    #[test]
    fn rejects_bad_rates() {
        let f = frame_of(pauli::<f64>()[2].clone());
        assert!(matches!(dephasing_generator(&f, 0.0), Err(Error::NonPositiveRate { .. })));
        let not_psd = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(general_dephasing_generator(&f, &not_psd), Err(Error::NotPsd { .. })));
        assert!(matches!(DephasingModel::<f64>::constant(-1.0), Err(Error::NonPositiveRate { .. })));
    }

    #[test]
    fn scalar_generator_kernel_and_coherences() {
        let f = frame_of(pauli::<f64>()[0].scale(0.5) + pauli::<f64>()[2].scale(0.1));
        let gamma = 0.7;
        let l = dephasing_generator(&f, gamma).unwrap();
        let diag = f.projection(0).scale(0.3) + f.projection(1).scale(0.7);
        assert!(max_abs(&l.apply(&diag).unwrap()) < 1e-14);
        let a = CMatrix::from_fn(2, 2, |i, j| cx(1.0 + i as f64, j as f64 - 0.5));
        let off = f.projection(0) * a * f.projection(1);
        let e = f.eigenvalues();
        let lambda = cx(-gamma, -(e[0] - e[1]));
        assert!(max_abs(&(l.apply(&off).unwrap() - off.map(|z| z * lambda))) < 1e-14);
    }

    #[test]
    fn adjoint_of_identity_vanishes() {
        let f = frame_of(pauli::<f64>()[0].scale(0.5));
        let l = dephasing_generator(&f, 1.0).unwrap();
        assert!(max_abs(&l.adjoint_apply(&identity(2)).unwrap()) < 1e-15);
    }

    #[test]
    fn frozen_propagator_matches_expm() {
        let f = frame_of(pauli::<f64>()[0].scale(0.4) + pauli::<f64>()[1].scale(-0.2) + pauli::<f64>()[2].scale(0.3));
        let gamma = 0.6;
        let model = DephasingModel::constant(gamma).unwrap();
        let decay = model.coherence_decay(2, 0.0);
        let l = dephasing_generator(&f, gamma).unwrap();
        let rho = CMatrix::from_row_slice(2, 2, &[re(0.7), cx(0.1, 0.2), cx(0.1, -0.2), re(0.3)]);
        let t = 2.3;
        let exact = l.exp(t).apply(&rho).unwrap();
        assert!(max_abs(&(propagate_frozen(&f, &decay, t, &rho) - exact)) < 1e-13);
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::<f64>::new(identity(2)).is_err());
        let dm = DensityMatrix::<f64>::maximally_mixed(2);
        assert!((dm.expectation(&identity(2)) - 1.0).abs() < 1e-15);
    }
}
