//! Hamiltonian paths `q ↦ H(q)` on `[0, 1]` and monotone schedules `s ↦ q(s)`.

use std::fmt;
use std::sync::Arc;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::linalg::{self, bloch_operator};
use crate::scalar::{CMatrix, Real};
use crate::spectral::{spectral_frame, HermitianOperator, SpectralFrame};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathKind {
    Linear,
    Bloch,
    Grover,
    Custom,
}

/// A smooth family of Hermitian operators with an exact derivative.
pub trait HamiltonianPath<T: Real>: Send + Sync {
    fn dim(&self) -> usize;

    fn hamiltonian(&self, q: T) -> HermitianOperator<T>;

    /// `dH/dq` at `q`.
    fn derivative(&self, q: T) -> HermitianOperator<T>;

    fn kind(&self) -> PathKind;

    fn frame(&self, q: T, gap_tol: T) -> Result<SpectralFrame<T>> {
        spectral_frame(&self.hamiltonian(q), gap_tol).map(|f| f.with_q(q))
    }
}

impl<T: Real, P: HamiltonianPath<T> + ?Sized> HamiltonianPath<T> for Arc<P> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn hamiltonian(&self, q: T) -> HermitianOperator<T> {
        (**self).hamiltonian(q)
    }
    fn derivative(&self, q: T) -> HermitianOperator<T> {
        (**self).derivative(q)
    }
    fn kind(&self) -> PathKind {
        (**self).kind()
    }
}

/// `P'_a(q)` along a path, from the analytic derivative `H'(q)`.
pub fn projection_derivative<T: Real, P: HamiltonianPath<T> + ?Sized>(
    path: &P,
    q: T,
    a: usize,
    gap_tol: T,
) -> Result<HermitianOperator<T>> {
    path.frame(q, gap_tol)?.projection_derivative(&path.derivative(q), a)
}

/// Largest entrywise mismatch between `dH` and a central difference of `H`
/// with step `h`, over `samples` uniform points in `[h, 1 - h]`.
pub fn derivative_mismatch<T: Real, P: HamiltonianPath<T> + ?Sized>(path: &P, samples: usize, h: T) -> T {
    let two = T::lit(2.0);
    (0..samples)
        .map(|i| {
            let q = h + (T::one() - two * h) * T::from_count(i) / T::from_count(samples.max(2) - 1);
            let fd = (path.hamiltonian(q + h).into_matrix() - path.hamiltonian(q - h).into_matrix())
                .map(|z| z / crate::scalar::re(two * h));
            linalg::max_abs(&(fd - path.derivative(q).into_matrix()))
        })
        .fold(T::zero(), |a, b| a.max(b))
}

/// `H(q) = (1 - q) H₀ + q H₁`.
#[derive(Debug, Clone)]
pub struct LinearPath<T: Real> {
    h0: HermitianOperator<T>,
    h1: HermitianOperator<T>,
    diff: HermitianOperator<T>,
}

pub fn linear_path<T: Real>(h0: HermitianOperator<T>, h1: HermitianOperator<T>) -> Result<LinearPath<T>> {
    if h0.dim() != h1.dim() {
        return Err(Error::DimensionMismatch { expected: h0.dim(), found: h1.dim() });
    }
    let diff = h1.combine(T::one(), &h0, -T::one());
    Ok(LinearPath { h0, h1, diff })
}

impl<T: Real> LinearPath<T> {
    pub fn endpoints(&self) -> (&HermitianOperator<T>, &HermitianOperator<T>) {
        (&self.h0, &self.h1)
    }
}

impl<T: Real> HamiltonianPath<T> for LinearPath<T> {
    fn dim(&self) -> usize {
        self.h0.dim()
    }
    fn hamiltonian(&self, q: T) -> HermitianOperator<T> {
        self.h0.combine(T::one() - q, &self.h1, q)
    }
    fn derivative(&self, _q: T) -> HermitianOperator<T> {
        self.diff.clone()
    }
    fn kind(&self) -> PathKind {
        PathKind::Linear
    }
}

pub type MatrixFn<T> = Arc<dyn Fn(T) -> CMatrix<T> + Send + Sync>;

/// A path given by closures for `H` and `H'`. Outputs are symmetrized.
#[derive(Clone)]
pub struct CustomPath<T: Real> {
    dim: usize,
    h: MatrixFn<T>,
    dh: MatrixFn<T>,
}

impl<T: Real> CustomPath<T> {
    pub fn new(dim: usize, h: MatrixFn<T>, dh: MatrixFn<T>) -> Self {
        Self { dim, h, dh }
    }
}

impl<T: Real> fmt::Debug for CustomPath<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomPath").field("dim", &self.dim).finish()
    }
}

impl<T: Real> HamiltonianPath<T> for CustomPath<T> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn hamiltonian(&self, q: T) -> HermitianOperator<T> {
        HermitianOperator::from_hermitian_part(&(self.h)(q))
    }
    fn derivative(&self, q: T) -> HermitianOperator<T> {
        HermitianOperator::from_hermitian_part(&(self.dh)(q))
    }
    fn kind(&self) -> PathKind {
        PathKind::Custom
    }
}

pub type VectorFn<T> = Arc<dyn Fn(T) -> Vector3<T> + Send + Sync>;

/// Minimum `|g|` below which a Bloch path is considered gapless.
pub const GAP_CLOSURE_TOL: f64 = 1e-8;

/// Grid used to locate the minimal gap before golden-section refinement.
pub const GAP_GRID_POINTS: usize = 1001;

/// A 2-level path `H(q) = g(q)·σ / 2`, so the gap is `|g(q)|`.
#[derive(Clone)]
pub struct BlochPath<T: Real> {
    g: VectorFn<T>,
    dg: VectorFn<T>,
    kind: PathKind,
    min_gap: T,
    argmin: T,
}

impl<T: Real> fmt::Debug for BlochPath<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlochPath")
            .field("kind", &self.kind)
            .field("min_gap", &self.min_gap)
            .field("argmin", &self.argmin)
            .finish()
    }
}

pub fn bloch_path<T: Real>(g: VectorFn<T>, dg: VectorFn<T>) -> Result<BlochPath<T>> {
    let n = GAP_GRID_POINTS;
    let grid = |i: usize| T::from_count(i) / T::from_count(n - 1);
    let (imin, gmin) = (0..n)
        .map(|i| (i, g(grid(i)).norm()))
        .fold((0, T::max_value().unwrap_or_else(T::one)), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    if !gmin.is_finite() || gmin < T::lit(GAP_CLOSURE_TOL) {
        return Err(Error::GapClosure { q: grid(imin).as_f64(), gap: gmin.as_f64() });
    }
    let lo = grid(imin.saturating_sub(1));
    let hi = grid((imin + 1).min(n - 1));
    let (argmin, min_gap) = golden_section_min(|q| g(q).norm(), lo, hi, T::rounding_tol(1e-12));
    let (argmin, min_gap) = if min_gap < gmin { (argmin, min_gap) } else { (grid(imin), gmin) };
    if min_gap < T::lit(GAP_CLOSURE_TOL) {
        return Err(Error::GapClosure { q: argmin.as_f64(), gap: min_gap.as_f64() });
    }
    Ok(BlochPath { g, dg, kind: PathKind::Bloch, min_gap, argmin })
}

fn golden_section_min<T: Real, F: Fn(T) -> T>(f: F, mut a: T, mut b: T, tol: T) -> (T, T) {
    let ratio = (T::lit(5.0).sqrt() - T::one()) * T::lit(0.5);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    let x = (a + b) * T::lit(0.5);
    (x, f(x))
}

impl<T: Real> BlochPath<T> {
    pub(crate) fn with_kind(mut self, kind: PathKind) -> Self {
        self.kind = kind;
        self
    }

    /// The field `g(q)`.
    pub fn field(&self, q: T) -> Vector3<T> {
        (self.g)(q)
    }

    pub fn field_derivative(&self, q: T) -> Vector3<T> {
        (self.dg)(q)
    }

    /// Spectral gap `|g(q)|`.
    pub fn gap(&self, q: T) -> T {
        self.field(q).norm()
    }

    /// Unit vector `ĝ(q)`.
    pub fn direction(&self, q: T) -> Vector3<T> {
        let g = self.field(q);
        g / g.norm()
    }

    /// `ĝ'(q) = (g' - ĝ (ĝ·g')) / |g|`.
    pub fn direction_derivative(&self, q: T) -> Vector3<T> {
        let g = self.field(q);
        let norm = g.norm();
        let unit = g / norm;
        let dg = self.field_derivative(q);
        (dg - unit * unit.dot(&dg)) / norm
    }

    /// Speed `|ĝ'(q)|` on the Bloch sphere.
    pub fn bloch_speed(&self, q: T) -> T {
        self.direction_derivative(q).norm()
    }

    /// Minimal gap `g₀` over `[0, 1]`.
    pub fn min_gap(&self) -> T {
        self.min_gap
    }

    /// Location of the minimal gap.
    pub fn argmin_gap(&self) -> T {
        self.argmin
    }
}

impl<T: Real> HamiltonianPath<T> for BlochPath<T> {
    fn dim(&self) -> usize {
        2
    }
    fn hamiltonian(&self, q: T) -> HermitianOperator<T> {
        HermitianOperator::from_hermitian_part(&bloch_operator(&(self.field(q) * T::lit(0.5))))
    }
    fn derivative(&self, q: T) -> HermitianOperator<T> {
        HermitianOperator::from_hermitian_part(&bloch_operator(&(self.field_derivative(q) * T::lit(0.5))))
    }
    fn kind(&self) -> PathKind {
        self.kind
    }
}

/// Quarter great circle from `+ẑ` to `+x̂` with constant gap `gap`:
/// `g(q) = gap·(sin(πq/2), 0, cos(πq/2))`.
pub fn quarter_circle<T: Real>(gap: T) -> Result<BlochPath<T>> {
    let w = T::frac_pi_2();
    bloch_path(
        Arc::new(move |q: T| Vector3::new((w * q).sin(), T::zero(), (w * q).cos()) * gap),
        Arc::new(move |q: T| Vector3::new((w * q).cos(), T::zero(), -(w * q).sin()) * (gap * w)),
    )
}

/// Number of grid points used by [`Schedule::check_strictly_monotone`].
pub const MONOTONE_CHECK_POINTS: usize = 1001;

/// A monotone map `s ∈ [0, 1] ↦ q ∈ [0, 1]` with `q(0) = 0`, `q(1) = 1`,
/// stored as a monotone piecewise-cubic Hermite interpolant.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule<T: Real> {
    curve: MonotoneCubic<T>,
}

/// `q(s) = s`.
pub fn uniform_schedule<T: Real>() -> Schedule<T> {
    Schedule {
        curve: MonotoneCubic::new(vec![T::zero(), T::one()], vec![T::zero(), T::one()])
            .expect("two increasing knots"),
    }
}

/// Monotone cubic schedule through `q_values` placed on a uniform `s` grid.
pub fn schedule_from_grid<T: Real>(q_values: &[T]) -> Result<Schedule<T>> {
    if q_values.len() < 2 {
        return Err(Error::InvalidInput("schedule needs at least two values".into()));
    }
    let n = q_values.len() - 1;
    let s: Vec<T> = (0..=n).map(|i| T::from_count(i) / T::from_count(n)).collect();
    Schedule::from_knots(s, q_values.to_vec())
}

impl<T: Real> Schedule<T> {
    fn check_endpoints(s: &[T], q: &[T]) -> Result<()> {
        let last = s.len().saturating_sub(1);
        if s.is_empty() || s[0] != T::zero() || s[last] != T::one() {
            return Err(Error::InvalidInput("schedule knots must span s ∈ [0, 1]".into()));
        }
        if q[0] != T::zero() || q[last] != T::one() {
            return Err(Error::BadEndpoints);
        }
        Ok(())
    }

    /// Knots `(s_i, q_i)` with estimated monotone slopes.
    pub fn from_knots(s: Vec<T>, q: Vec<T>) -> Result<Self> {
        if s.len() != q.len() {
            return Err(Error::DimensionMismatch { expected: s.len(), found: q.len() });
        }
        Self::check_endpoints(&s, &q)?;
        Ok(Self { curve: MonotoneCubic::new(s, q)? })
    }

    /// Knots with known derivatives `q̇_i`; slopes are limited to keep the
    /// interpolant monotone.
    pub fn from_hermite(s: Vec<T>, q: Vec<T>, qdot: Vec<T>) -> Result<Self> {
        if s.len() != q.len() {
            return Err(Error::DimensionMismatch { expected: s.len(), found: q.len() });
        }
        Self::check_endpoints(&s, &q)?;
        Ok(Self { curve: MonotoneCubic::with_slopes(s, q, qdot)? })
    }

    /// Samples an arbitrary monotone map on `n + 1` uniform knots.
    pub fn sample<F: Fn(T) -> (T, T)>(f: F, n: usize) -> Result<Self> {
        let mut s = Vec::with_capacity(n + 1);
        let mut q = Vec::with_capacity(n + 1);
        let mut qd = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let si = T::from_count(i) / T::from_count(n);
            let (qi, di) = f(si);
            s.push(si);
            q.push(qi);
            qd.push(di);
        }
        q[0] = T::zero();
        q[n] = T::one();
        Self::from_hermite(s, q, qd)
    }

    /// `(q(s), q̇(s))`.
    pub fn eval(&self, s: T) -> (T, T) {
        self.curve.eval(s)
    }

    pub fn q(&self, s: T) -> T {
        self.curve.eval(s).0
    }

    pub fn qdot(&self, s: T) -> T {
        self.curve.eval(s).1
    }

    /// Slow time at which the schedule reaches `q`.
    pub fn s_of_q(&self, q: T) -> T {
        self.curve.invert(q).0
    }

    /// Knot abscissae and values.
    pub fn knots(&self) -> (&[T], &[T]) {
        self.curve.knots()
    }

    /// `sup_s q̇(s)`, exact for the piecewise-cubic representation.
    pub fn max_speed(&self) -> T {
        self.curve.max_derivative()
    }

    /// Requires `q̇ > 0` on a uniform grid of [`MONOTONE_CHECK_POINTS`] points.
    pub fn check_strictly_monotone(&self) -> Result<()> {
        let n = MONOTONE_CHECK_POINTS - 1;
        for i in 0..=n {
            let s = T::from_count(i) / T::from_count(n);
            if !(self.qdot(s) > T::zero()) {
                return Err(Error::NotMonotone { index: i });
            }
        }
        Ok(())
    }
}
