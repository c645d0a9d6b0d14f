//! Piecewise-constant unitary controls with zero tunneling on 2-level paths.
//!
//! Slow time is cut into intervals of length `Δs = 2πε/g₀`. On each interval
//! with endpoints `q₋ = q(s_i)`, `q₊ = q(s_{i+1})` the Hamiltonian is held at
//! a point `q*` whose direction `ĝ(q*)` is equidistant from `ĝ(q₋)` and
//! `ĝ(q₊)`. Precessing about that axis for the right time carries the ground
//! state of `q₋` exactly onto the ground state of `q₊`. The rest of the
//! interval is spent dwelling at `q₋` and `q₊`, where the state is stationary.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::linalg::bloch_operator;
use crate::paths::{BlochPath, HamiltonianPath, Schedule};
use crate::scalar::{CMatrix, Real};

/// Bisection tolerance for `q*`.
pub const BISECTION_TOL: f64 = 1e-12;

/// Directions closer than this are treated as equal and the interval is skipped.
pub const DEGENERATE_TOL: f64 = 1e-13;

/// Slow-time points closer than this are merged when partitioning.
const PARTITION_TOL: f64 = 1e-14;

/// One rotation of the construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation<T: Real> {
    /// Index of the interval in the partition.
    pub interval: usize,
    pub q_minus: T,
    pub q_plus: T,
    pub q_star: T,
    /// Fast time spent at `q*`.
    pub duration: T,
    /// `ĝ(q*)`.
    pub axis: Vector3<T>,
    /// Precession angle in `[0, 2π)`.
    pub angle: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PieceKind {
    Dwell,
    Rotation,
}

/// The Hamiltonian held at `q` over slow time `[s_start, s_end]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece<T: Real> {
    pub kind: PieceKind,
    pub q: T,
    pub s_start: T,
    pub s_end: T,
}

impl<T: Real> Piece<T> {
    /// Fast-time length `(s_end - s_start) / ε`.
    pub fn duration(&self, epsilon: T) -> T {
        (self.s_end - self.s_start) / epsilon
    }
}

/// A piecewise-constant control built from a base schedule.
#[derive(Debug, Clone)]
pub struct PiecewiseControl<T: Real> {
    pub rotations: Vec<Rotation<T>>,
    /// Consecutive pieces covering `s ∈ [0, 1]`.
    pub pieces: Vec<Piece<T>>,
    /// Partition of slow time actually used, after merging.
    pub partition: Vec<T>,
    pub base_schedule: Schedule<T>,
    pub epsilon: T,
    /// Nominal interval length `2πε/g₀`.
    pub interval_length: T,
    pub offset: T,
    pub min_gap: T,
    /// Intervals whose endpoint directions coincide.
    pub skipped: usize,
    /// Partial intervals too short for their rotation, merged into a neighbour.
    pub merged: usize,
}

/// Control built with partition offset 0.
pub fn construct<T: Real>(bpath: &BlochPath<T>, base: &Schedule<T>, epsilon: T) -> Result<PiecewiseControl<T>> {
    construct_with_offset(bpath, base, epsilon, T::zero())
}

fn equatorial<T: Real>(bpath: &BlochPath<T>, q: T, chord: &Vector3<T>) -> T {
    bpath.direction(q).dot(chord)
}

/// Solves `ĝ(q)·(ĝ₊ - ĝ₋) = 0` on `[q₋, q₊]` and returns the rotation.
/// `None` when `ĝ₊ = ĝ₋`.
fn rotation_for<T: Real>(bpath: &BlochPath<T>, interval: usize, s_start: T, q_minus: T, q_plus: T) -> Result<Option<Rotation<T>>> {
    let (gm, gp) = (bpath.direction(q_minus), bpath.direction(q_plus));
    let chord = gp - gm;
    if chord.norm() <= T::lit(DEGENERATE_TOL) {
        return Ok(None);
    }
    let (mut lo, mut hi) = (q_minus, q_plus);
    let (flo, fhi) = (equatorial(bpath, lo, &chord), equatorial(bpath, hi, &chord));
    let slack = T::lit(1e-14);
    if flo > slack || fhi < -slack {
        return Err(Error::NoIntersection { s: s_start.as_f64() });
    }
    let tol = T::lit(BISECTION_TOL);
    while hi - lo > tol {
        let mid = (lo + hi) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if equatorial(bpath, mid, &chord) > T::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let q_star = (lo + hi) * T::lit(0.5);
    let axis = bpath.direction(q_star);
    let um = gm - axis * axis.dot(&gm);
    let up = gp - axis * axis.dot(&gp);
    let two_pi = T::two_pi();
    let mut angle = axis.dot(&um.cross(&up)).atan2(um.dot(&up));
    if angle < T::zero() {
        angle += two_pi;
    }
    if angle >= two_pi {
        angle = T::zero();
    }
    let duration = angle / bpath.gap(q_star);
    Ok(Some(Rotation { interval, q_minus, q_plus, q_star, duration, axis, angle }))
}

/// Control built on the partition `0, s₀, s₀ + Δs, s₀ + 2Δs, …, 1` with
/// `s₀ = offset mod Δs`.
///
/// A partial interval at either end that is too short to host its rotation
/// is merged with its neighbour.
pub fn construct_with_offset<T: Real>(
    bpath: &BlochPath<T>,
    base: &Schedule<T>,
    epsilon: T,
    offset: T,
) -> Result<PiecewiseControl<T>> {
    if !(epsilon > T::zero()) || !epsilon.is_finite() {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {}", epsilon.as_f64())));
    }
    let g0 = bpath.min_gap();
    if epsilon > g0 / T::lit(10.0) {
        log::warn!("epsilon = {} is not small against the minimal gap {}", epsilon.as_f64(), g0.as_f64());
    }
    let ds = T::two_pi() * epsilon / g0;
    let offset = if offset.is_finite() { offset - (offset / ds).floor() * ds } else { T::zero() };
    let tiny = T::lit(PARTITION_TOL);
    let mut cuts = vec![T::zero()];
    let mut s = offset;
    while s < T::one() - tiny {
        if s > tiny {
            cuts.push(s);
        }
        s += ds;
    }
    cuts.push(T::one());

    let mut merged = 0;
    let (rotations, cuts) = loop {
        let mut rotations = Vec::with_capacity(cuts.len());
        let mut short = None;
        for i in 0..cuts.len() - 1 {
            let (qm, qp) = (base.q(cuts[i]), base.q(cuts[i + 1]));
            let rot = rotation_for(bpath, i, cuts[i], qm, qp)?;
            if let Some(r) = &rot {
                if r.duration * epsilon > cuts[i + 1] - cuts[i] {
                    short = Some(i);
                    break;
                }
            }
            rotations.push(rot);
        }
        match short {
            None => break (rotations, cuts),
            Some(_) if cuts.len() == 2 => {
                return Err(Error::InvalidInput(format!(
                    "epsilon = {} leaves too little time for a single rotation",
                    epsilon.as_f64()
                )))
            }
            Some(i) => {
                // Drop the cut shared with the neighbour: the following one
                // for the first interval, the preceding one otherwise.
                let drop = if i == 0 { 1 } else { i };
                cuts.remove(drop);
                merged += 1;
            }
        }
    };

    let mut pieces = Vec::new();
    let mut push = |kind, q, a: T, b: T| {
        if b > a {
            pieces.push(Piece { kind, q, s_start: a, s_end: b });
        }
    };
    let mut skipped = 0;
    let mut kept = Vec::new();
    for (i, rot) in rotations.into_iter().enumerate() {
        let (a, b) = (cuts[i], cuts[i + 1]);
        let (qm, qp) = (base.q(a), base.q(b));
        match rot {
            None => {
                skipped += 1;
                let mid = (a + b) * T::lit(0.5);
                push(PieceKind::Dwell, qm, a, mid);
                push(PieceKind::Dwell, qp, mid, b);
            }
            Some(r) => {
                let width = r.duration * epsilon;
                let lead = (b - a - width) * T::lit(0.5);
                let (r0, r1) = (a + lead, a + lead + width);
                push(PieceKind::Dwell, qm, a, r0);
                push(PieceKind::Rotation, r.q_star, r0, r1);
                push(PieceKind::Dwell, qp, r1, b);
                kept.push(r);
            }
        }
    }
    Ok(PiecewiseControl {
        rotations: kept,
        pieces,
        partition: cuts,
        base_schedule: base.clone(),
        epsilon,
        interval_length: ds,
        offset,
        min_gap: g0,
        skipped,
        merged,
    })
}

/// Right-handed rotation of `v` about the unit vector `n` by `angle`.
pub fn rotate<T: Real>(v: &Vector3<T>, n: &Vector3<T>, angle: T) -> Vector3<T> {
    let (s, c) = angle.sin_cos();
    v * c + n.cross(v) * s + n * (n.dot(v) * (T::one() - c))
}

impl<T: Real> PiecewiseControl<T> {
    /// Value of the control at slow time `s`.
    pub fn q_at(&self, s: T) -> T {
        let i = self.pieces.partition_point(|p| p.s_end < s).min(self.pieces.len() - 1);
        self.pieces[i].q
    }

    /// Total fast time of all pieces; equals `1/ε` up to rounding.
    pub fn total_fast_time(&self) -> T {
        self.pieces.iter().fold(T::zero(), |acc, p| acc + p.duration(self.epsilon))
    }

    /// Fast time spent rotating.
    pub fn rotation_time(&self) -> T {
        self.rotations.iter().fold(T::zero(), |acc, r| acc + r.duration)
    }

    /// `sup_s |q_control(s) - q_base(s)|`. On each constant piece the base
    /// schedule is monotone, so the supremum is attained at a piece endpoint.
    pub fn deviation_from_base(&self) -> T {
        self.pieces.iter().fold(T::zero(), |acc, p| {
            let a = (p.q - self.base_schedule.q(p.s_start)).abs();
            let b = (p.q - self.base_schedule.q(p.s_end)).abs();
            acc.max(a).max(b)
        })
    }

    /// `sup|q̇_base| · 2πε/g₀`.
    pub fn deviation_bound(&self) -> T {
        self.base_schedule.max_speed() * self.interval_length
    }

    /// Bloch vector after applying every piece to `start`.
    pub fn propagate_bloch(&self, bpath: &BlochPath<T>, start: &Vector3<T>) -> Vector3<T> {
        self.pieces.iter().fold(*start, |v, p| {
            let angle = bpath.gap(p.q) * p.duration(self.epsilon);
            rotate(&v, &bpath.direction(p.q), angle)
        })
    }
}

/// Ground-state population `tr(P₀(1) ρ_final)` starting from the ground
/// state at `q = 0`, using closed-form rotations.
pub fn verify<T: Real>(control: &PiecewiseControl<T>, bpath: &BlochPath<T>) -> T {
    let v = control.propagate_bloch(bpath, &(-bpath.direction(T::zero())));
    (T::one() - v.dot(&bpath.direction(T::one()))) * T::lit(0.5)
}

/// Excited-state population at `q = 1` starting from the excited state at `q = 0`.
pub fn verify_excited<T: Real>(control: &PiecewiseControl<T>, bpath: &BlochPath<T>) -> T {
    let v = control.propagate_bloch(bpath, &bpath.direction(T::zero()));
    (T::one() + v.dot(&bpath.direction(T::one()))) * T::lit(0.5)
}

/// Same quantity as [`verify`], propagating the density matrix with the
/// exact unitary of each frozen Hamiltonian instead of Bloch rotations.
pub fn verify_density<T: Real>(control: &PiecewiseControl<T>, bpath: &BlochPath<T>, gap_tol: T) -> Result<T> {
    let half = T::lit(0.5);
    let ground = |q: T| -> CMatrix<T> {
        (CMatrix::identity(2, 2) - bloch_operator(&bpath.direction(q))).scale(half)
    };
    let mut rho = ground(T::zero());
    let none = nalgebra::DMatrix::zeros(2, 2);
    for p in &control.pieces {
        let frame = bpath.frame(p.q, gap_tol)?;
        rho = crate::lindblad::propagate_frozen(&frame, &none, p.duration(control.epsilon), &rho);
    }
    Ok(crate::linalg::trace_product(&ground(T::one()), &rho).re)
}
