//! First-order tunneling under scalar dephasing.
//!
//! To first order in `ε` the tunneling of a schedule is
//! `T = 2ε ∫₀¹ M(q(s)) q̇(s)² ds`, with a mass `M(q) ≥ 0` that depends only on
//! the path and the rate. The minimizer runs at constant tunneling rate,
//! `q̇ = √(τ/M(q))` with `√τ = ∫₀¹ √M dq`, and attains `T = 2ετ`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lindblad::{RateFn, Trajectory};
use crate::paths::{uniform_schedule, BlochPath, HamiltonianPath, Schedule, GAP_CLOSURE_TOL};
use crate::quadrature::adaptive_simpson;
use crate::scalar::Real;
use crate::spectral::{HermitianOperator, SpectralFrame};

/// Absolute tolerance of every quadrature in this module.
pub const QUADRATURE_TOL: f64 = 1e-10;

/// `Σ_{a≠0} γ tr(P_a P'₀²) / ((e₀ - e_a)² + γ²)` at a frame.
pub fn mass_from_frame<T: Real>(frame: &SpectralFrame<T>, p0_prime: &HermitianOperator<T>, gamma: T) -> T {
    let sq = p0_prime.matrix() * p0_prime.matrix();
    let e = frame.eigenvalues();
    let total = (1..frame.dim()).fold(T::zero(), |acc, a| {
        let w = crate::linalg::trace_product(frame.projection(a), &sq).re;
        let de = e[0] - e[a];
        acc + gamma * w / (de * de + gamma * gamma)
    });
    total.max(T::zero())
}

/// Mass term `M(q)` of a general path.
pub fn mass<T: Real, P: HamiltonianPath<T> + ?Sized>(path: &P, gamma: &dyn Fn(T) -> T, q: T, gap_tol: T) -> Result<T> {
    let frame = path.frame(q, gap_tol)?;
    let dp0 = frame.projection_derivative(&path.derivative(q), 0)?;
    let g = gamma(q);
    if !(g > T::zero()) {
        return Err(Error::NonPositiveRate { value: g.as_f64() });
    }
    Ok(mass_from_frame(&frame, &dp0, g))
}

/// Two-level mass `(γ/4) |ĝ'|² / (g² + γ²)`.
pub fn mass_two_level<T: Real>(bpath: &BlochPath<T>, gamma: &dyn Fn(T) -> T, q: T) -> Result<T> {
    let g = bpath.gap(q);
    if !(g >= T::lit(GAP_CLOSURE_TOL)) {
        return Err(Error::GapClosure { q: q.as_f64(), gap: g.as_f64() });
    }
    let rate = gamma(q);
    if !(rate >= T::zero()) {
        return Err(Error::NonPositiveRate { value: rate.as_f64() });
    }
    let v = bpath.bloch_speed(q);
    Ok(rate / T::lit(4.0) * v * v / (g * g + rate * rate))
}

pub type MassFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Quadrature settings for building a [`MassProfile`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileOptions<T> {
    pub tol: T,
    pub initial_panels: usize,
    /// Extra panel boundaries, typically clustered around gap minima.
    pub breakpoints: Vec<T>,
}

impl<T: Real> Default for ProfileOptions<T> {
    fn default() -> Self {
        Self { tol: T::lit(QUADRATURE_TOL), initial_panels: 64, breakpoints: Vec::new() }
    }
}

/// Breakpoints graded geometrically around `center`: `center ± width·2^k`.
pub fn graded_breakpoints<T: Real>(center: T, width: T) -> Vec<T> {
    let mut out = vec![center];
    let mut w = width;
    while w < T::one() {
        out.push(center - w);
        out.push(center + w);
        w *= T::lit(2.0);
    }
    out.retain(|&x| x > T::zero() && x < T::one());
    out
}

/// `M(q)` sampled on the refined grid of an adaptive quadrature of `√M`,
/// with the running integral `∫₀^q √M` at every grid point.
#[derive(Clone)]
pub struct MassProfile<T: Real> {
    grid: Vec<T>,
    values: Vec<T>,
    cumulative_root: Vec<T>,
    root_integral: T,
    quadrature_error: T,
    gamma_used: Vec<T>,
    mass: MassFn<T>,
}

impl<T: Real> fmt::Debug for MassProfile<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MassProfile")
            .field("points", &self.grid.len())
            .field("root_integral", &self.root_integral)
            .field("quadrature_error", &self.quadrature_error)
            .finish()
    }
}

impl<T: Real> MassProfile<T> {
    /// Builds a profile from a mass function, optionally recording the rate.
    pub fn from_fn(mass: MassFn<T>, gamma: Option<RateFn<T>>, options: &ProfileOptions<T>) -> Result<Self> {
        let root = |q: T| mass(q).max(T::zero()).sqrt();
        let quad = adaptive_simpson(root, T::zero(), T::one(), options.tol, &options.breakpoints, options.initial_panels);
        if !quad.converged || !quad.value.is_finite() {
            return Err(Error::QuadratureNotConverged { estimate: quad.value.as_f64(), error: quad.error_estimate.as_f64() });
        }
        let mut grid = Vec::with_capacity(quad.panels.len() + 1);
        let mut values = Vec::with_capacity(quad.panels.len() + 1);
        let mut cumulative_root = Vec::with_capacity(quad.panels.len() + 1);
        let mut acc = T::zero();
        for p in &quad.panels {
            grid.push(p.a);
            values.push(p.fa * p.fa);
            cumulative_root.push(acc);
            acc += p.integral;
        }
        let last = quad.panels.last().expect("at least one panel");
        grid.push(last.b);
        values.push(last.fb * last.fb);
        cumulative_root.push(acc);
        if let Some(i) = values.iter().position(|m| *m < T::zero() || !m.is_finite()) {
            return Err(Error::InvalidInput(format!("invalid mass {} at q = {}", values[i].as_f64(), grid[i].as_f64())));
        }
        let gamma_used = match &gamma {
            Some(g) => grid.iter().map(|&q| g(q)).collect(),
            None => Vec::new(),
        };
        Ok(Self { grid, values, cumulative_root, root_integral: quad.value, quadrature_error: quad.error_estimate, gamma_used, mass })
    }

    /// Profile of a general path under a scalar rate `γ(q)`.
    pub fn for_path<P: HamiltonianPath<T> + 'static>(
        path: Arc<P>,
        gamma: RateFn<T>,
        gap_tol: T,
        options: &ProfileOptions<T>,
    ) -> Result<Self> {
        // Surface spectral errors up front; inside the quadrature they could
        // only show up as NaN.
        for i in 0..=100 {
            mass(path.as_ref(), gamma.as_ref(), T::from_count(i) / T::lit(100.0), gap_tol)?;
        }
        let g = gamma.clone();
        let f: MassFn<T> = Arc::new(move |q| mass(path.as_ref(), g.as_ref(), q, gap_tol).unwrap_or(T::lit(f64::NAN)));
        Self::from_fn(f, Some(gamma), options)
    }

    /// Profile of a Bloch path using the closed-form two-level mass. The
    /// minimal-gap location seeds graded breakpoints of width `g₀`.
    pub fn for_bloch(bpath: &BlochPath<T>, gamma: RateFn<T>, options: &ProfileOptions<T>) -> Result<Self> {
        let b = bpath.clone();
        let g = gamma.clone();
        mass_two_level(&b, g.as_ref(), T::zero())?;
        let f: MassFn<T> = Arc::new(move |q| mass_two_level(&b, g.as_ref(), q).unwrap_or(T::lit(f64::NAN)));
        let mut opts = options.clone();
        opts.breakpoints.extend(graded_breakpoints(bpath.argmin_gap(), bpath.min_gap()));
        Self::from_fn(f, Some(gamma), &opts)
    }

    /// `M(q)` evaluated exactly.
    pub fn eval(&self, q: T) -> T {
        (self.mass)(q)
    }

    pub fn grid(&self) -> &[T] {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// `γ(q)` on the grid, empty for synthetic profiles.
    pub fn gamma_used(&self) -> &[T] {
        &self.gamma_used
    }

    /// `∫₀^q √M dq'` on the grid.
    pub fn cumulative_root(&self) -> &[T] {
        &self.cumulative_root
    }

    /// `∫₀¹ √M dq`.
    pub fn root_integral(&self) -> T {
        self.root_integral
    }

    pub fn quadrature_error(&self) -> T {
        self.quadrature_error
    }
}

/// Result of [`tau_and_schedule`].
#[derive(Debug, Clone)]
pub struct OptimalSchedule<T: Real> {
    /// `τ = (∫₀¹ √M dq)²`; the minimal first-order tunneling is `2ετ`.
    pub tau: T,
    pub schedule: Schedule<T>,
    /// Set when `M ≡ 0`: every schedule is optimal at first order and the
    /// uniform one is returned with `τ = 0`.
    pub zero_mass: bool,
}

impl<T: Real> OptimalSchedule<T> {
    /// Slow time at which the optimal schedule reaches `q`.
    pub fn s_of_q(&self, q: T) -> T {
        self.schedule.s_of_q(q)
    }
}

/// Relative tolerance on `M(q(s)) q̇² / τ - 1` at interval midpoints used to
/// refine the knots of the optimal schedule.
pub const RATE_REFINE_TOL: f64 = 1e-9;

/// Knot intervals narrower than this in `s` are never split.
pub const MIN_KNOT_SPACING: f64 = 1e-11;

/// Cap on the number of knots of an optimal schedule.
pub const MAX_KNOTS: usize = 1 << 18;

/// Optimal schedule `s(q) = ∫₀^q √M / √τ`, inverted to `q(s)` with a
/// monotone cubic using the exact slopes `q̇ = √(τ/M)`.
///
/// The knots start from the profile's grid. Intervals where the interpolant
/// misses the constant rate `M q̇² = τ` at their midpoint are bisected in `q`
/// until it holds to [`RATE_REFINE_TOL`] or the interval is narrower than
/// [`MIN_KNOT_SPACING`]; both are floored at a few ulps of `T`.
pub fn tau_and_schedule<T: Real>(mp: &MassProfile<T>) -> Result<OptimalSchedule<T>> {
    let root = mp.root_integral();
    if !(root > T::default_epsilon()) {
        return Ok(OptimalSchedule { tau: T::zero(), schedule: uniform_schedule(), zero_mass: true });
    }
    let tau = root * root;
    let n = mp.grid.len();
    let mut s: Vec<T> = Vec::with_capacity(n);
    let mut q: Vec<T> = Vec::with_capacity(n);
    for i in 0..n {
        let si = if i == n - 1 { T::one() } else { mp.cumulative_root[i] / root };
        if let Some(&last) = s.last() {
            if !(si > last) || !(mp.grid[i] > q[q.len() - 1]) {
                // Flat stretch of s(q) where M vanishes; the endpoint wins.
                if i == n - 1 {
                    s.pop();
                    q.pop();
                } else {
                    continue;
                }
            }
        }
        s.push(si);
        q.push(mp.grid[i]);
    }
    if s.len() < 2 || s[0] != T::zero() {
        return Err(Error::InvalidInput("degenerate mass profile".into()));
    }
    let slope = |qq: T| root / mp.eval(qq).max(T::zero()).sqrt();
    let build = |s: &[T], q: &[T]| Schedule::from_hermite(s.to_vec(), q.to_vec(), q.iter().map(|&x| slope(x)).collect());
    let mut schedule = build(&s, &q)?;
    // Neither tolerance may drop below what the scalar type resolves.
    let ulp = T::default_epsilon();
    let rate_tol = T::lit(RATE_REFINE_TOL).max(ulp * T::lit(64.0));
    let min_ds = T::lit(MIN_KNOT_SPACING).max(ulp * T::lit(16.0));
    let root_sqrt_m = |x: T| mp.eval(x).max(T::zero()).sqrt();
    loop {
        let mut split = Vec::new();
        for i in 0..s.len() - 1 {
            if s[i + 1] - s[i] <= min_ds {
                continue;
            }
            let mid = (s[i] + s[i + 1]) * T::lit(0.5);
            let rate = tunneling_rate(mp, &schedule, mid);
            if (rate / tau - T::one()).abs() > rate_tol {
                split.push(i);
            }
        }
        if split.is_empty() || s.len() + split.len() > MAX_KNOTS {
            if !split.is_empty() {
                log::warn!("optimal schedule refinement stopped at {} knots with {} intervals unresolved", s.len(), split.len());
            }
            break;
        }
        let mut ns = Vec::with_capacity(s.len() + split.len());
        let mut nq = Vec::with_capacity(s.len() + split.len());
        let mut k = 0;
        for i in 0..s.len() {
            ns.push(s[i]);
            nq.push(q[i]);
            if k < split.len() && split[k] == i {
                k += 1;
                let qm = (q[i] + q[i + 1]) * T::lit(0.5);
                let tol = (T::lit(1e-3) * T::lit(QUADRATURE_TOL)).max(ulp) * (qm - q[i]);
                let local = adaptive_simpson(root_sqrt_m, q[i], qm, tol, &[], 1);
                let sm = s[i] + local.value / root;
                if sm > s[i] && sm < s[i + 1] && qm > q[i] && qm < q[i + 1] {
                    ns.push(sm);
                    nq.push(qm);
                }
            }
        }
        if ns.len() == s.len() {
            break;
        }
        s = ns;
        q = nq;
        schedule = build(&s, &q)?;
    }
    Ok(OptimalSchedule { tau, schedule, zero_mass: false })
}

/// Instantaneous first-order tunneling rate per unit `2ε`: `M(q(s)) q̇(s)²`.
pub fn tunneling_rate<T: Real>(mp: &MassProfile<T>, schedule: &Schedule<T>, s: T) -> T {
    let (q, qd) = schedule.eval(s);
    mp.eval(q) * qd * qd
}

fn schedule_breakpoints<T: Real>(schedule: &Schedule<T>) -> Vec<T> {
    let (s, _) = schedule.knots();
    if s.len() <= 4096 {
        s.to_vec()
    } else {
        Vec::new()
    }
}

/// First-order prediction `2ε ∫₀¹ M(q(s)) q̇² ds`.
pub fn predicted_tunneling<T: Real>(mp: &MassProfile<T>, schedule: &Schedule<T>, epsilon: T) -> Result<T> {
    if !(epsilon > T::zero()) {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {}", epsilon.as_f64())));
    }
    let quad = adaptive_simpson(
        |s| tunneling_rate(mp, schedule, s),
        T::zero(),
        T::one(),
        T::lit(QUADRATURE_TOL),
        &schedule_breakpoints(schedule),
        64,
    );
    if !quad.converged || !quad.value.is_finite() {
        return Err(Error::QuadratureNotConverged { estimate: quad.value.as_f64(), error: quad.error_estimate.as_f64() });
    }
    Ok(T::lit(2.0) * epsilon * quad.value)
}

/// Cumulative first-order prediction `2ε ∫₀^{s_k} M q̇² ds` at each point of `s_points`
/// (ascending, starting at or after 0).
pub fn predicted_tunneling_curve<T: Real>(mp: &MassProfile<T>, schedule: &Schedule<T>, epsilon: T, s_points: &[T]) -> Result<Vec<T>> {
    let mut out = Vec::with_capacity(s_points.len());
    let mut acc = T::zero();
    let mut prev = T::zero();
    let bps = schedule_breakpoints(schedule);
    for &s in s_points {
        if s < prev {
            return Err(Error::InvalidInput("s points must be ascending".into()));
        }
        if s > prev {
            let quad = adaptive_simpson(|x| tunneling_rate(mp, schedule, x), prev, s, T::lit(QUADRATURE_TOL), &bps, 1);
            acc += quad.value;
        }
        out.push(T::lit(2.0) * epsilon * acc);
        prev = s;
    }
    Ok(out)
}

/// `T(s) = 1 - tr(P₀(q(s)) ρ(s))` at every sample of a trajectory.
pub fn measured_tunneling<T: Real, P: HamiltonianPath<T> + ?Sized>(traj: &Trajectory<T>, path: &P, gap_tol: T) -> Result<Vec<(T, T)>> {
    traj.samples
        .iter()
        .map(|smp| {
            let frame = path.frame(smp.q, gap_tol)?;
            Ok((smp.s, T::one() - smp.rho.expectation(frame.projection(0))))
        })
        .collect()
}

/// Predicted against simulated tunneling at the end of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TunnelingReport<T> {
    pub predicted: T,
    pub measured: T,
    pub epsilon: T,
    pub tau: T,
    /// `|measured - predicted| / ε²`.
    pub ratio_error: T,
}

impl<T: Real> TunnelingReport<T> {
    pub fn new(predicted: T, measured: T, epsilon: T, tau: T) -> Self {
        let ratio_error = (measured - predicted).abs() / (epsilon * epsilon);
        Self { predicted, measured, epsilon, tau, ratio_error }
    }
}
