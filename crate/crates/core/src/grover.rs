//! Adiabatic Grover search reduced to a 2-level path.
//!
//! With the marked state `|m⟩` and the uniform superposition
//! `|ψ⟩ = a|m⟩ + b|m⊥⟩`, `a = 1/√N`, `b = √(1 - 1/N)`, the search Hamiltonian
//! `(1-q)(I - |ψ⟩⟨ψ|) + q(I - |m⟩⟨m|)` acts on `span{|m⟩, |m⊥⟩}` as
//! `const - ((1-q) n_ψ + q ẑ)·σ/2` with `n_ψ = (2ab, 0, a² - b²)`.

use std::sync::Arc;

use nalgebra::Vector3;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lindblad::RateFn;
use crate::paths::{bloch_path, BlochPath, PathKind};
use crate::scalar::Real;
use crate::variational::{MassProfile, ProfileOptions};

/// `g(q) = √(4(1-q)q/N + (1-2q)²)`.
pub fn grover_gap<T: Real>(n: usize, q: T) -> T {
    let nn = T::from_count(n);
    let d = T::one() - T::lit(2.0) * q;
    (T::lit(4.0) * (T::one() - q) * q / nn + d * d).sqrt()
}

/// `|ĝ'(q)| = 2√(1/N - 1/N²) / g(q)²`.
pub fn grover_bloch_speed<T: Real>(n: usize, q: T) -> T {
    let inv = T::one() / T::from_count(n);
    let g = grover_gap(n, q);
    T::lit(2.0) * (inv - inv * inv).sqrt() / (g * g)
}

/// Effective 2-level path of the search Hamiltonian for `n ≥ 2` items.
pub fn grover_path<T: Real>(n: usize) -> Result<BlochPath<T>> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("database size must be at least 2, got {n}")));
    }
    let inv = T::one() / T::from_count(n);
    let (a2, b2) = (inv, T::one() - inv);
    let n_psi = Vector3::new(T::lit(2.0) * (a2 * b2).sqrt(), T::zero(), a2 - b2);
    let z = Vector3::z();
    let g: crate::paths::VectorFn<T> = Arc::new(move |q: T| -(n_psi * (T::one() - q) + z * q));
    let dg: crate::paths::VectorFn<T> = Arc::new(move |_| n_psi - z);
    Ok(bloch_path(g, dg)?.with_kind(PathKind::Grover))
}

/// How the dephasing rate depends on the database size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaRule<T> {
    /// `γ = c·g₀` with `g₀ = 1/√N`.
    ProportionalToG0(T),
    Fixed(T),
    /// `γ = N^(-α/2)`.
    PowerLaw(T),
}

impl<T: Real> GammaRule<T> {
    pub fn rate(&self, n: usize) -> Result<T> {
        let nn = T::from_count(n);
        let g = match *self {
            GammaRule::ProportionalToG0(c) => c / nn.sqrt(),
            GammaRule::Fixed(g) => g,
            GammaRule::PowerLaw(alpha) => nn.powf(-alpha / T::lit(2.0)),
        };
        if g > T::zero() && g.is_finite() {
            Ok(g)
        } else {
            Err(Error::NonPositiveRate { value: g.as_f64() })
        }
    }
}

/// Quadrature settings for Grover profiles: extra panel boundaries at
/// `1/2 ± k/√N`, `k = 1..8`, on top of the graded ones.
pub fn grover_profile_options<T: Real>(n: usize) -> ProfileOptions<T> {
    let w = T::one() / T::from_count(n).sqrt();
    let half = T::lit(0.5);
    let mut opts = ProfileOptions::default();
    for k in 1..=8 {
        let d = w * T::from_count(k);
        opts.breakpoints.push(half - d);
        opts.breakpoints.push(half + d);
    }
    opts.breakpoints.retain(|&x| x > T::zero() && x < T::one());
    opts
}

/// Mass profile of the Grover path under a constant rate `γ`.
pub fn grover_profile<T: Real>(n: usize, gamma: T) -> Result<MassProfile<T>> {
    let path = grover_path::<T>(n)?;
    let rate: RateFn<T> = Arc::new(move |_| gamma);
    MassProfile::for_bloch(&path, rate, &grover_profile_options(n))
}

/// `τ = (∫₀¹ √M dq)²` for the Grover path.
pub fn grover_tau<T: Real>(n: usize, rule: GammaRule<T>) -> Result<T> {
    let p = grover_profile(n, rule.rate(n)?)?;
    Ok(p.root_integral() * p.root_integral())
}

/// Least-squares line through `(ln x, ln y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLogFit<T> {
    pub slope: T,
    pub intercept: T,
    /// Standard error of the slope; `None` with fewer than three points.
    pub slope_stderr: Option<T>,
}

pub fn loglog_fit<T: Real>(x: &[T], y: &[T]) -> Result<LogLogFit<T>> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), found: y.len() });
    }
    if x.len() < 2 || x.iter().chain(y).any(|v| !(*v > T::zero())) {
        return Err(Error::InvalidInput("log-log fit needs at least two positive points".into()));
    }
    let lx: Vec<T> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<T> = y.iter().map(|v| v.ln()).collect();
    let n = T::from_count(x.len());
    let mx = lx.iter().fold(T::zero(), |a, &b| a + b) / n;
    let my = ly.iter().fold(T::zero(), |a, &b| a + b) / n;
    let sxx = lx.iter().fold(T::zero(), |a, &v| a + (v - mx) * (v - mx));
    let sxy = lx.iter().zip(&ly).fold(T::zero(), |a, (&u, &v)| a + (u - mx) * (v - my));
    if !(sxx > T::zero()) {
        return Err(Error::InvalidInput("log-log fit needs distinct abscissae".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_stderr = (x.len() > 2).then(|| {
        let ssr = lx.iter().zip(&ly).fold(T::zero(), |a, (&u, &v)| {
            let r = v - intercept - slope * u;
            a + r * r
        });
        (ssr / (n - T::lit(2.0)) / sxx).sqrt()
    });
    Ok(LogLogFit { slope, intercept, slope_stderr })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingRow<T> {
    pub n: usize,
    pub gamma: T,
    pub tau: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingTable<T> {
    pub rows: Vec<ScalingRow<T>>,
    pub fit: LogLogFit<T>,
    /// Database sizes used by the fit.
    pub fit_window: Vec<usize>,
}

/// Number of smallest sizes left out of the scaling fit.
pub const FIT_SKIP: usize = 2;

/// `τ` for every `N` (computed concurrently) and the slope of `ln τ` against
/// `ln N` over all but the [`FIT_SKIP`] smallest sizes.
pub fn scaling_experiment<T: Real>(n_list: &[usize], rule: GammaRule<T>) -> Result<ScalingTable<T>> {
    if n_list.len() < FIT_SKIP + 2 {
        return Err(Error::InvalidInput(format!("need at least {} sizes, got {}", FIT_SKIP + 2, n_list.len())));
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("sizes must be strictly ascending".into()));
    }
    let rows = n_list
        .par_iter()
        .map(|&n| Ok(ScalingRow { n, gamma: rule.rate(n)?, tau: grover_tau(n, rule)? }))
        .collect::<Result<Vec<_>>>()?;
    let window = &rows[FIT_SKIP..];
    let xs: Vec<T> = window.iter().map(|r| T::from_count(r.n)).collect();
    let ys: Vec<T> = window.iter().map(|r| r.tau).collect();
    let fit = loglog_fit(&xs, &ys)?;
    Ok(ScalingTable { fit_window: window.iter().map(|r| r.n).collect(), rows, fit })
}

/// `τ` at fixed `N` for each fixed rate, with the slope of `ln τ` against `ln γ`.
pub fn gamma_sweep<T: Real>(n: usize, gammas: &[T]) -> Result<(Vec<ScalingRow<T>>, LogLogFit<T>)> {
    let rows = gammas
        .par_iter()
        .map(|&g| Ok(ScalingRow { n, gamma: g, tau: grover_tau(n, GammaRule::Fixed(g))? }))
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<T> = rows.iter().map(|r| r.gamma).collect();
    let ys: Vec<T> = rows.iter().map(|r| r.tau).collect();
    let fit = loglog_fit(&xs, &ys)?;
    Ok((rows, fit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::HamiltonianPath;

    #[test]
    fn gap_examples() {
        assert_eq!(grover_gap::<f64>(16, 0.0), 1.0);
        assert_eq!(grover_gap::<f64>(16, 1.0), 1.0);
        assert!((grover_gap::<f64>(64, 0.5) - 0.125).abs() < 1e-15);
        assert!((grover_gap::<f64>(4, 0.25).powi(2) - 7.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn speed_examples() {
        assert!((grover_bloch_speed::<f64>(2, 0.0) - 1.0).abs() < 1e-15);
        assert!((grover_bloch_speed::<f64>(100, 0.5) - 2.0 * 99f64.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn path_matches_closed_forms() {
        for n in [2, 8, 64] {
            let p = grover_path::<f64>(n).unwrap();
            assert_eq!(p.kind(), PathKind::Grover);
            for i in 0..=100 {
                let q = i as f64 / 100.0;
                assert!((p.gap(q) - grover_gap(n, q)).abs() < 1e-12);
                assert!((p.bloch_speed(q) - grover_bloch_speed(n, q)).abs() < 1e-9 * grover_bloch_speed(n, q));
            }
        }
    }

    #[test]
    fn gamma_rules() {
        assert!((GammaRule::ProportionalToG0(2.0_f64).rate(16).unwrap() - 0.5).abs() < 1e-15);
        assert!((GammaRule::PowerLaw(1.0_f64).rate(16).unwrap() - 0.25).abs() < 1e-15);
        assert!(GammaRule::Fixed(0.0).rate(4).is_err());
    }

    #[test]
    fn exact_power_law_fit() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(0.7)).collect();
        let f = loglog_fit(&x, &y).unwrap();
        assert!((f.slope - 0.7).abs() < 1e-13);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-13);
        assert!(f.slope_stderr.unwrap() < 1e-7);
    }
}
