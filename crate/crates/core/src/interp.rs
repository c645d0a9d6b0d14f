//! Monotone piecewise-cubic Hermite interpolation.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Piecewise-cubic Hermite interpolant through strictly increasing knots.
///
/// Slopes are either estimated with the Fritsch–Butland harmonic mean
/// (monotone for monotone data) or supplied by the caller and then passed
/// through the Fritsch–Carlson limiter.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic<T: Real> {
    x: Vec<T>,
    y: Vec<T>,
    slopes: Vec<T>,
}

fn check_knots<T: Real>(x: &[T], y: &[T]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), found: y.len() });
    }
    if x.len() < 2 {
        return Err(Error::InvalidInput("at least two knots are required".into()));
    }
    for i in 1..x.len() {
        if !(x[i] > x[i - 1]) {
            return Err(Error::InvalidInput(format!("abscissae not increasing at {i}")));
        }
        if !(y[i] > y[i - 1]) {
            return Err(Error::NotMonotone { index: i });
        }
    }
    Ok(())
}

impl<T: Real> MonotoneCubic<T> {
    /// Strictly increasing data with estimated slopes.
    pub fn new(x: Vec<T>, y: Vec<T>) -> Result<Self> {
        check_knots(&x, &y)?;
        let slopes = estimate_slopes(&x, &y);
        Ok(Self { x, y, slopes })
    }

    /// Strictly increasing data with caller-provided slopes. Non-finite or
    /// non-positive slopes are replaced by estimates; the rest are limited
    /// to keep every piece monotone.
    pub fn with_slopes(x: Vec<T>, y: Vec<T>, slopes: Vec<T>) -> Result<Self> {
        check_knots(&x, &y)?;
        if slopes.len() != x.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), found: slopes.len() });
        }
        let est = estimate_slopes(&x, &y);
        let mut slopes: Vec<T> = slopes
            .into_iter()
            .zip(est)
            .map(|(d, e)| if d.is_finite() && d > T::zero() { d } else { e })
            .collect();
        limit_slopes(&x, &y, &mut slopes);
        Ok(Self { x, y, slopes })
    }

    pub fn knots(&self) -> (&[T], &[T]) {
        (&self.x, &self.y)
    }

    pub fn slopes(&self) -> &[T] {
        &self.slopes
    }

    fn segment(&self, t: T) -> usize {
        let n = self.x.len();
        match self.x.binary_search_by(|v| v.partial_cmp(&t).unwrap_or(std::cmp::Ordering::Less)) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        }
    }

    /// Value and derivative at `t`; clamps to the knot range.
    pub fn eval(&self, t: T) -> (T, T) {
        let t = t.max(self.x[0]).min(self.x[self.x.len() - 1]);
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let u = (t - self.x[i]) / h;
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let (d0, d1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        // p(u) = y0 + u (d0 + u (c2 + u c3)); exact for linear data.
        let delta = y1 - y0;
        let c2 = T::lit(3.0) * delta - T::lit(2.0) * d0 - d1;
        let c3 = d0 + d1 - T::lit(2.0) * delta;
        let value = if u == T::one() { y1 } else { y0 + u * (d0 + u * (c2 + u * c3)) };
        let deriv = (d0 + u * (T::lit(2.0) * c2 + T::lit(3.0) * u * c3)) / h;
        (value, deriv)
    }

    /// Exact maximum of the derivative over the knot range. On each piece
    /// the derivative is a quadratic in the local coordinate.
    pub fn max_derivative(&self) -> T {
        let (two, three, four, six) = (T::lit(2.0), T::lit(3.0), T::lit(4.0), T::lit(6.0));
        let mut best = self.slopes[0];
        for i in 0..self.x.len() - 1 {
            let h = self.x[i + 1] - self.x[i];
            let (y0, y1) = (self.y[i], self.y[i + 1]);
            let (d0, d1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
            let a = six * y0 + three * d0 - six * y1 + three * d1;
            let b = -six * y0 - four * d0 + six * y1 - two * d1;
            best = best.max(self.slopes[i + 1]);
            if a < T::zero() {
                let u = -b / (two * a);
                if u > T::zero() && u < T::one() {
                    best = best.max((a * u * u + b * u + d0) / h);
                }
            }
        }
        best
    }

    /// Inverse evaluation: the abscissa whose value is `v`, with the
    /// derivative of the inverse. Bisection on the bracketing piece followed
    /// by Newton polishing.
    pub fn invert(&self, v: T) -> (T, T) {
        let n = self.y.len();
        let v = v.max(self.y[0]).min(self.y[n - 1]);
        let i = match self.y.binary_search_by(|w| w.partial_cmp(&v).unwrap_or(std::cmp::Ordering::Less)) {
            Ok(i) => return (self.x[i], T::one() / self.slopes[i]),
            Err(i) => i.saturating_sub(1).min(n - 2),
        };
        let (mut lo, mut hi) = (self.x[i], self.x[i + 1]);
        let mut t = lo + (hi - lo) * (v - self.y[i]) / (self.y[i + 1] - self.y[i]);
        let tol = T::default_epsilon() * T::lit(4.0) * (T::one() + t.abs());
        for _ in 0..200 {
            let (f, df) = self.eval(t);
            let r = f - v;
            if r.abs() <= T::default_epsilon() * (T::one() + v.abs()) {
                break;
            }
            if r > T::zero() {
                hi = t;
            } else {
                lo = t;
            }
            let newton = t - r / df;
            t = if df > T::zero() && newton > lo && newton < hi {
                newton
            } else {
                (lo + hi) * T::lit(0.5)
            };
            if (hi - lo) <= tol {
                break;
            }
        }
        let (_, df) = self.eval(t);
        (t, T::one() / df)
    }
}

fn secants<T: Real>(x: &[T], y: &[T]) -> Vec<T> {
    x.windows(2).zip(y.windows(2)).map(|(xs, ys)| (ys[1] - ys[0]) / (xs[1] - xs[0])).collect()
}

fn estimate_slopes<T: Real>(x: &[T], y: &[T]) -> Vec<T> {
    let n = x.len();
    let delta = secants(x, y);
    if n == 2 {
        return vec![delta[0], delta[0]];
    }
    let h: Vec<T> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let mut d = vec![T::zero(); n];
    for k in 1..n - 1 {
        let (d0, d1) = (delta[k - 1], delta[k]);
        if d0 * d1 <= T::zero() {
            d[k] = T::zero();
        } else {
            let w1 = two * h[k] + h[k - 1];
            let w2 = h[k] + two * h[k - 1];
            d[k] = (w1 + w2) / (w1 / d0 + w2 / d1);
        }
    }
    let end = |h0: T, h1: T, d0: T, d1: T| -> T {
        let s = ((two * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if s * d0 <= T::zero() {
            // Keep the end slope strictly positive so q̇ never vanishes at a knot.
            d0 * T::lit(0.5)
        } else if d0 * d1 < T::zero() && s.abs() > (three * d0).abs() {
            three * d0
        } else {
            s
        }
    };
    d[0] = end(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

fn limit_slopes<T: Real>(x: &[T], y: &[T], d: &mut [T]) {
    let delta = secants(x, y);
    let three = T::lit(3.0);
    for k in 0..delta.len() {
        let a = d[k] / delta[k];
        let b = d[k + 1] / delta[k];
        let r = a * a + b * b;
        if r > T::lit(9.0) {
            let t = three / r.sqrt();
            d[k] = t * a * delta[k];
            d[k + 1] = t * b * delta[k];
        }
    }
}
