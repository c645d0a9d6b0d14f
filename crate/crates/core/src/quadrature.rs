//! Adaptive Simpson quadrature that keeps its accepted panels.
//!
//! The panel list doubles as a refined grid: it is dense wherever the
//! integrand has structure (for instance a narrow peak near a gap
//! minimum), which is what the schedule inversion needs.

use crate::scalar::Real;

/// Maximum bisection depth below an initial panel.
pub const MAX_DEPTH: usize = 48;

/// Budget of accepted plus pending panels; past it every pending panel is
/// accepted as is and the result is flagged as not converged.
pub const MAX_PANELS: usize = 1 << 21;

/// One accepted panel `[a, b]` with its Richardson-corrected integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel<T> {
    pub a: T,
    pub b: T,
    pub integral: T,
    /// Integrand values at `a`, the midpoint and `b`.
    pub fa: T,
    pub fm: T,
    pub fb: T,
}

#[derive(Debug, Clone)]
pub struct Quadrature<T> {
    pub value: T,
    /// Sum of the per-panel `|S₂ - S₁| / 15` estimates.
    pub error_estimate: T,
    /// Accepted panels in ascending order.
    pub panels: Vec<Panel<T>>,
    /// False if any panel was accepted without meeting its tolerance, at
    /// [`MAX_DEPTH`] or once [`MAX_PANELS`] was reached.
    pub converged: bool,
}

struct Pending<T> {
    a: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
    tol: T,
    depth: usize,
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
///
/// `breakpoints` (any order, out-of-range values ignored) and `initial_panels`
/// uniform panels seed the recursion; the tolerance is shared among seed
/// panels in proportion to their width.
pub fn adaptive_simpson<T: Real, F>(f: F, a: T, b: T, tol: T, breakpoints: &[T], initial_panels: usize) -> Quadrature<T>
where
    F: Fn(T) -> T,
{
    let half = T::lit(0.5);
    let mut cuts: Vec<T> = (0..=initial_panels.max(1))
        .map(|i| a + (b - a) * T::from_count(i) / T::from_count(initial_panels.max(1)))
        .collect();
    cuts.extend(breakpoints.iter().copied().filter(|&x| x > a && x < b));
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    cuts.dedup_by(|x, y| (*x - *y).abs() <= T::default_epsilon() * (T::one() + y.abs()));

    let mut stack = Vec::new();
    let width = b - a;
    let fvals: Vec<T> = cuts.iter().map(|&x| f(x)).collect();
    // Seed panels pushed in reverse so they are processed left to right.
    for i in (0..cuts.len() - 1).rev() {
        let (pa, pb) = (cuts[i], cuts[i + 1]);
        let m = (pa + pb) * half;
        let fm = f(m);
        let whole = (pb - pa) * (fvals[i] + T::lit(4.0) * fm + fvals[i + 1]) / T::lit(6.0);
        stack.push(Pending {
            a: pa,
            b: pb,
            fa: fvals[i],
            fm,
            fb: fvals[i + 1],
            whole,
            tol: tol * (pb - pa) / width,
            depth: 0,
        });
    }

    let fifteen = T::lit(15.0);
    let mut panels = Vec::new();
    let mut value = T::zero();
    let mut error_estimate = T::zero();
    let mut converged = true;
    while let Some(p) = stack.pop() {
        let m = (p.a + p.b) * half;
        let lm = (p.a + m) * half;
        let rm = (m + p.b) * half;
        let (flm, frm) = (f(lm), f(rm));
        // Widths come from the rounded midpoint so that children and parent
        // describe the same intervals.
        let six = T::lit(6.0);
        let left = (m - p.a) / six * (p.fa + T::lit(4.0) * flm + p.fm);
        let right = (p.b - m) / six * (p.fm + T::lit(4.0) * frm + p.fb);
        let diff = left + right - p.whole;
        // Differences at the rounding level of the panel sums cannot shrink
        // with further bisection.
        let noise = T::lit(64.0) * T::default_epsilon() * (left.abs() + right.abs());
        let resolved = diff.abs() <= fifteen * p.tol || diff.abs() <= noise;
        let exhausted = panels.len() + stack.len() >= MAX_PANELS;
        if resolved || p.depth >= MAX_DEPTH || exhausted {
            if !resolved || !diff.is_finite() {
                converged = false;
            }
            let integral = left + right + diff / fifteen;
            value += integral;
            error_estimate += diff.abs() / fifteen;
            panels.push(Panel { a: p.a, b: m, integral: left + diff / T::lit(30.0), fa: p.fa, fm: flm, fb: p.fm });
            panels.push(Panel { a: m, b: p.b, integral: right + diff / T::lit(30.0), fa: p.fm, fm: frm, fb: p.fb });
        } else {
            let tol = p.tol * half;
            stack.push(Pending { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right, tol, depth: p.depth + 1 });
            stack.push(Pending { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: left, tol, depth: p.depth + 1 });
        }
    }
    Quadrature { value, error_estimate, panels, converged }
}
