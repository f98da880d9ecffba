//! Bracketed Newton–Raphson with bisection fallback.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    /// Stop once `|f(x)|` is at most this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            tolerance: 1e-8,
            max_iterations: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Finds a root of `f` inside `[lo, hi]`, where `f(lo)` and `f(hi)` have
/// opposite signs. `f` returns `(value, derivative)`.
///
/// Each iteration shrinks the bracket around the current point, then takes
/// the Newton step if it stays strictly inside the bracket and at least
/// halves the previous step; otherwise bisects.
pub fn safeguarded_newton<F>(mut f: F, lo: f64, hi: f64, start: f64, opts: NewtonOptions) -> Result<Root>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    let (flo, _) = f(lo)?;
    let (fhi, _) = f(hi)?;
    if flo.abs() <= opts.tolerance {
        return Ok(Root { x: lo, residual: flo, iterations: 0 });
    }
    if fhi.abs() <= opts.tolerance {
        return Ok(Root { x: hi, residual: fhi, iterations: 0 });
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoRoot);
    }
    // orient so that f(a) < 0 < f(b)
    let (mut a, mut b) = if flo < 0.0 { (lo, hi) } else { (hi, lo) };
    let mut x = if start > lo.min(hi) && start < lo.max(hi) { start } else { 0.5 * (lo + hi) };
    let mut prev_step = (hi - lo).abs();
    let mut step = prev_step;

    for it in 1..=opts.max_iterations {
        let (fx, dfx) = f(x)?;
        if fx.abs() <= opts.tolerance {
            return Ok(Root { x, residual: fx, iterations: it });
        }
        if fx < 0.0 {
            a = x;
        } else {
            b = x;
        }
        let (left, right) = (a.min(b), a.max(b));
        let newton = x - fx / dfx;
        let inside = newton.is_finite() && newton > left && newton < right;
        let before = step;
        if inside && (newton - x).abs() * 2.0 <= prev_step.abs() {
            prev_step = before;
            step = newton - x;
            x = newton;
        } else {
            prev_step = before;
            let mid = 0.5 * (left + right);
            step = mid - x;
            x = mid;
        }
        if (right - left) <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
            let (fx, _) = f(x)?;
            if fx.abs() <= opts.tolerance {
                return Ok(Root { x, residual: fx, iterations: it });
            }
            return Err(Error::NoRoot);
        }
    }
    Err(Error::NoRoot)
}
