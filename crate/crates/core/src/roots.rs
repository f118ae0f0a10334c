//! Bracketed one-dimensional root finding.
//!
//! Both solvers keep a sign-change bracket at every step, so they cannot
//! wander off the interval even when the derivative is tiny or the function
//! is very steep (the repulsive wall of a Lennard-Jones pair, for example).

use crate::error::{Error, Result};

const MAX_ITER: usize = 200;

/// Plain bisection on `[lo, hi]` until the bracket is narrower than `xtol`.
pub fn bisect<F>(f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::convergence(format!(
            "no sign change on [{lo}, {hi}]: f(lo) = {flo:e}, f(hi) = {fhi:e}"
        )));
    }
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= xtol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let fmid = f(mid);
        if fmid == 0.0 {
            return Ok(mid);
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One Newton step from `x`, accepted only if it stays inside `[lo, hi]` and
/// does not increase `|f|`.
pub fn newton_polish<F, D>(f: F, df: D, x: f64, lo: f64, hi: f64) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let fx = f(x);
    let dfx = df(x);
    if fx == 0.0 || dfx == 0.0 || !dfx.is_finite() {
        return x;
    }
    let candidate = x - fx / dfx;
    if candidate < lo || candidate > hi || !candidate.is_finite() {
        return x;
    }
    if f(candidate).abs() <= fx.abs() {
        candidate
    } else {
        x
    }
}

/// Newton's method safeguarded by bisection (the classic `rtsafe` scheme).
///
/// `f` must change sign on `[lo, hi]`. Iterates until the step is below
/// `xtol` or `f` vanishes exactly.
pub fn safeguarded_newton<F, D>(f: F, df: D, lo: f64, hi: f64, xtol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::convergence(format!(
            "no sign change on [{lo}, {hi}]: f(lo) = {flo:e}, f(hi) = {fhi:e}"
        )));
    }
    // orient so that f(neg) < 0 < f(pos)
    let (mut neg, mut pos) = if flo < 0.0 { (lo, hi) } else { (hi, lo) };
    let mut x = 0.5 * (lo + hi);
    let mut dx_old = (hi - lo).abs();
    let mut dx = dx_old;
    let mut fx = f(x);
    let mut dfx = df(x);
    for _ in 0..MAX_ITER {
        let newton_leaves = ((x - pos) * dfx - fx) * ((x - neg) * dfx - fx) > 0.0;
        let too_slow = (2.0 * fx).abs() > (dx_old * dfx).abs();
        if newton_leaves || too_slow || !dfx.is_finite() {
            dx_old = dx;
            dx = 0.5 * (pos - neg);
            x = neg + dx;
        } else {
            dx_old = dx;
            dx = fx / dfx;
            x -= dx;
        }
        if dx.abs() < xtol {
            return Ok(x);
        }
        fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        dfx = df(x);
        if fx < 0.0 {
            neg = x;
        } else {
            pos = x;
        }
        if (pos - neg).abs() < xtol {
            return Ok(x);
        }
    }
    Err(Error::convergence(format!(
        "safeguarded Newton did not converge within {MAX_ITER} iterations near {x}"
    )))
}
