//! Safeguarded scalar root finding: bisection with Newton acceleration when a
//! derivative is available.

use crate::error::{Error, Result};

/// Find the root of `f` inside the bracket `[lo, hi]`, where `f(lo)` and
/// `f(hi)` have opposite signs (either may be zero). `f` returns the value
/// and its derivative; Newton steps are taken while they stay inside the
/// bracket, bisection otherwise, so convergence is guaranteed.
pub fn newton_bisect(
    mut f: impl FnMut(f64) -> (f64, f64),
    lo: f64,
    hi: f64,
    xtol: f64,
    ftol: f64,
) -> Result<f64> {
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::InvalidInput(format!(
            "newton_bisect: no sign change on [{lo}, {hi}]"
        )));
    }
    // Orient so the root lies between xl (f < 0) and xh (f > 0).
    let (mut xl, mut xh) = if flo < 0.0 { (lo, hi) } else { (hi, lo) };
    let mut x = 0.5 * (lo + hi);
    let mut dx_old = (hi - lo).abs();
    let mut dx = dx_old;
    let (mut fx, mut dfx) = f(x);
    for _ in 0..128 {
        let newton_ok = {
            let step_in_bracket = ((x - xh) * dfx - fx) * ((x - xl) * dfx - fx) < 0.0;
            let fast_enough = (2.0 * fx).abs() < (dx_old * dfx).abs();
            step_in_bracket && fast_enough
        };
        if newton_ok {
            dx_old = dx;
            dx = fx / dfx;
            x -= dx;
        } else {
            dx_old = dx;
            dx = 0.5 * (xh - xl);
            x = xl + dx;
        }
        let (v, d) = f(x);
        fx = v;
        dfx = d;
        if fx.abs() <= ftol || dx.abs() <= xtol {
            return Ok(x);
        }
        if fx < 0.0 {
            xl = x;
        } else {
            xh = x;
        }
    }
    Err(Error::NonConvergence(format!(
        "newton_bisect: stalled at x={x}, f={fx}"
    )))
}

/// Plain bisection for a continuous function with a sign change on `[lo, hi]`.
/// Stops when `|f| <= ftol` or the bracket width drops below `xtol`.
pub fn bisect(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    xtol: f64,
    ftol: f64,
    max_iter: usize,
) -> Result<f64> {
    let flo = f(lo);
    if flo == 0.0 {
        return Ok(lo);
    }
    let fhi = f(hi);
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::InvalidInput(format!(
            "bisect: no sign change on [{lo}, {hi}]"
        )));
    }
    let (mut xl, mut xh) = if flo < 0.0 { (lo, hi) } else { (hi, lo) };
    let mut x = 0.5 * (xl + xh);
    for _ in 0..max_iter {
        x = 0.5 * (xl + xh);
        let fx = f(x);
        if fx.abs() <= ftol {
            return Ok(x);
        }
        if fx < 0.0 {
            xl = x;
        } else {
            xh = x;
        }
        if (xh - xl).abs() <= xtol * (1.0 + x.abs()) {
            return Ok(0.5 * (xl + xh));
        }
    }
    Ok(x)
}
