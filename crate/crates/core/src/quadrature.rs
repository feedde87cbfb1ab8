//! Adaptive Simpson quadrature.

use crate::error::{Error, Result};

/// Panel acceptance tolerance (absolute, per panel).
pub const PANEL_TOL: f64 = 1e-10;
const MAX_DEPTH: u32 = 48;
const INITIAL_PANELS: usize = 16;

/// `∫ₐᵇ f` by adaptive Simpson. A `+∞` sample makes the result `+∞`;
/// `NaN` is an error.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<f64> {
    integrate_tol(f, a, b, PANEL_TOL)
}

pub fn integrate_tol<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid("quadrature bounds must be finite"));
    }
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return integrate_tol(f, b, a, tol).map(|v| -v);
    }
    let width = (b - a) / INITIAL_PANELS as f64;
    let mut total = 0.0;
    for i in 0..INITIAL_PANELS {
        let lo = a + width * i as f64;
        let hi = if i + 1 == INITIAL_PANELS { b } else { lo + width };
        let mid = 0.5 * (lo + hi);
        let (flo, fmid, fhi) = (sample(&f, lo)?, sample(&f, mid)?, sample(&f, hi)?);
        if [flo, fmid, fhi].iter().any(|v| v.is_infinite()) {
            return Ok(f64::INFINITY);
        }
        let whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        total += panel(&f, lo, hi, flo, fmid, fhi, whole, tol, MAX_DEPTH)?;
        if total.is_infinite() {
            return Ok(total);
        }
    }
    Ok(total)
}

fn sample<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64> {
    let v = f(x);
    if v.is_nan() {
        return Err(Error::numerical(format!("quadrature: integrand is NaN at {x}")));
    }
    Ok(v)
}

#[allow(clippy::too_many_arguments)]
fn panel<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = sample(f, lm)?;
    let frm = sample(f, rm)?;
    if flm.is_infinite() || frm.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    // Roundoff floor so large-magnitude panels can still be accepted.
    let floor = 64.0 * f64::EPSILON * (left.abs() + right.abs());
    if delta.abs() <= 15.0 * tol.max(floor) {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::NonConvergence {
            what: "adaptive quadrature",
            iterations: MAX_DEPTH as usize,
            residual: delta.abs(),
        });
    }
    Ok(panel(f, a, m, fa, flm, fm, left, tol, depth - 1)?
        + panel(f, m, b, fm, frm, fb, right, tol, depth - 1)?)
}
