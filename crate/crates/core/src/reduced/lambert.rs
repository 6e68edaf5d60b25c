//! Principal branch of the Lambert W function.

use std::f64::consts::E;

use crate::error::{Error, Result};

const MAX_ITER: usize = 64;

/// `W₀(x)`, the solution of `W e^W = x` with `W ≥ -1`, by Halley iteration.
pub fn lambert_w0(x: f64) -> Result<f64> {
    let branch = -1.0 / E;
    if x.is_nan() || x < branch {
        return Err(Error::Domain(format!(
            "lambert_w0 is undefined for x = {x} (requires x >= -1/e)"
        )));
    }
    if x == branch {
        return Ok(-1.0);
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    if x > E {
        // Large arguments are better conditioned as w + ln w = ln x.
        return Ok(w_from_log(x.ln()));
    }
    let mut w = initial_guess(x);
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        let next = w - step;
        if !next.is_finite() {
            break;
        }
        let done = (next - w).abs() <= 4.0 * f64::EPSILON * (1.0 + next.abs());
        w = next.max(-1.0);
        if done {
            break;
        }
    }
    Ok(w)
}

/// `W₀(e^ln_x)` without forming `e^ln_x`, which may overflow.
pub fn lambert_w0_exp(ln_x: f64) -> Result<f64> {
    if ln_x.is_nan() {
        return Err(Error::Domain("lambert_w0_exp of NaN".into()));
    }
    if ln_x > 1.0 {
        Ok(w_from_log(ln_x))
    } else {
        lambert_w0(ln_x.exp())
    }
}

/// Solves `w + ln w = y` for `y > 1` (so `w > 1`) by Halley iteration.
fn w_from_log(y: f64) -> f64 {
    if y.is_infinite() {
        return f64::INFINITY;
    }
    let mut w = if y < 3.0 { 0.5 * y + 0.3 } else { y - y.ln() };
    for _ in 0..MAX_ITER {
        let f = w + w.ln() - y;
        let d1 = 1.0 + 1.0 / w;
        let d2 = -1.0 / (w * w);
        let step = f / (d1 - 0.5 * f * d2 / d1);
        let next = (w - step).max(f64::MIN_POSITIVE);
        let done = (next - w).abs() <= 4.0 * f64::EPSILON * next;
        w = next;
        if done {
            break;
        }
    }
    w
}

fn initial_guess(x: f64) -> f64 {
    if x < -0.25 {
        // Series about the branch point.
        let p = (2.0 * (E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else {
        x.ln_1p() * (1.0 - x.ln_1p().ln_1p() / (2.0 + x.ln_1p()))
    }
}
