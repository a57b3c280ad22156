//! Scalar root finding shared by the Hamiltonian and auxiliary-root solvers.

use crate::error::{Error, Result};

const MAX_ITER: usize = 300;

/// Safeguarded Newton iteration on a sign-changing bracket `[a, b]`.
///
/// `f` returns the value and derivative. Newton steps that leave the current
/// bracket fall back to bisection, so the iteration always terminates.
pub fn newton_bracket<F>(f: F, a: f64, b: f64) -> Result<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let (mut flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if !(flo.is_finite() && fhi.is_finite()) || flo.signum() == fhi.signum() {
        return Err(Error::NoConvergence(format!("no sign change on [{lo}, {hi}]: f = ({flo}, {fhi})")));
    }
    let mut x = 0.5 * (lo + hi);
    let mut best = (f64::INFINITY, x);
    for _ in 0..MAX_ITER {
        let (fx, dfx) = f(x);
        if !fx.is_finite() {
            return Err(Error::NoConvergence(format!("non-finite value at {x}")));
        }
        if fx.abs() < best.0 {
            best = (fx.abs(), x);
        }
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        let width = hi - lo;
        if width <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(1e-300) {
            return Ok(best.1);
        }
        let newton = x - fx / dfx;
        if dfx.is_finite() && dfx != 0.0 && newton > lo && newton < hi {
            let step = (newton - x).abs();
            x = newton;
            if step <= 2.0 * f64::EPSILON * x.abs().max(1e-300) {
                let (fn_, _) = f(x);
                return Ok(if fn_.abs() <= best.0 { x } else { best.1 });
            }
        } else {
            x = 0.5 * (lo + hi);
        }
    }
    Ok(best.1)
}

/// Grows `hi` geometrically away from `lo` until `f(lo)` and `f(hi)` differ in sign.
pub fn grow_bracket<F>(f: F, lo: f64, first: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let flo = f(lo);
    let mut step = first - lo;
    for _ in 0..200 {
        let hi = lo + step;
        let fhi = f(hi);
        if !fhi.is_finite() {
            break;
        }
        if fhi == 0.0 || fhi.signum() != flo.signum() {
            return Ok(hi);
        }
        step *= 2.0;
    }
    Err(Error::NoConvergence(format!("could not bracket a root starting from {lo}")))
}

/// Smallest root of `f` in `[lo, hi]`: forward scan to the first sign change,
/// then Newton polish. Returns `None` if no sign change is found.
pub fn smallest_root<F>(f: F, lo: f64, hi: f64) -> Option<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    let step = (1e-2f64).min((hi - lo) / 100.0);
    if !(step > 0.0) {
        return None;
    }
    let mut a = lo;
    let mut fa = f(a).0;
    if fa == 0.0 {
        return Some(a);
    }
    loop {
        let b = (a + step).min(hi);
        let fb = f(b).0;
        if fb == 0.0 {
            return Some(b);
        }
        if fb.signum() != fa.signum() {
            return newton_bracket(&f, a, b).ok();
        }
        if b >= hi {
            return None;
        }
        a = b;
        fa = fb;
    }
}
