//! Bracketing root finding and scalar minimisation.

use crate::error::{domain, Result};

/// Default bracket and iteration count for dimension equations.
pub const BRACKET: (f64, f64) = (0.0, 64.0);
pub const ITERATIONS: usize = 200;

/// Root of a strictly decreasing function on `[lo, hi]` by bisection.
///
/// Returns the midpoint of the final bracket together with that bracket.
/// Fails when `f(lo) < 0` or `f(hi) > 0`, i.e. when the root is not
/// bracketed. An exact zero at either end is returned immediately.
pub fn bisect_decreasing<F>(f: F, lo: f64, hi: f64, iterations: usize) -> Result<(f64, (f64, f64))>
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok((a, (a, a)));
    }
    if fb == 0.0 {
        return Ok((b, (b, b)));
    }
    if !(fa > 0.0 && fb < 0.0) {
        return domain(format!(
            "root not bracketed in [{lo}, {hi}]: f(lo) = {fa}, f(hi) = {fb}"
        ));
    }
    for _ in 0..iterations {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok((mid, (mid, mid)));
        }
        if fm > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    // Pick whichever endpoint has the smaller residual.
    let x = if f(a).abs() <= f(b).abs() { a } else { b };
    Ok((x, (a, b)))
}

/// Golden-section search for the minimum of a unimodal function on `[a, b]`,
/// stopping once the bracket is narrower than `tol`.
pub fn golden_section_min<F>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_linear() {
        let (x, (a, b)) = bisect_decreasing(|x| 1.0 - x, 0.0, 64.0, ITERATIONS).unwrap();
        assert_eq!(x, 1.0);
        assert!(a <= x && x <= b);
    }

    #[test]
    fn bisect_sqrt_two() {
        let (x, _) = bisect_decreasing(|x| 2.0 - x * x, 0.0, 2.0, ITERATIONS).unwrap();
        assert!((x - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn unbracketed_root_fails() {
        assert!(bisect_decreasing(|x| 100.0 - x, 0.0, 64.0, ITERATIONS).is_err());
        assert!(bisect_decreasing(|x| -1.0 - x, 0.0, 64.0, ITERATIONS).is_err());
    }

    #[test]
    fn golden_section_parabola() {
        let x = golden_section_min(|x| (x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-7);
    }
}
