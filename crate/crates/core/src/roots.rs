//! Bracketed scalar root finding.

/// Bisection on a sign change of `f` over `[lo, hi]`.
///
/// Returns the endpoint of the final bracket closest to the root in value.
/// The caller guarantees `f(lo)` and `f(hi)` have opposite signs (or one is zero).
pub(crate) fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, xtol: f64) -> f64 {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return lo;
    }
    if f_hi == 0.0 {
        return hi;
    }
    debug_assert!(f_lo.signum() != f_hi.signum(), "bisect without a sign change");
    for _ in 0..200 {
        if hi - lo <= xtol {
            break;
        }
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    lo + 0.5 * (hi - lo)
}

/// Root of an increasing function: coarse bisection followed by
/// Newton steps that are rejected whenever they leave the bracket.
///
/// `eval` returns `(value, derivative)`.
pub(crate) fn increasing_root<F: Fn(f64) -> (f64, f64)>(
    eval: F,
    mut lo: f64,
    mut hi: f64,
    xtol: f64,
) -> f64 {
    let mut x = lo + 0.5 * (hi - lo);
    for _ in 0..300 {
        let (fx, dfx) = eval(x);
        if fx == 0.0 {
            return x;
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        let next = if dfx > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            lo + 0.5 * (hi - lo)
        };
        let step = (next - x).abs();
        x = next;
        if step <= xtol || hi - lo <= xtol {
            break;
        }
    }
    x
}
