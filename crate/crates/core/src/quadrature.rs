//! Small numerical kernels shared by the oracles: Simpson rules, adaptive
//! Simpson and bracketed bisection.

/// Simpson's rule on a single interval `[a, b]`.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let m = 0.5 * (a + b);
    (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b))
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(&f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Bisection for an increasing sign change: `f(lo) < 0 <= f(hi)`.
///
/// Runs until the bracket can no longer be halved in floating point or
/// `|f(mid)| <= residual_tol`, and returns the endpoint with the smaller
/// residual.
pub fn bisect_increasing<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, residual_tol: f64) -> f64 {
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v.abs() <= residual_tol && residual_tol > 0.0 {
            return mid;
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if f(lo).abs() < f(hi).abs() {
        lo
    } else {
        hi
    }
}

/// Locate the crossing of a monotone sign change of `f` on `[a, b]`
/// (`f(a)` and `f(b)` of opposite sign, either direction).
pub fn crossing<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let fa = f(a);
    if fa < 0.0 {
        bisect_increasing(&f, a, b, 0.0)
    } else {
        bisect_increasing(|t| -f(t), a, b, 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adaptive_simpson_integrates_exp() {
        let v = adaptive_simpson(f64::exp, 0.0, 1.0, 1e-13);
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn adaptive_simpson_handles_kink() {
        let v = adaptive_simpson(|t: f64| (t - 0.3).abs(), 0.0, 1.0, 1e-12);
        let exact = 0.5 * 0.3 * 0.3 + 0.5 * 0.7 * 0.7;
        assert!((v - exact).abs() < 1e-10);
    }

    #[test]
    fn bisection_finds_sqrt2() {
        let r = bisect_increasing(|t| t * t - 2.0, 0.0, 2.0, 0.0);
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn crossing_either_direction() {
        let r = crossing(|t| 1.0 - t, 0.0, 3.0);
        assert!((r - 1.0).abs() < 1e-15);
    }
}
