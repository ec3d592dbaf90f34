use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 200;

/// Finds a root of `f` inside `[lo, hi]` with Brent's method.
///
/// Requires `f(lo)` and `f(hi)` to differ in sign (or one of them to vanish).
/// Either endpoint may carry either sign. Returns `x` with `|f(x)| <= tol` or
/// a final bracket no wider than about `tol`. Each step falls back to
/// bisection when interpolation does not shrink the bracket fast enough, so
/// convergence is never slower than bisection.
pub fn find_root<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", format!("must be positive, got {tol}")));
    }
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::invalid("bracket", format!("[{lo}, {hi}] is not finite")));
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.is_nan() || fb.is_nan() || fa.signum() == fb.signum() {
        return Err(Error::NoSignChange {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }

    let (mut c, mut fc) = (b, fb);
    let (mut d, mut e) = (b - a, b - a);
    for _ in 0..MAX_ITERATIONS {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // inverse quadratic interpolation, or secant when only two points
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * xm * s, 1.0 - s)
            } else {
                let q = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0)),
                    (q - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    Err(Error::NonConvergence {
        what: "root search",
        iterations: MAX_ITERATIONS,
        residual: fb.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Plain bisection, used as an independent oracle.
    fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let flo = f(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (f(mid) > 0.0) == (flo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn linear_root() {
        let x = find_root(|x| x - 0.5, 0.0, 1.0, 1e-12).unwrap();
        assert!((x - 0.5).abs() < 1e-12);
    }

    #[test]
    fn odd_cubic_root_at_origin() {
        let x = find_root(|k| k * (1.0 - k * k), -0.5, 0.5, 1e-12).unwrap();
        assert!(x.abs() < 1e-12);
    }

    #[test]
    fn exceedance_polynomial_root() {
        let f = |k: f64| k * (1.0 - k * k) - 8.0 * 0.02;
        let oracle = bisect(f, 0.0, 0.5774);
        assert!((oracle - 0.164447).abs() < 1e-5);
        let x = find_root(f, 0.0, 0.5774, 1e-12).unwrap();
        assert!((x - oracle).abs() < 1e-11);
        assert!(f(x).abs() < 1e-11);
    }

    #[test]
    fn endpoint_orientation_does_not_matter() {
        let f = |x: f64| x.cos() - x;
        let g = |x: f64| x - x.cos();
        let a = find_root(f, 0.0, 1.0, 1e-13).unwrap();
        let b = find_root(g, 0.0, 1.0, 1e-13).unwrap();
        let c = find_root(f, 1.0, 0.0, 1e-13).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!((a - c).abs() < 1e-12);
    }

    #[test]
    fn steep_and_flat_functions() {
        let x = find_root(|x| (x - 0.3).powi(3), 0.0, 1.0, 1e-15).unwrap();
        assert!((x - 0.3).abs() < 1e-4);
        let x = find_root(|x| (50.0 * (x - 0.7)).tanh(), 0.0, 1.0, 1e-14).unwrap();
        assert!((x - 0.7).abs() < 1e-12);
    }

    #[test]
    fn rejects_missing_sign_change() {
        let err = find_root(|x| x * x + 1.0, -1.0, 1.0, 1e-12).unwrap_err();
        assert!(matches!(err, Error::NoSignChange { .. }));
    }

    #[test]
    fn rejects_bad_tolerance() {
        assert!(find_root(|x| x, -1.0, 1.0, 0.0).is_err());
    }
}
