//! Globally adaptive Gauss–Kronrod (7, 15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-9;
const MAX_INTERVALS: usize = 4000;

#[allow(clippy::excessive_precision)]
const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
#[allow(clippy::excessive_precision)]
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub abs_error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut k15 = fc * KRONROD_WEIGHTS[7];
    let mut g7 = fc * GAUSS_WEIGHTS[3];
    for (j, (&x, &w)) in KRONROD_NODES[..7].iter().zip(&KRONROD_WEIGHTS[..7]).enumerate() {
        let pair = f(center - half * x) + f(center + half * x);
        k15 += w * pair;
        if j % 2 == 1 {
            g7 += GAUSS_WEIGHTS[j / 2] * pair;
        }
    }
    Panel {
        a,
        b,
        value: k15 * half,
        error: ((k15 - g7) * half).abs(),
    }
}

/// Integrates `f` over `[a, b]` to an estimated absolute error of `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    integrate_with_breaks(f, &[a, b], tol).map(|q| q.value)
}

/// Integrates over consecutive panels `[breaks[i], breaks[i + 1]]`, refining
/// the panel with the largest error estimate until the summed estimate drops
/// below `tol`. Extra breaks are the way to tell the integrator where the
/// integrand misbehaves (kinks, square-root endpoints).
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(f: F, breaks: &[f64], tol: f64) -> Result<Quadrature> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", format!("must be positive, got {tol}")));
    }
    if breaks.len() < 2 {
        return Err(Error::invalid("breaks", "need at least two points"));
    }
    if breaks.windows(2).any(|w| !(w[0] <= w[1])) || breaks.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid(
            "interval",
            format!("integration limits must be finite and nondecreasing, got {breaks:?}"),
        ));
    }

    let mut heap: BinaryHeap<Panel> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| kronrod(&f, w[0], w[1]))
        .collect();
    let total_error = |heap: &BinaryHeap<Panel>| heap.iter().map(|p| p.error).sum::<f64>();

    loop {
        let err = total_error(&heap);
        let value: f64 = heap.iter().map(|p| p.value).sum();
        if !value.is_finite() || !err.is_finite() {
            return Err(Error::NonConvergence {
                what: "quadrature",
                iterations: heap.len(),
                residual: err,
            });
        }
        if err <= tol {
            return Ok(Quadrature {
                value,
                abs_error: err,
                intervals: heap.len(),
            });
        }
        if heap.len() >= MAX_INTERVALS {
            return Err(Error::NonConvergence {
                what: "quadrature",
                iterations: heap.len(),
                residual: err,
            });
        }
        let worst = heap.pop().expect("nonempty while error > tol");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // the panel cannot be split further in double precision
            return Err(Error::NonConvergence {
                what: "quadrature",
                iterations: heap.len(),
                residual: err,
            });
        }
        heap.push(kronrod(&f, worst.a, mid));
        heap.push(kronrod(&f, mid, worst.b));
    }
}

/// Breakpoints for an integrand that vanishes like a square root at both
/// `a` and `b`: split at `peak`, then geometrically toward each endpoint.
pub fn sqrt_endpoint_breaks(a: f64, peak: f64, b: f64, levels: u32) -> Vec<f64> {
    let mut left: Vec<f64> = (0..levels)
        .map(|j| a + (peak - a) * 0.5f64.powi(j as i32 + 1))
        .collect();
    left.reverse();
    let right = (0..levels).map(|j| b - (b - peak) * 0.5f64.powi(j as i32 + 1));
    let mut out = Vec::with_capacity(2 * levels as usize + 3);
    out.push(a);
    out.extend(left.into_iter().filter(|&x| x > a && x < peak));
    out.push(peak);
    out.extend(right.filter(|&x| x > peak && x < b));
    out.push(b);
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial() {
        let v = integrate(|x| x * x, 0.0, 1.0, 1e-10).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn exceedance_limit_integrand() {
        let v = integrate(|k| 4.0 * k * (1.0 - k * k), 0.0, 1.0, 1e-10).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sine() {
        let v = integrate(f64::sin, 0.0, PI, 1e-10).unwrap();
        assert!((v - 2.0).abs() < 1e-10);
    }

    #[test]
    fn square_root_endpoints() {
        // quarter disc: integral of sqrt(1 - x^2) over [-1, 1] is pi / 2
        let breaks = sqrt_endpoint_breaks(-1.0, 0.0, 1.0, 40);
        let q = integrate_with_breaks(|x| (1.0 - x * x).max(0.0).sqrt(), &breaks, 1e-11).unwrap();
        assert!((q.value - PI / 2.0).abs() < 1e-10, "{}", q.value);
        // plain adaptive refinement gets there too, with more panels
        let v = integrate(|x| (1.0 - x * x).max(0.0).sqrt(), -1.0, 1.0, 1e-9).unwrap();
        assert!((v - PI / 2.0).abs() < 1e-9);
    }

    #[test]
    fn empty_interval_is_zero() {
        assert_eq!(integrate(|x| x, 2.0, 2.0, 1e-9).unwrap(), 0.0);
    }

    #[test]
    fn reversed_limits_rejected() {
        assert!(integrate(|x| x, 1.0, 0.0, 1e-9).is_err());
    }

    #[test]
    fn non_integrable_reports_failure() {
        let err = integrate(|x| 1.0 / x, 0.0, 1.0, 1e-9).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }));
    }

    #[test]
    fn linearity() {
        let tol = 1e-10;
        let f = |x: f64| x.exp();
        let g = |x: f64| (3.0 * x).cos();
        let (alpha, beta) = (0.7, -2.5);
        let lhs = integrate(|x| alpha * f(x) + beta * g(x), 0.0, 2.0, tol).unwrap();
        let rhs = alpha * integrate(f, 0.0, 2.0, tol).unwrap() + beta * integrate(g, 0.0, 2.0, tol).unwrap();
        assert!((lhs - rhs).abs() <= 2.0 * tol * (1.0 + alpha.abs() + beta.abs()));
    }

    #[test]
    fn breaks_are_sorted_and_bounded() {
        let b = sqrt_endpoint_breaks(0.1, 0.5, 0.9, 30);
        assert_eq!(b.first(), Some(&0.1));
        assert_eq!(b.last(), Some(&0.9));
        assert!(b.windows(2).all(|w| w[0] < w[1]));
        assert!(b.contains(&0.5));
    }
}
