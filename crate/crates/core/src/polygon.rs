//! Triangle and quadrilateral areas, and the maximal-area (cyclic) polygon
//! for an arbitrary side multiset.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::is_polygon;

pub const DEFAULT_TOL: f64 = 1e-12;
const MAX_ITERATIONS: usize = 200;
const RADICAND_SLACK: f64 = 1e-12;

fn check_lengths(sides: &[f64]) -> Result<()> {
    if let Some(bad) = sides.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(Error::invalid(
            "sides",
            format!("side lengths must be finite and nonnegative, got {bad}"),
        ));
    }
    Ok(())
}

fn clamp_radicand(radicand: f64, sides: &[f64]) -> Result<f64> {
    if radicand < -RADICAND_SLACK {
        return Err(Error::Infeasible { sides: sides.to_vec() });
    }
    Ok(radicand.max(0.0).sqrt())
}

/// Triangle area from its sides. Degenerate triangles give 0.
pub fn heron_area(a: f64, b: f64, c: f64) -> Result<f64> {
    check_lengths(&[a, b, c])?;
    let s = 0.5 * (a + b + c);
    clamp_radicand(s * (s - a) * (s - b) * (s - c), &[a, b, c])
}

/// Area of the cyclic quadrilateral with these sides, which is the largest
/// quadrilateral they can bound.
pub fn brahmagupta_area(a: f64, b: f64, c: f64, d: f64) -> Result<f64> {
    let sides = [a, b, c, d];
    check_lengths(&sides)?;
    if !is_polygon(&sides) {
        return Err(Error::Infeasible { sides: sides.to_vec() });
    }
    let s = 0.5 * (a + b + c + d);
    clamp_radicand((s - a) * (s - b) * (s - c) * (s - d), &sides)
}

/// The polygon inscribed in a circle with the given sides, in input order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CyclicSolution {
    pub circumradius: f64,
    /// Whether the circle's center lies inside the polygon. When it does not,
    /// the longest side's central angle equals the sum of the others.
    pub center_inside: bool,
    /// `2 asin(side / 2R)` for each side.
    pub central_angles: Vec<f64>,
    pub area: f64,
    /// Angle-sum residual at the solved radius, in radians.
    pub residual: f64,
    longest: usize,
}

impl CyclicSolution {
    /// Places the vertices on the circumcircle (centered at the origin),
    /// walking the sides in input order. The longest side is walked backwards
    /// when the center lies outside.
    pub fn vertices(&self) -> Vec<[f64; 2]> {
        let mut phi: f64 = 0.0;
        let mut out = Vec::with_capacity(self.central_angles.len());
        for (i, &theta) in self.central_angles.iter().enumerate() {
            out.push([self.circumradius * phi.cos(), self.circumradius * phi.sin()]);
            if !self.center_inside && i == self.longest {
                phi -= theta;
            } else {
                phi += theta;
            }
        }
        out
    }

    /// Angle-sum closure error of the configuration.
    pub fn closure_error(&self) -> f64 {
        let total: f64 = self.central_angles.iter().sum();
        if self.center_inside {
            (total - 2.0 * PI).abs()
        } else {
            let longest = self.central_angles[self.longest];
            (total - 2.0 * longest).abs()
        }
    }
}

fn half_angle(side: f64, radius: f64) -> f64 {
    (side / (2.0 * radius)).min(1.0).asin()
}

/// Bisection on a monotone residual until `|residual| <= tol` or the bracket
/// collapses in double precision. Returns the final point and `|residual|`.
fn bisect_monotone(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<(f64, f64)> {
    let f_lo = f(lo);
    for _ in 0..MAX_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm.abs() <= tol || mid <= lo || mid >= hi {
            return Ok((mid, fm.abs()));
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mid = 0.5 * (lo + hi);
    Err(Error::NonConvergence {
        what: "circumradius search",
        iterations: MAX_ITERATIONS,
        residual: f(mid).abs(),
    })
}

/// Solves for the cyclic polygon with the given sides and returns its area,
/// the maximum over all polygons with those sides.
pub fn max_cyclic_area(sides: &[f64], tol: f64) -> Result<CyclicSolution> {
    if sides.len() < 3 {
        return Err(Error::invalid(
            "sides",
            format!("a polygon needs at least 3 sides, got {}", sides.len()),
        ));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", format!("must be positive, got {tol}")));
    }
    if sides.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Error::invalid("sides", "side lengths must be positive and finite"));
    }
    if !is_polygon(sides) {
        return Err(Error::Infeasible { sides: sides.to_vec() });
    }

    let (longest, &s_max) = sides
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty");
    let perimeter: f64 = sides.iter().sum();
    let r_min = 0.5 * s_max;

    let inside = |r: f64| sides.iter().map(|&s| 2.0 * half_angle(s, r)).sum::<f64>() - 2.0 * PI;
    let outside = |r: f64| {
        sides
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                let theta = 2.0 * half_angle(s, r);
                if i == longest {
                    -theta
                } else {
                    theta
                }
            })
            .sum::<f64>()
    };

    let center_inside = inside(r_min) >= 0.0;
    let (radius, residual) = if center_inside {
        // inside(perimeter) < 0 because every half-angle is at most pi/6 there
        bisect_monotone(inside, r_min, perimeter, tol)?
    } else {
        let mut hi = perimeter.max(r_min * 2.0);
        let mut grow = 0;
        while outside(hi) <= 0.0 {
            hi *= 2.0;
            grow += 1;
            if grow > MAX_ITERATIONS || !hi.is_finite() {
                return Err(Error::NonConvergence {
                    what: "circumradius bracket",
                    iterations: grow,
                    residual: outside(hi).abs(),
                });
            }
        }
        bisect_monotone(outside, r_min, hi, tol)?
    };
    let central_angles: Vec<f64> = sides.iter().map(|&s| 2.0 * half_angle(s, radius)).collect();
    let half_r2 = 0.5 * radius * radius;
    let area = central_angles
        .iter()
        .enumerate()
        .map(|(i, &theta)| {
            let t = half_r2 * theta.sin();
            if !center_inside && i == longest {
                -t
            } else {
                t
            }
        })
        .sum::<f64>();

    Ok(CyclicSolution {
        circumradius: radius,
        center_inside,
        central_angles,
        area,
        residual,
        longest,
    })
}

/// Area of the regular polygon with `n` sides of length `side`.
pub fn regular_polygon_area(n: usize, side: f64) -> f64 {
    let n = n as f64;
    n * side * side / (4.0 * (PI / n).tan())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heron_fixtures() {
        let third = 1.0 / 3.0;
        let eq = heron_area(third, third, third).unwrap();
        assert!((eq - 3f64.sqrt() / 36.0).abs() < 1e-15);
        assert!((eq - 0.0481125).abs() < 1e-7);
        assert_eq!(heron_area(0.5, 0.3, 0.2).unwrap(), 0.0);
        let v = heron_area(0.4, 0.4, 0.2).unwrap();
        assert!((v - (0.5f64 * 0.1 * 0.1 * 0.3).sqrt()).abs() < 1e-15);
        assert!((v - 0.038729).abs() < 1e-6);
    }

    #[test]
    fn heron_rejects_impossible_triangle() {
        assert!(matches!(heron_area(0.8, 0.1, 0.1), Err(Error::Infeasible { .. })));
        assert!(heron_area(-0.1, 0.5, 0.5).is_err());
    }

    #[test]
    fn brahmagupta_fixtures() {
        assert!((brahmagupta_area(0.25, 0.25, 0.25, 0.25).unwrap() - 1.0 / 16.0).abs() < 1e-15);
        let v = brahmagupta_area(0.1, 0.2, 0.3, 0.35).unwrap();
        let oracle = (0.375f64 * 0.275 * 0.175 * 0.125).sqrt();
        assert!((v - oracle).abs() < 1e-15);
        assert!((v - 0.047495).abs() < 1e-5);
        assert!(brahmagupta_area(0.5, 0.2, 0.2, 0.1).is_err());
    }

    #[test]
    fn cyclic_matches_heron() {
        let third = 1.0 / 3.0;
        let sol = max_cyclic_area(&[third, third, third], DEFAULT_TOL).unwrap();
        assert!(sol.center_inside);
        assert!((sol.area - 3f64.sqrt() / 36.0).abs() < 1e-9);
        // obtuse triangle puts the center outside
        let sol = max_cyclic_area(&[0.45, 0.3, 0.25], DEFAULT_TOL).unwrap();
        assert!(!sol.center_inside);
        assert!((sol.area - heron_area(0.45, 0.3, 0.25).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn regular_hexagon() {
        let sol = max_cyclic_area(&[1.0 / 6.0; 6], DEFAULT_TOL).unwrap();
        assert!((sol.area - 3f64.sqrt() / 24.0).abs() < 1e-9);
        assert!((sol.area - 0.0721688).abs() < 1e-7);
        assert!((sol.circumradius - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn right_triangle_is_on_the_branch_boundary() {
        let sol = max_cyclic_area(&[0.3, 0.4, 0.5], DEFAULT_TOL).unwrap();
        assert!((sol.circumradius - 0.25).abs() < 1e-9);
        assert!((sol.area - 0.06).abs() < 1e-9);
    }

    #[test]
    fn invariants_of_the_solution() {
        for sides in [
            vec![0.1, 0.2, 0.3, 0.35],
            vec![0.45, 0.05, 0.2, 0.1, 0.15],
            vec![0.4, 0.1, 0.1, 0.1, 0.1, 0.15],
        ] {
            let sol = max_cyclic_area(&sides, DEFAULT_TOL).unwrap();
            assert!(sol.closure_error() < 1e-9);
            for (s, t) in sides.iter().zip(&sol.central_angles) {
                assert!((s - 2.0 * sol.circumradius * (t / 2.0).sin()).abs() < 1e-9);
                if sol.center_inside {
                    assert!(*t > 0.0 && *t < PI);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            max_cyclic_area(&[0.5, 0.3, 0.2], DEFAULT_TOL),
            Err(Error::Infeasible { .. })
        ));
        assert!(max_cyclic_area(&[0.5, 0.5], DEFAULT_TOL).is_err());
        assert!(max_cyclic_area(&[0.3, 0.3, 0.0, 0.3], DEFAULT_TOL).is_err());
        assert!(max_cyclic_area(&[0.3, 0.3, 0.3], 0.0).is_err());
    }
}
