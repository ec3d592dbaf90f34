//! Areas and order statistics of the pieces of a broken unit stick: closed
//! forms next to the Monte Carlo estimators that check them.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::montecarlo::{indicator, Experiment, Tally};
use crate::numerics::quadrature::{integrate_with_breaks, sqrt_endpoint_breaks, DEFAULT_TOL};
use crate::numerics::roots::find_root;
use crate::numerics::stats::{Estimate, StreamingStats};
use crate::polygon::{brahmagupta_area, heron_area};
use crate::sampling::{is_polygon, sample_pieces_into, RandomStream};

pub const MIN_SAMPLES: u64 = 1000;
/// Area of the equilateral triangle of perimeter 1, the largest possible.
pub const MAX_TRIANGLE_AREA: f64 = 0.048_112_522_432_468_81;
pub const SPLIT_LARGEST_CAP: u32 = 10_000;

pub(crate) fn require_samples(exp: &Experiment) -> Result<()> {
    if exp.samples < MIN_SAMPLES {
        return Err(Error::invalid(
            "samples",
            format!("need at least {MIN_SAMPLES}, got {}", exp.samples),
        ));
    }
    Ok(())
}

/// Running maximum; starts at negative infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum(pub f64);

impl Default for Maximum {
    fn default() -> Self {
        Maximum(f64::NEG_INFINITY)
    }
}

impl Tally for Maximum {
    fn merge(&mut self, other: Self) {
        self.0 = self.0.max(other.0);
    }
}

impl Maximum {
    pub fn observe(&mut self, x: f64) {
        self.0 = self.0.max(x);
    }
}

/// An expectation estimated by rejection: the mean over accepted samples,
/// plus the acceptance rate itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionalEstimate {
    pub mean: Estimate,
    pub acceptance: Estimate,
    /// Largest piece seen among accepted samples.
    pub max_accepted_piece: f64,
}

fn three_pieces(stream: &mut RandomStream) -> [f64; 3] {
    let (u, v) = (stream.uniform(), stream.uniform());
    let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
    [lo, hi - lo, 1.0 - hi]
}

fn four_pieces(stream: &mut RandomStream) -> [f64; 4] {
    let mut b = [stream.uniform(), stream.uniform(), stream.uniform()];
    b.sort_by(f64::total_cmp);
    [b[0], b[1] - b[0], b[2] - b[1], 1.0 - b[2]]
}

fn unit_triangle_area(p: &[f64; 3]) -> f64 {
    heron_area(p[0], p[1], p[2]).unwrap_or(0.0)
}

pub fn exact_expected_triangle_area() -> f64 {
    PI / 105.0
}

type ConditionalTally = (StreamingStats, StreamingStats, Maximum);

fn finish_conditional(exp: &Experiment, t: ConditionalTally) -> Result<ConditionalEstimate> {
    Ok(ConditionalEstimate {
        mean: t.1.finalize(exp.seed)?,
        acceptance: t.0.finalize(exp.seed)?,
        max_accepted_piece: t.2 .0,
    })
}

/// Mean triangle area over three-piece partitions that form a triangle.
pub fn mc_expected_triangle_area(exp: &Experiment) -> Result<ConditionalEstimate> {
    require_samples(exp)?;
    let t = exp.run(|_, s, t: &mut ConditionalTally| {
        let p = three_pieces(s);
        let ok = is_polygon(&p);
        indicator(&mut t.0, ok);
        if ok {
            t.1.push(unit_triangle_area(&p));
            t.2.observe(p.iter().copied().fold(0.0, f64::max));
        }
    });
    finish_conditional(exp, t)
}

/// Final state of the split-the-largest-piece process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcessOutcome {
    pub perimeter: f64,
    pub area: f64,
    pub pieces: [f64; 3],
    pub rounds: u32,
}

/// Breaks the current segment into three; if the pieces do not form a
/// triangle, repeats on the largest piece (first one on ties).
pub fn simulate_split_largest(stream: &mut RandomStream) -> Result<ProcessOutcome> {
    let mut length = 1.0;
    for round in 1..=SPLIT_LARGEST_CAP {
        let unit = three_pieces(stream);
        if is_polygon(&unit) {
            return Ok(ProcessOutcome {
                perimeter: length,
                area: length * length * unit_triangle_area(&unit),
                pieces: unit.map(|x| x * length),
                rounds: round,
            });
        }
        let mut largest = 0;
        for i in 1..3 {
            if unit[i] > unit[largest] {
                largest = i;
            }
        }
        length *= unit[largest];
    }
    Err(Error::CapExceeded {
        cap: SPLIT_LARGEST_CAP as usize,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitLargestReport {
    pub perimeter: Estimate,
    pub area: Estimate,
    pub first_round: Estimate,
    /// Runs that hit the round cap; excluded from the three estimates.
    pub capped: u64,
}

/// Expected perimeter and area of the final triangle: (1/2, 8 pi / 2205).
pub fn exact_split_largest() -> (f64, f64) {
    (0.5, 8.0 * PI / 2205.0)
}

pub fn mc_split_largest(exp: &Experiment) -> Result<SplitLargestReport> {
    require_samples(exp)?;
    type T = ((StreamingStats, StreamingStats, StreamingStats), u64);
    let ((perimeter, area, first), capped) = exp.run(|_, s, t: &mut T| match simulate_split_largest(s) {
        Ok(out) => {
            t.0 .0.push(out.perimeter);
            t.0 .1.push(out.area);
            indicator(&mut t.0 .2, out.rounds == 1);
        }
        Err(_) => t.1 += 1,
    });
    Ok(SplitLargestReport {
        perimeter: perimeter.finalize(exp.seed)?,
        area: area.finalize(exp.seed)?,
        first_round: first.finalize(exp.seed)?,
        capped,
    })
}

/// The two roots of `k (1 - k^2) = 8 a0` in (0, 1) for an area threshold `a0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExceedanceQuery {
    pub a0: f64,
    pub mu1: f64,
    pub mu2: f64,
}

impl ExceedanceQuery {
    pub fn solve(a0: f64) -> Result<Self> {
        if !(a0 > 0.0 && a0 < MAX_TRIANGLE_AREA) {
            return Err(Error::invalid(
                "a0",
                format!("area threshold must lie in (0, sqrt(3)/36), got {a0}"),
            ));
        }
        let c = 8.0 * a0;
        let g = |k: f64| k * (1.0 - k * k) - c;
        let peak = 1.0 / 3f64.sqrt();
        let mu1 = find_root(g, 0.0, peak, 1e-15)?;
        let mu2 = find_root(g, peak, 1.0, 1e-15)?;
        Ok(ExceedanceQuery { a0, mu1, mu2 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exceedance {
    pub query: ExceedanceQuery,
    pub probability: f64,
    pub abs_error: f64,
}

/// Probability that a triangle formed from a randomly broken unit stick has
/// area above `a0`, given that a triangle forms:
/// `4 * integral over [mu1, mu2] of sqrt(k^2 (1 - k^2)^2 - (8 a0)^2) dk`.
pub fn area_exceedance(a0: f64) -> Result<Exceedance> {
    let query = ExceedanceQuery::solve(a0)?;
    let c = 8.0 * a0;
    let integrand = |k: f64| {
        let p = k * (1.0 - k * k);
        ((p - c) * (p + c)).max(0.0).sqrt()
    };
    let peak = 1.0 / 3f64.sqrt();
    let breaks = sqrt_endpoint_breaks(query.mu1, peak, query.mu2, 40);
    let q = integrate_with_breaks(integrand, &breaks, DEFAULT_TOL / 4.0)?;
    Ok(Exceedance {
        query,
        probability: (4.0 * q.value).clamp(0.0, 1.0),
        abs_error: 4.0 * q.abs_error,
    })
}

/// The `a0 -> 0` limit of the exceedance integral, `4 * integral of k (1 - k^2)`
/// over [0, 1], evaluated numerically.
pub fn exceedance_limit() -> Result<f64> {
    crate::numerics::integrate(|k| 4.0 * k * (1.0 - k * k), 0.0, 1.0, 1e-12)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExceedanceEstimate {
    pub thresholds: Vec<f64>,
    /// Conditional frequency of `area > a0` for each threshold.
    pub frequencies: Vec<Estimate>,
    pub acceptance: Estimate,
}

pub fn mc_area_exceedance(thresholds: &[f64], exp: &Experiment) -> Result<ExceedanceEstimate> {
    require_samples(exp)?;
    let width = thresholds.len();
    let (acceptance, hits) = exp.run(|_, s, t: &mut (StreamingStats, Vec<StreamingStats>)| {
        if t.1.is_empty() {
            t.1.resize(width, StreamingStats::new());
        }
        let p = three_pieces(s);
        let ok = is_polygon(&p);
        indicator(&mut t.0, ok);
        if ok {
            let area = unit_triangle_area(&p);
            for (stat, &a0) in t.1.iter_mut().zip(thresholds) {
                indicator(stat, area > a0);
            }
        }
    });
    let frequencies = hits.iter().map(|h| h.finalize(exp.seed)).collect::<Result<Vec<_>>>()?;
    Ok(ExceedanceEstimate {
        thresholds: thresholds.to_vec(),
        frequencies,
        acceptance: acceptance.finalize(exp.seed)?,
    })
}

/// Expected area of the largest quadrilateral the four pieces bound, given
/// that they bound one: `17 pi / 525 - pi^2 / 160`.
pub fn exact_expected_quad_area() -> f64 {
    17.0 * PI / 525.0 - PI * PI / 160.0
}

pub fn mc_expected_quad_area(exp: &Experiment) -> Result<ConditionalEstimate> {
    require_samples(exp)?;
    let t = exp.run(|_, s, t: &mut ConditionalTally| {
        let p = four_pieces(s);
        let ok = is_polygon(&p);
        indicator(&mut t.0, ok);
        if ok {
            t.1.push(brahmagupta_area(p[0], p[1], p[2], p[3]).unwrap_or(0.0));
            t.2.observe(p.iter().copied().fold(0.0, f64::max));
        }
    });
    finish_conditional(exp, t)
}

fn check_rank(n: usize, k: usize) -> Result<()> {
    if n == 0 || k == 0 || k > n {
        return Err(Error::invalid(
            "k",
            format!("rank must satisfy 1 <= k <= n, got k = {k}, n = {n}"),
        ));
    }
    Ok(())
}

fn harmonic_tail(n: usize, k: usize, power: i32) -> f64 {
    (k..=n).map(|i| (i as f64).powi(-power)).sum()
}

/// Expected length of the `k`-th longest of `n` pieces:
/// `(1/k + 1/(k+1) + ... + 1/n) / n`.
pub fn expected_kth_longest(n: usize, k: usize) -> Result<f64> {
    check_rank(n, k)?;
    Ok(harmonic_tail(n, k, 1) / n as f64)
}

/// Variance of the length of the `k`-th longest of `n` pieces.
pub fn variance_kth_longest(n: usize, k: usize) -> Result<f64> {
    check_rank(n, k)?;
    let nf = n as f64;
    let h1 = harmonic_tail(n, k, 1);
    let h2 = harmonic_tail(n, k, 2);
    Ok(h2 / (nf * (nf + 1.0)) - h1 * h1 / (nf * nf * (nf + 1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderStatisticEstimate {
    pub k: usize,
    pub mean: Estimate,
    pub variance: Estimate,
}

/// Mean and variance of every rank statistic of `n` pieces, from one run.
pub fn mc_order_statistics(n: usize, exp: &Experiment) -> Result<Vec<OrderStatisticEstimate>> {
    require_samples(exp)?;
    check_rank(n, 1)?;
    let stats = exp.run(|_, s, t: &mut Vec<StreamingStats>| {
        if t.is_empty() {
            t.resize(n, StreamingStats::new());
        }
        let mut pieces = Vec::with_capacity(n);
        sample_pieces_into(s, n, &mut pieces);
        pieces.sort_by(|a, b| b.total_cmp(a));
        for (stat, x) in t.iter_mut().zip(pieces) {
            stat.push(x);
        }
    });
    stats
        .iter()
        .enumerate()
        .map(|(i, st)| {
            Ok(OrderStatisticEstimate {
                k: i + 1,
                mean: st.finalize(exp.seed)?,
                variance: st.variance_estimate(exp.seed)?,
            })
        })
        .collect()
}

pub fn mc_kth_longest(n: usize, k: usize, exp: &Experiment) -> Result<OrderStatisticEstimate> {
    check_rank(n, k)?;
    Ok(mc_order_statistics(n, exp)?[k - 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::Seed;

    #[test]
    fn max_area_constant() {
        assert!((MAX_TRIANGLE_AREA - 3f64.sqrt() / 36.0).abs() < 1e-17);
        assert!(exact_expected_triangle_area() < MAX_TRIANGLE_AREA);
        assert!((exact_expected_triangle_area() - 0.0299199).abs() < 1e-7);
    }

    #[test]
    fn quad_constant() {
        assert!((exact_expected_quad_area() - 0.0400427).abs() < 1e-7);
    }

    #[test]
    fn split_largest_constants() {
        // recursion: P = 1/4 + (3/4)(2/3) P and A = (1/4) pi/105 + (3/4)(11/24) A
        let (p, a) = exact_split_largest();
        assert!((p - 0.25 / (1.0 - 0.75 * 2.0 / 3.0)).abs() < 1e-15);
        let a_rec = 0.25 * PI / 105.0 / (1.0 - 0.75 * 11.0 / 24.0);
        assert!((a - a_rec).abs() < 1e-15);
        assert!((a - 0.011398).abs() < 1e-6);
    }

    #[test]
    fn exceedance_roots() {
        let q = ExceedanceQuery::solve(0.02).unwrap();
        assert!(0.0 < q.mu1 && q.mu1 < q.mu2 && q.mu2 < 1.0);
        for mu in [q.mu1, q.mu2] {
            assert!((mu * (1.0 - mu * mu) - 0.16).abs() < 1e-10);
        }
        assert!((q.mu1 - 0.164447).abs() < 1e-5);
    }

    #[test]
    fn exceedance_range_checked() {
        assert!(area_exceedance(0.0).is_err());
        assert!(area_exceedance(MAX_TRIANGLE_AREA).is_err());
        assert!(area_exceedance(-1.0).is_err());
    }

    #[test]
    fn exceedance_limits() {
        assert!((exceedance_limit().unwrap() - 1.0).abs() < 1e-12);
        let small = area_exceedance(1e-12).unwrap().probability;
        assert!((small - 1.0).abs() < 1e-6, "{small}");
        let top = area_exceedance(MAX_TRIANGLE_AREA - 1e-9).unwrap().probability;
        assert!((0.0..1e-3).contains(&top), "{top}");
    }

    #[test]
    fn exceedance_is_monotone() {
        let mut last = 1.0;
        for i in 1..=20 {
            let a0 = MAX_TRIANGLE_AREA * i as f64 / 21.0;
            let p = area_exceedance(a0).unwrap().probability;
            assert!(p <= last + 1e-12, "a0 = {a0}: {p} > {last}");
            last = p;
        }
    }

    #[test]
    fn exceedance_against_two_dimensional_oracle() {
        // Independent route: integrate the indicator of {area > a0} over the
        // triangle region {a, b < 1/2, a + b > 1/2} with a fine midpoint grid.
        let a0 = 0.03;
        let m = 2000;
        let h = 0.5 / m as f64;
        let mut hits = 0u64;
        let mut total = 0u64;
        for i in 0..m {
            for j in 0..m {
                let a = (i as f64 + 0.5) * h;
                let b = (j as f64 + 0.5) * h;
                let c = 1.0 - a - b;
                if c <= 0.0 || c >= 0.5 {
                    continue;
                }
                total += 1;
                if heron_area(a, b, c).unwrap() > a0 {
                    hits += 1;
                }
            }
        }
        let grid = hits as f64 / total as f64;
        let p = area_exceedance(a0).unwrap().probability;
        assert!((grid - p).abs() < 2e-3, "grid {grid} vs {p}");
    }

    #[test]
    fn order_statistic_fixtures() {
        assert!((expected_kth_longest(3, 1).unwrap() - 11.0 / 18.0).abs() < 1e-15);
        assert_eq!(expected_kth_longest(1, 1).unwrap(), 1.0);
        assert!((expected_kth_longest(3, 3).unwrap() - 1.0 / 9.0).abs() < 1e-15);
        assert_eq!(variance_kth_longest(1, 1).unwrap(), 0.0);
        // max(x, 1 - x): E = 3/4, E[.^2] = 7/12
        assert!((variance_kth_longest(2, 1).unwrap() - (7.0 / 12.0 - 9.0 / 16.0)).abs() < 1e-15);
        assert!((variance_kth_longest(2, 1).unwrap() - 1.0 / 48.0).abs() < 1e-15);
        assert!(expected_kth_longest(3, 0).is_err());
        assert!(variance_kth_longest(3, 4).is_err());
    }

    #[test]
    fn order_statistic_identities() {
        for n in 1..=10 {
            let total: f64 = (1..=n).map(|k| expected_kth_longest(n, k).unwrap()).sum();
            assert!((total - 1.0).abs() < 1e-12);
            for k in 1..n {
                assert!(expected_kth_longest(n, k).unwrap() > expected_kth_longest(n, k + 1).unwrap());
            }
        }
        for n in 1..=50 {
            for k in 1..=n {
                assert!(variance_kth_longest(n, k).unwrap() >= 0.0, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn split_largest_outcome_invariants() {
        for i in 0..2000 {
            let mut s = crate::sampling::stream_for_sample(Seed(12), i);
            let out = simulate_split_largest(&mut s).unwrap();
            assert!(out.rounds >= 1);
            assert!(out.perimeter > 0.0 && out.perimeter <= 1.0);
            assert!(is_polygon(&out.pieces));
            let total: f64 = out.pieces.iter().sum();
            assert!((total - out.perimeter).abs() < 1e-12);
            let area = heron_area(out.pieces[0], out.pieces[1], out.pieces[2]).unwrap();
            assert!((area - out.area).abs() < 1e-12);
        }
    }

    #[test]
    fn small_runs_are_rejected() {
        let exp = Experiment::new(Seed(1), 999);
        assert!(mc_expected_triangle_area(&exp).is_err());
        assert!(mc_expected_quad_area(&exp).is_err());
    }

    #[test]
    fn conditional_triangle_run() {
        let exp = Experiment::new(Seed(5), 200_000);
        let est = mc_expected_triangle_area(&exp).unwrap();
        assert!(est.acceptance.within_sigmas(0.25, 4.0));
        assert!(est.mean.within_sigmas(exact_expected_triangle_area(), 4.0));
        assert!(est.max_accepted_piece < 0.5);
    }

    #[test]
    fn rank_sum_per_sample() {
        let exp = Experiment::new(Seed(8), 5000);
        let est = mc_order_statistics(4, &exp).unwrap();
        let total: f64 = est.iter().map(|e| e.mean.mean).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
