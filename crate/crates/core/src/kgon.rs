//! Counting polygons among the pieces: P(k, n, m), witnesses for every
//! achievable count, and the break-until-triangle process.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::montecarlo::{indicator, Experiment};
use crate::numerics::stats::{Estimate, StreamingStats};
use crate::sampling::{any_kgon, binomial, count_kgons, sample_pieces_into, Pieces, RandomStream, MAX_PIECES};
use crate::stick::require_samples;

pub const MAX_HISTOGRAM_PIECES: usize = 12;
pub const MAX_WITNESS_PIECES: usize = 12;
pub const DEFAULT_X_CAP: u32 = 60;
const WITNESS_RETRIES: u32 = 64;

/// P[X = 2]: the first two breaks already give a triangle.
pub const P_STOP_AT_TWO: f64 = 0.25;
/// P[X = 3].
pub const P_STOP_AT_THREE: f64 = 39.0 / 112.0;
/// A triangle after two breaks that no three of the four pieces form after a third.
pub const P_EVENT_E: f64 = 3.0 / 112.0;

/// Probability that at least `m` of the `k`-subsets of `n` pieces bound a `k`-gon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KgonQuery {
    pub k: usize,
    pub n: usize,
    pub m: u64,
}

impl KgonQuery {
    pub fn new(k: usize, n: usize, m: u64) -> Result<Self> {
        if k < 3 {
            return Err(Error::invalid("k", format!("polygon size must be at least 3, got {k}")));
        }
        if n < k {
            return Err(Error::invalid(
                "n",
                format!("piece count must be at least k = {k}, got {n}"),
            ));
        }
        if n > MAX_PIECES {
            return Err(Error::invalid(
                "n",
                format!("piece count must be at most {MAX_PIECES}, got {n}"),
            ));
        }
        let subsets = binomial(n as u64, k as u64).expect("C(25, k) fits in u64");
        if m > subsets {
            return Err(Error::invalid(
                "m",
                format!("required count must be at most C({n}, {k}) = {subsets}, got {m}"),
            ));
        }
        Ok(KgonQuery { k, n, m })
    }

    pub fn subsets(&self) -> u64 {
        binomial(self.n as u64, self.k as u64).expect("validated")
    }
}

/// Fibonacci numbers with F(1) = F(2) = 1.
pub fn fibonacci(j: u32) -> u64 {
    let (mut a, mut b) = (0u64, 1u64);
    for _ in 0..j {
        let next = a + b;
        a = b;
        b = next;
    }
    a
}

/// `prod_{j=2}^{n} j / (F(j+2) - 1)`: the probability that no three of `n`
/// pieces form a triangle.
pub fn no_triangle_probability(n: usize) -> f64 {
    (2..=n as u32)
        .map(|j| j as f64 / (fibonacci(j + 2) - 1) as f64)
        .product()
}

/// Known closed forms for P(k, n, m); `None` when none applies.
pub fn closed_form_p(query: &KgonQuery) -> Option<f64> {
    let KgonQuery { k, n, m } = *query;
    if k == n && m == 1 {
        return Some(1.0 - n as f64 / 2f64.powi(n as i32 - 1));
    }
    if k == 3 && m == 1 {
        return Some(1.0 - no_triangle_probability(n));
    }
    if k == 3 && m == query.subsets() {
        let ways = binomial(2 * n as u64 - 2, n as u64)?;
        return Some(1.0 / ways as f64);
    }
    None
}

fn at_least(pieces: &[f64], k: usize, m: u64) -> bool {
    if m == 0 {
        return true;
    }
    if m == 1 {
        return any_kgon(pieces, k).unwrap_or(false);
    }
    count_kgons(pieces, k).unwrap_or(0) >= m
}

/// Fraction of random `n`-piece partitions with at least `m` `k`-gons.
pub fn mc_p(query: &KgonQuery, exp: &Experiment) -> Result<Estimate> {
    require_samples(exp)?;
    let KgonQuery { k, n, m } = *query;
    let stats = exp.run(|_, s, t: &mut StreamingStats| {
        let mut pieces = Vec::with_capacity(n);
        sample_pieces_into(s, n, &mut pieces);
        indicator(t, at_least(&pieces, k, m));
    });
    stats.finalize(exp.seed)
}

/// Histogram of the exact number of `k`-gons among `n` random pieces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountDistribution {
    pub k: usize,
    pub n: usize,
    /// `counts[c]` is how many samples had exactly `c` polygons.
    pub counts: Vec<u64>,
    pub samples: u64,
    pub seed: crate::sampling::Seed,
}

impl CountDistribution {
    pub fn frequencies(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / self.samples as f64).collect()
    }

    fn bernoulli(&self, hits: u64) -> Estimate {
        let n = self.samples as f64;
        let p = hits as f64 / n;
        // sample-variance convention, matching StreamingStats::finalize
        let var = p * (1.0 - p) * n / (n - 1.0);
        Estimate::new(p, (var / n).sqrt(), self.samples, self.seed)
    }

    pub fn cell(&self, c: usize) -> Estimate {
        self.bernoulli(self.counts.get(c).copied().unwrap_or(0))
    }

    /// Estimate of P(count >= m).
    pub fn at_least(&self, m: usize) -> Estimate {
        self.bernoulli(self.counts.iter().skip(m).sum())
    }
}

pub fn exact_count_distribution(k: usize, n: usize, exp: &Experiment) -> Result<CountDistribution> {
    require_samples(exp)?;
    KgonQuery::new(k, n, 0)?;
    if n > MAX_HISTOGRAM_PIECES {
        return Err(Error::invalid(
            "n",
            format!("histograms support at most {MAX_HISTOGRAM_PIECES} pieces, got {n}"),
        ));
    }
    let cells = binomial(n as u64, k as u64).expect("small") as usize + 1;
    let counts = exp.run(|_, s, t: &mut Vec<u64>| {
        if t.is_empty() {
            t.resize(cells, 0);
        }
        let mut pieces = Vec::with_capacity(n);
        sample_pieces_into(s, n, &mut pieces);
        let c = count_kgons(&pieces, k).expect("validated") as usize;
        t[c] += 1;
    });
    Ok(CountDistribution {
        k,
        n,
        counts,
        samples: exp.samples,
        seed: exp.seed,
    })
}

/// Builds a normalized piece list whose exact `k`-gon count is `m`.
///
/// Counts up to C(n-1, k) reuse a witness on `n - 1` pieces plus one piece
/// longer than all the others together. Larger counts start from `n - 1`
/// nearly equal pieces `1 + eps * 2^i`, whose (k-1)-subset sums are pairwise
/// distinct, and choose the last piece between two consecutive sums so that
/// exactly the right number of subsets containing it close up.
pub fn find_witness(k: usize, n: usize, m: u64) -> Result<Pieces> {
    KgonQuery::new(k, n, m)?;
    if n > MAX_WITNESS_PIECES {
        return Err(Error::invalid(
            "n",
            format!("witnesses support at most {MAX_WITNESS_PIECES} pieces, got {n}"),
        ));
    }
    for attempt in 0..WITNESS_RETRIES {
        let eps = 0.5f64.powi((n + 4) as i32 + attempt as i32);
        let pieces = Pieces::normalized(build_witness(k, n, m, eps))?;
        if count_kgons(pieces.lengths(), k)? == m {
            return Ok(pieces);
        }
    }
    Err(Error::WitnessConstruction { k, n, m })
}

fn build_witness(k: usize, n: usize, m: u64, eps: f64) -> Vec<f64> {
    let without_last = binomial(n as u64 - 1, k as u64).expect("small");
    if m <= without_last {
        let mut base = if n > k {
            build_witness(k, n - 1, m, eps)
        } else {
            vec![1.0; n - 1]
        };
        let total: f64 = base.iter().sum();
        base.push(2.0 * total);
        return base;
    }

    let wanted = (m - without_last) as usize;
    let mut base: Vec<f64> = (0..n - 1).map(|i| 1.0 + eps * 2f64.powi(i as i32)).collect();
    let mut sums = Vec::new();
    subset_sums(&base, k - 1, 0, 0.0, &mut sums);
    sums.sort_by(f64::total_cmp);
    let top = base.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let total = sums.len();
    let last = if wanted == total {
        0.5 * (top + sums[0])
    } else {
        0.5 * (sums[total - wanted - 1] + sums[total - wanted])
    };
    base.push(last);
    base
}

fn subset_sums(xs: &[f64], size: usize, start: usize, acc: f64, out: &mut Vec<f64>) {
    if size == 0 {
        out.push(acc);
        return;
    }
    for i in start..=xs.len() - size {
        subset_sums(xs, size - 1, i + 1, acc + xs[i], out);
    }
}

/// Stopping point of the break-until-triangle process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct XOutcome {
    pub breaks: u32,
    /// The cap was reached without a triangle.
    pub censored: bool,
}

fn has_triangle(pieces: &[f64]) -> bool {
    if pieces.len() <= MAX_PIECES {
        return any_kgon(pieces, 3).unwrap_or(false);
    }
    let n = pieces.len();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if crate::sampling::is_polygon(&[pieces[a], pieces[b], pieces[c]]) {
                    return true;
                }
            }
        }
    }
    false
}

fn pieces_of(sorted_breaks: &[f64], out: &mut Vec<f64>) {
    out.clear();
    let mut prev = 0.0;
    for &b in sorted_breaks {
        out.push(b - prev);
        prev = b;
    }
    out.push(1.0 - prev);
}

/// Adds uniform break points to the unit stick one at a time and stops at
/// the first break count where some three pieces form a triangle.
pub fn simulate_x(stream: &mut RandomStream, cap: u32) -> Result<XOutcome> {
    if cap < 3 {
        return Err(Error::invalid("cap", format!("must be at least 3, got {cap}")));
    }
    let mut breaks: Vec<f64> = Vec::with_capacity(cap as usize);
    let mut pieces = Vec::with_capacity(cap as usize + 1);
    for count in 1..=cap {
        let x = stream.uniform();
        let at = breaks.partition_point(|&b| b < x);
        breaks.insert(at, x);
        if count < 2 {
            continue;
        }
        pieces_of(&breaks, &mut pieces);
        if has_triangle(&pieces) {
            return Ok(XOutcome {
                breaks: count,
                censored: false,
            });
        }
    }
    Ok(XOutcome {
        breaks: cap,
        censored: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XProcessReport {
    pub p_two: Estimate,
    pub p_three: Estimate,
    /// Censored runs count as `cap`.
    pub mean: Estimate,
    pub censored: u64,
    pub cap: u32,
    /// Upper bound on the probability of censoring.
    pub censoring_bound: f64,
}

pub fn mc_x_process(cap: u32, exp: &Experiment) -> Result<XProcessReport> {
    require_samples(exp)?;
    if cap < 3 {
        return Err(Error::invalid("cap", format!("must be at least 3, got {cap}")));
    }
    type T = ((StreamingStats, StreamingStats, StreamingStats), u64);
    let ((two, three, mean), censored) = exp.run(|_, s, t: &mut T| {
        let out = simulate_x(s, cap).expect("cap validated");
        indicator(&mut t.0 .0, out.breaks == 2);
        indicator(&mut t.0 .1, out.breaks == 3);
        t.0 .2.push(out.breaks as f64);
        if out.censored {
            t.1 += 1;
        }
    });
    Ok(XProcessReport {
        p_two: two.finalize(exp.seed)?,
        p_three: three.finalize(exp.seed)?,
        mean: mean.finalize(exp.seed)?,
        censored,
        cap,
        censoring_bound: no_triangle_probability(cap as usize + 1),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventEReport {
    /// Triangle after two breaks, none among the four pieces after a third.
    pub event: Estimate,
    pub triangle_after_two: Estimate,
    pub triangle_after_three: Estimate,
}

pub fn mc_event_e(exp: &Experiment) -> Result<EventEReport> {
    require_samples(exp)?;
    let (event, two, three) = exp.run(|_, s, t: &mut (StreamingStats, StreamingStats, StreamingStats)| {
        let mut breaks = [s.uniform(), s.uniform(), s.uniform()];
        let mut first = [breaks[0], breaks[1]];
        first.sort_by(f64::total_cmp);
        let tri2 = crate::sampling::is_polygon(&[first[0], first[1] - first[0], 1.0 - first[1]]);
        breaks.sort_by(f64::total_cmp);
        let mut pieces = Vec::with_capacity(4);
        pieces_of(&breaks, &mut pieces);
        let tri3 = has_triangle(&pieces);
        indicator(&mut t.0, tri2 && !tri3);
        indicator(&mut t.1, tri2);
        indicator(&mut t.2, tri3);
    });
    Ok(EventEReport {
        event: event.finalize(exp.seed)?,
        triangle_after_two: two.finalize(exp.seed)?,
        triangle_after_three: three.finalize(exp.seed)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExBounds {
    pub lower: f64,
    pub upper: f64,
    /// `sum_{n>=2} prod_{j=2}^{n} j / (F(j+2) - 1)`.
    pub series: f64,
}

/// Bounds on the expected stopping count of the break-until-triangle process.
pub fn ex_bounds() -> ExBounds {
    let mut series = 0.0;
    let mut term = 1.0;
    for j in 2u32.. {
        term *= j as f64 / (fibonacci(j + 2) - 1) as f64;
        if term < 1e-12 {
            break;
        }
        series += term;
    }
    ExBounds {
        lower: 353.0 / 112.0,
        upper: 1.0 + series - 3.0 / 112.0,
        series,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{stream_for_sample, Seed};

    #[test]
    fn fibonacci_values() {
        let f: Vec<u64> = (1..=10).map(fibonacci).collect();
        assert_eq!(f, vec![1, 1, 2, 3, 5, 8, 13, 21, 34, 55]);
    }

    #[test]
    fn closed_form_fixtures() {
        let p = |k, n, m| closed_form_p(&KgonQuery::new(k, n, m).unwrap());
        assert!((p(3, 3, 1).unwrap() - 0.25).abs() < 1e-15);
        assert!((p(3, 4, 1).unwrap() - 4.0 / 7.0).abs() < 1e-15);
        assert!((p(3, 4, 4).unwrap() - 1.0 / 15.0).abs() < 1e-15);
        assert!((p(4, 4, 1).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(p(3, 5, 2), None);
        assert_eq!(p(4, 6, 3), None);
    }

    #[test]
    fn closed_form_families_agree_where_they_overlap() {
        let q = KgonQuery::new(3, 3, 1).unwrap();
        let all_polygon = 1.0 - 3.0 / 4.0;
        let fib = 1.0 - no_triangle_probability(3);
        let all_tri = 1.0 / binomial(4, 3).unwrap() as f64;
        assert_eq!(closed_form_p(&q), Some(all_polygon));
        assert!((fib - all_polygon).abs() < 1e-15);
        assert!((all_tri - all_polygon).abs() < 1e-15);
    }

    #[test]
    fn query_validation() {
        assert!(KgonQuery::new(2, 4, 1).is_err());
        assert!(KgonQuery::new(5, 4, 1).is_err());
        assert!(KgonQuery::new(3, 4, 5).is_err());
        assert!(KgonQuery::new(3, 26, 1).is_err());
        assert_eq!(KgonQuery::new(3, 4, 4).unwrap().subsets(), 4);
    }

    #[test]
    fn m_zero_is_certain() {
        let q = KgonQuery::new(3, 5, 0).unwrap();
        let e = mc_p(&q, &Experiment::new(Seed(1), 2000)).unwrap();
        assert_eq!(e.mean, 1.0);
        assert_eq!(e.std_error, 0.0);
    }

    #[test]
    fn witness_fixtures() {
        assert_eq!(count_kgons(&[0.6, 0.25, 0.15], 3).unwrap(), 0);
        let w = find_witness(3, 3, 0).unwrap();
        assert_eq!(count_kgons(w.lengths(), 3).unwrap(), 0);
        let w = find_witness(3, 3, 1).unwrap();
        assert_eq!(count_kgons(w.lengths(), 3).unwrap(), 1);
        for m in 0..=4 {
            let w = find_witness(3, 4, m).unwrap();
            assert_eq!(count_kgons(w.lengths(), 3).unwrap(), m);
            assert!((w.total() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn witnesses_for_larger_polygons() {
        for (k, n) in [(4, 7), (5, 8), (3, 9), (6, 10)] {
            let total = binomial(n as u64, k as u64).unwrap();
            for m in 0..=total {
                let w = find_witness(k, n, m).unwrap();
                assert_eq!(count_kgons(w.lengths(), k).unwrap(), m, "k={k} n={n} m={m}");
            }
        }
    }

    #[test]
    fn witness_limits() {
        assert!(find_witness(3, 13, 1).is_err());
        assert!(find_witness(3, 4, 5).is_err());
    }

    #[test]
    fn x_process_stops_at_a_triangle() {
        for i in 0..5000 {
            let mut s = stream_for_sample(Seed(2), i);
            let out = simulate_x(&mut s, 3).unwrap();
            assert!(out.breaks >= 2 && out.breaks <= 3);
            if out.censored {
                assert_eq!(out.breaks, 3);
            }
        }
        let mut s = stream_for_sample(Seed(2), 0);
        assert!(simulate_x(&mut s, 2).is_err());
    }

    #[test]
    fn has_triangle_beyond_bitmask_limit() {
        let mut pieces: Vec<f64> = (0..30).map(|i| 2f64.powi(i)).collect();
        assert!(!has_triangle(&pieces));
        pieces.push(3.0);
        assert!(has_triangle(&pieces));
    }

    #[test]
    fn bounds() {
        let b = ex_bounds();
        assert!((b.lower - 3.151_785_714_285_714).abs() < 1e-12);
        assert!(b.series < 2.424 && b.series > 2.42);
        assert!(b.upper <= 3.398 + 1e-3 && b.upper >= 3.39);
    }
}
