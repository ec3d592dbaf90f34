//! Monte Carlo experiments for the two ways of cutting the unit square.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::montecarlo::{indicator, Experiment, Tally};
use crate::numerics::stats::{Estimate, StreamingStats};
use crate::sampling::binomial;
use crate::square::lines::{crossing, sample_center_line, sample_chord, SquareLine, CENTER};
use crate::square::region::{RegionSet, ON_LINE_TOL};
use crate::stick::{require_samples, Maximum};

/// A maximum region area at least this close below 1/2 counts as reaching it.
pub const HALF_AREA_TOL: f64 = 1e-12;
pub const MAX_LINES: usize = 64;
pub const CHORD_CROSSING_PROBABILITY: f64 = 17.0 / 64.0;
pub const DEGENERATE_CHORD_PROBABILITY: f64 = 0.25;

/// Radius `(2 pi)^(-1/2)` of the central disk used by the lower bound.
pub fn disk_radius() -> f64 {
    (2.0 * std::f64::consts::PI).sqrt().recip()
}

fn check_lines(n: usize, min: usize) -> Result<()> {
    if n < min || n > MAX_LINES {
        return Err(Error::invalid(
            "n",
            format!("need {min} <= n <= {MAX_LINES} lines, got {n}"),
        ));
    }
    Ok(())
}

/// `2n - 4 + (1/2)^(n-2)` triangles on average among the `2n` regions.
pub fn expected_center_triangles(n: usize) -> f64 {
    2.0 * n as f64 - 4.0 + 0.5f64.powi(n as i32 - 2)
}

/// The printed closed form for the mean triangle area, kept for comparison.
/// It exceeds 1 for every `n >= 2` and is not used as a reference.
pub fn printed_triangle_area_formula(n: usize) -> Option<f64> {
    if n < 2 {
        return None;
    }
    let x = n as f64;
    let num = x.powi(3) + 2f64.powi(n as i32 + 1) * (2.0 * x * x - x + 5.0) - 9.0 * x - 16.0;
    Some(num / ((x + 2.0) * (x + 1.0) * (x - 1.0)))
}

/// `17/64 C(n,2) + 3n/4 + 1`.
pub fn expected_chord_regions(n: usize) -> f64 {
    let pairs = binomial(n as u64, 2).unwrap_or(0) as f64;
    17.0 / 64.0 * pairs + 0.75 * n as f64 + 1.0
}

#[derive(Default)]
struct CenterTally {
    triangles: StreamingStats,
    max_area: StreamingStats,
    half: StreamingStats,
    triangle_area: StreamingStats,
    has_triangle: StreamingStats,
    count_mismatch: u64,
    dichotomy_violations: u64,
    slivers: u64,
    area_deviation: Maximum,
}

impl Tally for CenterTally {
    fn merge(&mut self, o: Self) {
        self.triangles.merge(&o.triangles);
        self.max_area.merge(&o.max_area);
        self.half.merge(&o.half);
        self.triangle_area.merge(&o.triangle_area);
        self.has_triangle.merge(&o.has_triangle);
        self.count_mismatch += o.count_mismatch;
        self.dichotomy_violations += o.dichotomy_violations;
        self.slivers += o.slivers;
        self.area_deviation.merge(o.area_deviation);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterLineReport {
    pub n: usize,
    pub triangles: Estimate,
    pub expected_triangles: f64,
    pub max_area: Estimate,
    /// Frequency of a region with area at least 1/2.
    pub half_area: Estimate,
    /// Samples whose region count was not `2n`.
    pub count_mismatches: u64,
    /// Samples (n >= 2) whose triangle count was neither `2n-4` nor `2n-2`.
    pub dichotomy_violations: u64,
    /// Area of a uniformly chosen triangular region, over samples that have one.
    pub triangle_area: Option<Estimate>,
    pub has_triangle: Estimate,
    pub printed_triangle_area: Option<f64>,
    pub max_area_deviation: f64,
    pub slivers: u64,
}

pub fn center_line_experiment(n: usize, exp: &Experiment) -> Result<CenterLineReport> {
    check_lines(n, 1)?;
    require_samples(exp)?;
    let t = exp.run(|_, s, t: &mut CenterTally| {
        let mut rs = RegionSet::unit_square();
        for _ in 0..n {
            rs.cut(&sample_center_line(s));
        }
        if rs.len() != 2 * n {
            t.count_mismatch += 1;
        }
        let mut triangles = 0usize;
        let mut tri_area = 0.0;
        let mut max_area: f64 = 0.0;
        let mut total = 0.0;
        for r in &rs.regions {
            let a = r.area();
            total += a;
            max_area = max_area.max(a);
            if r.is_triangle() {
                triangles += 1;
                tri_area += a;
            }
        }
        if n >= 2 && triangles + 4 != 2 * n && triangles + 2 != 2 * n {
            t.dichotomy_violations += 1;
        }
        t.triangles.push(triangles as f64);
        t.max_area.push(max_area);
        indicator(&mut t.half, max_area >= 0.5 - HALF_AREA_TOL);
        indicator(&mut t.has_triangle, triangles > 0);
        if triangles > 0 {
            t.triangle_area.push(tri_area / triangles as f64);
        }
        t.slivers += rs.slivers;
        t.area_deviation.observe((total - 1.0).abs());
    });
    let triangle_area = if t.triangle_area.count() >= 2 {
        Some(t.triangle_area.finalize(exp.seed)?)
    } else {
        None
    };
    Ok(CenterLineReport {
        n,
        triangles: t.triangles.finalize(exp.seed)?,
        expected_triangles: expected_center_triangles(n),
        max_area: t.max_area.finalize(exp.seed)?,
        half_area: t.half.finalize(exp.seed)?,
        count_mismatches: t.count_mismatch,
        dichotomy_violations: t.dichotomy_violations,
        triangle_area,
        has_triangle: t.has_triangle.finalize(exp.seed)?,
        printed_triangle_area: printed_triangle_area_formula(n),
        max_area_deviation: t.area_deviation.0,
        slivers: t.slivers,
    })
}

/// Region count predicted from the chords alone, and whether the
/// configuration is too close to degenerate for the prediction to be trusted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombinatorialCount {
    pub effective_chords: usize,
    pub interior_crossings: usize,
    pub flagged: bool,
}

impl CombinatorialCount {
    pub fn regions(&self) -> usize {
        1 + self.effective_chords + self.interior_crossings
    }
}

/// Counts chords and interior crossings. Flags near-parallel pairs, crossings
/// within tolerance of a chord end, and crossings that lie on a third chord.
pub fn combinatorial_count(lines: &[SquareLine]) -> CombinatorialCount {
    let cuts: Vec<&SquareLine> = lines.iter().filter(|l| !l.is_degenerate()).collect();
    let mut flagged = false;
    let mut interior = 0;
    for i in 0..cuts.len() {
        for j in i + 1..cuts.len() {
            let (a, b) = (cuts[i], cuts[j]);
            let ra = a.end - a.start;
            let rb = b.end - b.start;
            let sin = ra.cross(rb) / (ra.norm() * rb.norm());
            let Some(c) = crossing(a, b).filter(|_| sin.abs() > ON_LINE_TOL) else {
                flagged = true;
                continue;
            };
            let near_end = |u: f64| u.abs() <= ON_LINE_TOL || (u - 1.0).abs() <= ON_LINE_TOL;
            if near_end(c.s) || near_end(c.t) {
                flagged = true;
                continue;
            }
            if c.s > 0.0 && c.s < 1.0 && c.t > 0.0 && c.t < 1.0 {
                interior += 1;
                let concurrent = cuts
                    .iter()
                    .enumerate()
                    .any(|(l, line)| l != i && l != j && line.segment_distance(c.point) <= ON_LINE_TOL);
                flagged |= concurrent;
            }
        }
    }
    CombinatorialCount {
        effective_chords: cuts.len(),
        interior_crossings: interior,
        flagged,
    }
}

#[derive(Default)]
struct ChordTally {
    regions: StreamingStats,
    combinatorial: StreamingStats,
    max_area: StreamingStats,
    half: StreamingStats,
    mismatches: u64,
    flagged: u64,
    slivers: u64,
    area_deviation: Maximum,
}

impl Tally for ChordTally {
    fn merge(&mut self, o: Self) {
        self.regions.merge(&o.regions);
        self.combinatorial.merge(&o.combinatorial);
        self.max_area.merge(&o.max_area);
        self.half.merge(&o.half);
        self.mismatches += o.mismatches;
        self.flagged += o.flagged;
        self.slivers += o.slivers;
        self.area_deviation.merge(o.area_deviation);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChordReport {
    pub n: usize,
    pub regions: Estimate,
    pub combinatorial_regions: Estimate,
    pub expected_regions: f64,
    pub max_area: Estimate,
    pub half_area: Estimate,
    /// Unflagged samples where the geometric and combinatorial counts differ.
    pub mismatches: u64,
    pub flagged: u64,
    pub max_area_deviation: f64,
    pub slivers: u64,
}

pub fn chord_experiment(n: usize, exp: &Experiment) -> Result<ChordReport> {
    check_lines(n, 0)?;
    require_samples(exp)?;
    let t = exp.run(|_, s, t: &mut ChordTally| {
        let lines: Vec<SquareLine> = (0..n).map(|_| sample_chord(s)).collect();
        let mut rs = RegionSet::unit_square();
        for line in &lines {
            rs.cut(line);
        }
        let combo = combinatorial_count(&lines);
        let flagged = combo.flagged || rs.slivers > 0;
        if flagged {
            t.flagged += 1;
        } else if combo.regions() != rs.len() {
            t.mismatches += 1;
        }
        let max_area = rs.max_area();
        t.regions.push(rs.len() as f64);
        t.combinatorial.push(combo.regions() as f64);
        t.max_area.push(max_area);
        indicator(&mut t.half, max_area >= 0.5 - HALF_AREA_TOL);
        t.slivers += rs.slivers;
        t.area_deviation.observe((rs.total_area() - 1.0).abs());
    });
    Ok(ChordReport {
        n,
        regions: t.regions.finalize(exp.seed)?,
        combinatorial_regions: t.combinatorial.finalize(exp.seed)?,
        expected_regions: expected_chord_regions(n),
        max_area: t.max_area.finalize(exp.seed)?,
        half_area: t.half.finalize(exp.seed)?,
        mismatches: t.mismatches,
        flagged: t.flagged,
        max_area_deviation: t.area_deviation.0,
        slivers: t.slivers,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChordPairReport {
    pub intersect: Estimate,
    pub degenerate: Estimate,
}

/// Frequency with which two independent chords cross inside the square,
/// plus the frequency of a degenerate chord.
pub fn mc_chord_intersection(exp: &Experiment) -> Result<ChordPairReport> {
    require_samples(exp)?;
    let (hit, degenerate) = exp.run(|_, s, t: &mut (StreamingStats, StreamingStats)| {
        let a = sample_chord(s);
        let b = sample_chord(s);
        indicator(&mut t.0, crate::square::lines::chords_intersect(&a, &b));
        indicator(&mut t.1, a.is_degenerate());
    });
    Ok(ChordPairReport {
        intersect: hit.finalize(exp.seed)?,
        degenerate: degenerate.finalize(exp.seed)?,
    })
}

/// Whether the chord leaves the central disk of radius [`disk_radius`]
/// untouched. Degenerate chords cut nothing and always miss.
pub fn chord_misses_disk(line: &SquareLine) -> bool {
    line.is_degenerate() || line.segment_distance(CENTER) > disk_radius()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaEstimate {
    /// Miss frequency among chords with endpoints on different sides.
    pub lambda: Estimate,
    /// Miss frequency over all chords, degenerate ones counted as misses.
    pub unconditional: Estimate,
}

pub fn lambda_estimate(exp: &Experiment) -> Result<LambdaEstimate> {
    require_samples(exp)?;
    let (conditional, all) = exp.run(|_, s, t: &mut (StreamingStats, StreamingStats)| {
        let line = sample_chord(s);
        let miss = chord_misses_disk(&line);
        if !line.is_degenerate() {
            indicator(&mut t.0, miss);
        }
        indicator(&mut t.1, miss);
    });
    Ok(LambdaEstimate {
        lambda: conditional.finalize(exp.seed)?,
        unconditional: all.finalize(exp.seed)?,
    })
}

/// Lower and upper bounds `(lambda^n, 3 (11/12)^(n/2))` on the chance that
/// some region keeps at least half the area after `n` chords.
pub fn half_area_bounds(n: usize, lambda: f64) -> Result<(f64, f64)> {
    if n < 1 {
        return Err(Error::invalid("n", "need at least one chord"));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::invalid("lambda", format!("must lie in [0, 1], got {lambda}")));
    }
    Ok((lambda.powi(n as i32), 3.0 * (11.0f64 / 12.0).powf(n as f64 / 2.0)))
}
