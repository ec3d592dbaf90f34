use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::square::lines::{Point, SquareLine};

/// Vertices closer than this to a cutting line count as lying on it.
pub const ON_LINE_TOL: f64 = 1e-10;
/// Split parts smaller than this are folded back into their neighbor.
pub const MIN_REGION_AREA: f64 = 1e-14;
/// Relative turn below which a vertex is treated as collinear.
pub const COLLINEAR_TOL: f64 = 1e-9;

/// A convex polygon with counterclockwise vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexRegion {
    pub vertices: Vec<Point>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Class {
    Left,
    Right,
    On,
}

pub enum SplitResult {
    Untouched,
    Split(ConvexRegion, ConvexRegion),
    /// The line cut off a sliver below [`MIN_REGION_AREA`]; the region is kept whole.
    Sliver,
}

impl ConvexRegion {
    pub fn unit_square() -> Self {
        ConvexRegion {
            vertices: vec![
                Point::new(0.0, 0.0),
                Point::new(1.0, 0.0),
                Point::new(1.0, 1.0),
                Point::new(0.0, 1.0),
            ],
        }
    }

    /// Shoelace area (positive for counterclockwise order).
    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        let n = v.len();
        let twice: f64 = (0..n).map(|i| v[i].cross(v[(i + 1) % n])).sum();
        0.5 * twice
    }

    /// Whether every turn is left (or straight) within tolerance.
    pub fn is_convex(&self) -> bool {
        let v = &self.vertices;
        let n = v.len();
        (0..n).all(|i| {
            let a = v[i];
            let b = v[(i + 1) % n];
            let c = v[(i + 2) % n];
            (b - a).cross(c - b) >= -1e-10
        })
    }

    /// Vertex count after merging repeated vertices and dropping collinear ones.
    pub fn corner_count(&self) -> usize {
        let v = &self.vertices;
        let n = v.len();
        let distinct = |a: Point, b: Point| {
            let d = a - b;
            d.dot(d) > 1e-24
        };
        let mut count = 0;
        for i in 0..n {
            let b = v[i];
            if !distinct(v[(i + n - 1) % n], b) {
                continue;
            }
            let prev = (1..n).map(|k| v[(i + n - k) % n]).find(|&p| distinct(p, b));
            let next = (1..n).map(|k| v[(i + k) % n]).find(|&p| distinct(p, b));
            let (Some(a), Some(c)) = (prev, next) else {
                continue;
            };
            let (u, w) = (b - a, c - b);
            let straight = u.cross(w).abs() <= COLLINEAR_TOL * u.norm() * w.norm() && u.dot(w) > 0.0;
            if !straight {
                count += 1;
            }
        }
        count
    }

    pub fn is_triangle(&self) -> bool {
        self.corner_count() == 3
    }

    pub fn split(&self, line: &SquareLine) -> SplitResult {
        let d = line.end - line.start;
        let len = d.norm();
        if len == 0.0 {
            return SplitResult::Untouched;
        }
        let unit = d.scale(1.0 / len);
        let signed = |v: &Point| unit.cross(*v - line.start);
        let (has_left, has_right) = self.vertices.iter().fold((false, false), |(l, r), v| {
            let s = signed(v);
            (l || s > ON_LINE_TOL, r || s < -ON_LINE_TOL)
        });
        if !(has_left && has_right) {
            return SplitResult::Untouched;
        }
        let class = |s: f64| {
            if s > ON_LINE_TOL {
                Class::Left
            } else if s < -ON_LINE_TOL {
                Class::Right
            } else {
                Class::On
            }
        };

        let n = self.vertices.len();
        let mut left = Vec::with_capacity(n + 2);
        let mut right = Vec::with_capacity(n + 2);
        for i in 0..n {
            let j = (i + 1) % n;
            let v = self.vertices[i];
            let w = self.vertices[j];
            let (dv, dw) = (signed(&v), signed(&w));
            match class(dv) {
                Class::Left => left.push(v),
                Class::Right => right.push(v),
                Class::On => {
                    left.push(v);
                    right.push(v);
                }
            }
            let crosses = matches!(
                (class(dv), class(dw)),
                (Class::Left, Class::Right) | (Class::Right, Class::Left)
            );
            if crosses {
                let t = dv / (dv - dw);
                let x = v + (w - v).scale(t);
                left.push(x);
                right.push(x);
            }
        }
        let (left, right) = (ConvexRegion { vertices: left }, ConvexRegion { vertices: right });
        if left.area() < MIN_REGION_AREA || right.area() < MIN_REGION_AREA {
            return SplitResult::Sliver;
        }
        SplitResult::Split(left, right)
    }
}

/// Convex regions partitioning the unit square.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSet {
    pub regions: Vec<ConvexRegion>,
    /// Splits skipped because one side would have been a sliver.
    pub slivers: u64,
}

impl Default for RegionSet {
    fn default() -> Self {
        Self::unit_square()
    }
}

impl RegionSet {
    pub fn unit_square() -> Self {
        RegionSet {
            regions: vec![ConvexRegion::unit_square()],
            slivers: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn total_area(&self) -> f64 {
        self.regions.iter().map(ConvexRegion::area).sum()
    }

    pub fn max_area(&self) -> f64 {
        self.regions.iter().map(ConvexRegion::area).fold(0.0, f64::max)
    }

    /// Splits every region the line crosses. Degenerate chords are no-ops.
    pub fn cut(&mut self, line: &SquareLine) {
        if line.is_degenerate() {
            return;
        }
        for i in 0..self.regions.len() {
            match self.regions[i].split(line) {
                SplitResult::Untouched => {}
                SplitResult::Sliver => self.slivers += 1,
                SplitResult::Split(a, b) => {
                    self.regions[i] = a;
                    self.regions.push(b);
                }
            }
        }
    }
}

/// Returns a copy of `rs` with every region crossed by `line` split in two.
pub fn split_regions(rs: &RegionSet, line: &SquareLine) -> Result<RegionSet> {
    if line.is_degenerate() {
        return Err(Error::invalid(
            "line",
            "a chord with both endpoints on one side cuts nothing",
        ));
    }
    let mut out = rs.clone();
    out.cut(line);
    Ok(out)
}
