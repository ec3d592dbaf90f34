use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

use crate::sampling::RandomStream;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn scale(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }
}

impl Add for Point {
    type Output = Point;

    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;

    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

pub const CENTER: Point = Point::new(0.5, 0.5);

/// Sides of the unit square, counterclockwise from the bottom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Bottom,
    Right,
    Top,
    Left,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Bottom, Side::Right, Side::Top, Side::Left];

    /// Point at arclength fraction `t` along the side, walking counterclockwise.
    pub fn point(self, t: f64) -> Point {
        match self {
            Side::Bottom => Point::new(t, 0.0),
            Side::Right => Point::new(1.0, t),
            Side::Top => Point::new(1.0 - t, 1.0),
            Side::Left => Point::new(0.0, 1.0 - t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LineKind {
    CenterLine,
    Chord,
    /// Both endpoints on the same side; cuts nothing.
    DegenerateChord,
}

/// A cut of the unit square, given by its two boundary endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquareLine {
    pub kind: LineKind,
    pub start: Point,
    pub end: Point,
    pub sides: (Side, Side),
}

impl SquareLine {
    pub fn is_degenerate(&self) -> bool {
        self.kind == LineKind::DegenerateChord
    }

    /// Chord between two boundary points.
    pub fn chord(a: (Side, f64), b: (Side, f64)) -> Self {
        let kind = if a.0 == b.0 {
            LineKind::DegenerateChord
        } else {
            LineKind::Chord
        };
        SquareLine {
            kind,
            start: a.0.point(a.1),
            end: b.0.point(b.1),
            sides: (a.0, b.0),
        }
    }

    /// Distance from `p` to the segment between the endpoints.
    pub fn segment_distance(&self, p: Point) -> f64 {
        let d = self.end - self.start;
        let len2 = d.dot(d);
        let t = if len2 > 0.0 {
            ((p - self.start).dot(d) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        (self.start + d.scale(t) - p).norm()
    }
}

/// A line through the center: with probability 1/2 it joins the left and
/// right sides at `(0, u)` and `(1, 1 - u)`, otherwise the bottom and top at
/// `(u, 0)` and `(1 - u, 1)`, with `u` uniform.
pub fn sample_center_line(stream: &mut RandomStream) -> SquareLine {
    let horizontal = stream.uniform() < 0.5;
    let u = stream.uniform();
    if horizontal {
        SquareLine {
            kind: LineKind::CenterLine,
            start: Point::new(0.0, u),
            end: Point::new(1.0, 1.0 - u),
            sides: (Side::Left, Side::Right),
        }
    } else {
        SquareLine {
            kind: LineKind::CenterLine,
            start: Point::new(u, 0.0),
            end: Point::new(1.0 - u, 1.0),
            sides: (Side::Bottom, Side::Top),
        }
    }
}

fn perimeter_point(stream: &mut RandomStream) -> (Side, f64) {
    let side = Side::ALL[stream.below(4) as usize];
    (side, stream.uniform())
}

/// A segment joining two independent uniform points on the perimeter.
pub fn sample_chord(stream: &mut RandomStream) -> SquareLine {
    let a = perimeter_point(stream);
    let b = perimeter_point(stream);
    SquareLine::chord(a, b)
}

/// Where two chords cross, as fractions along each.
pub(crate) struct Crossing {
    pub point: Point,
    pub s: f64,
    pub t: f64,
}

pub(crate) fn crossing(a: &SquareLine, b: &SquareLine) -> Option<Crossing> {
    let r = a.end - a.start;
    let q = b.end - b.start;
    let denom = r.cross(q);
    if denom == 0.0 {
        return None;
    }
    let w = b.start - a.start;
    let s = w.cross(q) / denom;
    let t = w.cross(r) / denom;
    Some(Crossing {
        point: a.start + r.scale(s),
        s,
        t,
    })
}

/// Whether two chords cross strictly inside the square.
pub fn chords_intersect(a: &SquareLine, b: &SquareLine) -> bool {
    if a.is_degenerate() || b.is_degenerate() {
        return false;
    }
    match crossing(a, b) {
        Some(c) => c.s > 0.0 && c.s < 1.0 && c.t > 0.0 && c.t < 1.0,
        None => false,
    }
}
