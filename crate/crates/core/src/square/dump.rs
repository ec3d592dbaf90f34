//! Plain-text dump of individual samples, for debugging and plotting.
//!
//! ```text
//! # brokenstick geometry v1
//! sample <index> model <center-line|chord> lines <n> seed <seed>
//! line <center-line|chord|degenerate-chord> <x0> <y0> <x1> <y1>
//! region <id> area <area> triangle <0|1> vertices <count> <x> <y> <x> <y> ...
//! end
//! ```
//!
//! Lines come in cut order, regions in counterclockwise vertex order. Numbers
//! use Rust's shortest round-trip formatting.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::{stream_for_sample, Seed};
use crate::square::lines::{sample_center_line, sample_chord, LineKind, SquareLine};
use crate::square::region::RegionSet;

pub const DUMP_HEADER: &str = "# brokenstick geometry v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    CenterLine,
    Chord,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::CenterLine => "center-line",
            Model::Chord => "chord",
        }
    }
}

impl std::str::FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "center-line" | "center" => Ok(Model::CenterLine),
            "chord" => Ok(Model::Chord),
            other => Err(Error::invalid(
                "model",
                format!("expected center-line or chord, got {other}"),
            )),
        }
    }
}

/// One sample of either model: the lines in cut order and the regions they leave.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutSample {
    pub model: Model,
    pub index: u64,
    pub lines: Vec<SquareLine>,
    pub regions: RegionSet,
}

/// Reproduces sample `index` of an experiment with this seed.
pub fn cut_sample(model: Model, n: usize, seed: Seed, index: u64) -> CutSample {
    let mut s = stream_for_sample(seed, index);
    let lines: Vec<SquareLine> = (0..n)
        .map(|_| match model {
            Model::CenterLine => sample_center_line(&mut s),
            Model::Chord => sample_chord(&mut s),
        })
        .collect();
    let mut regions = RegionSet::unit_square();
    for line in &lines {
        regions.cut(line);
    }
    CutSample {
        model,
        index,
        lines,
        regions,
    }
}

fn kind_name(kind: LineKind) -> &'static str {
    match kind {
        LineKind::CenterLine => "center-line",
        LineKind::Chord => "chord",
        LineKind::DegenerateChord => "degenerate-chord",
    }
}

pub fn write_sample<W: Write>(w: &mut W, sample: &CutSample, seed: Seed) -> io::Result<()> {
    writeln!(
        w,
        "sample {} model {} lines {} seed {}",
        sample.index,
        sample.model.name(),
        sample.lines.len(),
        seed
    )?;
    for l in &sample.lines {
        writeln!(
            w,
            "line {} {} {} {} {}",
            kind_name(l.kind),
            l.start.x,
            l.start.y,
            l.end.x,
            l.end.y
        )?;
    }
    for (id, r) in sample.regions.regions.iter().enumerate() {
        write!(
            w,
            "region {id} area {} triangle {} vertices {}",
            r.area(),
            u8::from(r.is_triangle()),
            r.vertices.len()
        )?;
        for v in &r.vertices {
            write!(w, " {} {}", v.x, v.y)?;
        }
        writeln!(w)?;
    }
    writeln!(w, "end")
}

/// Writes the header and samples `0..count`.
pub fn write_dump<W: Write>(w: &mut W, model: Model, n: usize, seed: Seed, count: u64) -> io::Result<()> {
    writeln!(w, "{DUMP_HEADER}")?;
    for index in 0..count {
        write_sample(w, &cut_sample(model, n, seed, index), seed)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dump_layout() {
        let mut out = Vec::new();
        write_dump(&mut out, Model::CenterLine, 3, Seed(5), 2).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], DUMP_HEADER);
        assert!(lines[1].starts_with("sample 0 model center-line lines 3 seed 5"));
        assert_eq!(lines.iter().filter(|l| l.starts_with("line ")).count(), 6);
        assert_eq!(lines.iter().filter(|l| l.starts_with("region ")).count(), 12);
        assert_eq!(lines.iter().filter(|l| **l == "end").count(), 2);

        // areas parse back and sum to one per sample
        let mut total = 0.0;
        for l in lines.iter().take_while(|l| **l != "end") {
            if let Some(rest) = l.strip_prefix("region ") {
                let f: Vec<&str> = rest.split_whitespace().collect();
                total += f[2].parse::<f64>().unwrap();
                let count: usize = f[6].parse().unwrap();
                assert_eq!(f.len(), 7 + 2 * count);
            }
        }
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn samples_match_experiment_streams() {
        let a = cut_sample(Model::Chord, 4, Seed(9), 17);
        let b = cut_sample(Model::Chord, 4, Seed(9), 17);
        assert_eq!(a, b);
        assert_eq!("chord".parse::<Model>().unwrap(), Model::Chord);
        assert!("spiral".parse::<Model>().is_err());
    }
}
