//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export returns a JSON string; errors come back as thrown strings.

use brokenstick::polygon::{max_cyclic_area, DEFAULT_TOL};
use brokenstick::sampling::{count_kgons, sample_partition, stream_for_sample};
use brokenstick::square::{cut_sample, LineKind, Model};
use brokenstick::Seed;
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest sample count the histogram accepts, to keep the page responsive.
pub const MAX_HISTOGRAM_SAMPLES: u32 = 2_000_000;
pub const MAX_CUT_LINES: usize = 64;

#[derive(Serialize)]
struct CutLine {
    kind: LineKind,
    from: [f64; 2],
    to: [f64; 2],
}

#[derive(Serialize)]
struct CutRegion {
    area: f64,
    triangle: bool,
    vertices: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct Cut {
    lines: Vec<CutLine>,
    regions: Vec<CutRegion>,
    max_area: f64,
    triangles: usize,
}

#[derive(Serialize)]
struct Cyclic {
    area: f64,
    circumradius: f64,
    center_inside: bool,
    vertices: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct Histogram {
    k: usize,
    n: usize,
    samples: u32,
    counts: Vec<u64>,
    mean: f64,
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

pub fn cut_square_json(model: &str, n: usize, seed: u32, index: u32) -> Result<String, String> {
    let model: Model = model.parse().map_err(|e: brokenstick::Error| e.to_string())?;
    if n == 0 || n > MAX_CUT_LINES {
        return Err(format!("line count must be in 1..={MAX_CUT_LINES}"));
    }
    let sample = cut_sample(model, n, Seed(seed.into()), index.into());
    let regions: Vec<CutRegion> = sample
        .regions
        .regions
        .iter()
        .map(|r| CutRegion {
            area: r.area(),
            triangle: r.is_triangle(),
            vertices: r.vertices.iter().map(|p| [p.x, p.y]).collect(),
        })
        .collect();
    to_json(&Cut {
        lines: sample
            .lines
            .iter()
            .map(|l| CutLine {
                kind: l.kind,
                from: [l.start.x, l.start.y],
                to: [l.end.x, l.end.y],
            })
            .collect(),
        max_area: sample.regions.max_area(),
        triangles: regions.iter().filter(|r| r.triangle).count(),
        regions,
    })
}

pub fn cyclic_polygon_json(sides: &str) -> Result<String, String> {
    let sides: Vec<f64> = sides
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|e| format!("{s:?}: {e}")))
        .collect::<Result<_, _>>()?;
    let sol = max_cyclic_area(&sides, DEFAULT_TOL).map_err(|e| e.to_string())?;
    to_json(&Cyclic {
        area: sol.area,
        circumradius: sol.circumradius,
        center_inside: sol.center_inside,
        vertices: sol.vertices(),
    })
}

pub fn count_histogram_json(k: usize, n: usize, seed: u32, samples: u32) -> Result<String, String> {
    if samples == 0 || samples > MAX_HISTOGRAM_SAMPLES {
        return Err(format!("samples must be in 1..={MAX_HISTOGRAM_SAMPLES}"));
    }
    let mut counts: Vec<u64> = Vec::new();
    let mut total = 0u64;
    for i in 0..u64::from(samples) {
        let mut stream = stream_for_sample(Seed(seed.into()), i);
        let pieces = sample_partition(&mut stream, n).map_err(|e| e.to_string())?.pieces();
        let c = count_kgons(pieces.lengths(), k).map_err(|e| e.to_string())? as usize;
        if counts.len() <= c {
            counts.resize(c + 1, 0);
        }
        counts[c] += 1;
        total += c as u64;
    }
    to_json(&Histogram {
        k,
        n,
        samples,
        counts,
        mean: total as f64 / f64::from(samples),
    })
}

/// Cuts the unit square with `n` random lines; `model` is `center-line` or `chord`.
#[wasm_bindgen]
pub fn cut_square(model: &str, n: usize, seed: u32, index: u32) -> Result<String, JsValue> {
    cut_square_json(model, n, seed, index).map_err(|e| JsValue::from_str(&e))
}

/// Largest-area polygon for a comma-separated side list.
#[wasm_bindgen]
pub fn cyclic_polygon(sides: &str) -> Result<String, JsValue> {
    cyclic_polygon_json(sides).map_err(|e| JsValue::from_str(&e))
}

/// Histogram of how many k-subsets of `n` random pieces form k-gons.
#[wasm_bindgen]
pub fn count_histogram(k: usize, n: usize, seed: u32, samples: u32) -> Result<String, JsValue> {
    count_histogram_json(k, n, seed, samples).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn cut_areas_sum_to_one() {
        for model in ["center-line", "chord"] {
            let v: Value = serde_json::from_str(&cut_square_json(model, 5, 1, 3).unwrap()).unwrap();
            let total: f64 = v["regions"]
                .as_array()
                .unwrap()
                .iter()
                .map(|r| r["area"].as_f64().unwrap())
                .sum();
            assert!((total - 1.0).abs() < 1e-9);
            assert_eq!(v["lines"].as_array().unwrap().len(), 5);
        }
    }

    #[test]
    fn center_lines_give_two_n_regions() {
        let v: Value = serde_json::from_str(&cut_square_json("center-line", 4, 9, 0).unwrap()).unwrap();
        assert_eq!(v["regions"].as_array().unwrap().len(), 8);
    }

    #[test]
    fn bad_inputs_are_errors() {
        assert!(cut_square_json("spiral", 3, 0, 0).is_err());
        assert!(cut_square_json("chord", 0, 0, 0).is_err());
        assert!(cyclic_polygon_json("1,1,5").is_err());
        assert!(cyclic_polygon_json("1,x,1").is_err());
        assert!(count_histogram_json(3, 4, 0, 0).is_err());
        assert!(count_histogram_json(5, 4, 0, 10).is_err());
    }

    #[test]
    fn square_sides_give_unit_area() {
        let v: Value = serde_json::from_str(&cyclic_polygon_json("1, 1, 1, 1").unwrap()).unwrap();
        assert!((v["area"].as_f64().unwrap() - 1.0).abs() < 1e-9);
        assert!((v["circumradius"].as_f64().unwrap() - 0.5f64.sqrt()).abs() < 1e-9);
        assert_eq!(v["vertices"].as_array().unwrap().len(), 4);
    }

    #[test]
    fn histogram_matches_the_triangle_probability() {
        let v: Value = serde_json::from_str(&count_histogram_json(3, 3, 5, 40_000).unwrap()).unwrap();
        let counts: Vec<u64> = v["counts"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| c.as_u64().unwrap())
            .collect();
        assert_eq!(counts.iter().sum::<u64>(), 40_000);
        let p = counts[1] as f64 / 40_000.0;
        // 1/4 with a generous five-sigma band
        assert!((p - 0.25).abs() < 5.0 * (0.25f64 * 0.75 / 40_000.0).sqrt());
    }
}
