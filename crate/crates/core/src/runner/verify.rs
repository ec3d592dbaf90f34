//! The full acceptance matrix, one block of records per criterion.

use crate::error::Result;
use crate::kgon::{
    closed_form_p, ex_bounds, find_witness, mc_event_e, mc_p, no_triangle_probability, KgonQuery, P_EVENT_E,
};
use crate::numerics::montecarlo::Experiment;
use crate::numerics::stats::Estimate;
use crate::polygon::{brahmagupta_area, max_cyclic_area, regular_polygon_area, DEFAULT_TOL};
use crate::runner::quantities::{
    center_line_records, chord_records, exceedance_records, half_area_record, kgon_params, lambda_records,
    order_statistic_records, x_process_records,
};
use crate::runner::record::{Method, ResultRecord};
use crate::sampling::{binomial, count_kgons, is_polygon, sample_pieces_into};
use crate::square::experiments::{chord_experiment, mc_chord_intersection, ChordReport, CHORD_CROSSING_PROBABILITY};
use crate::stick::{
    exact_expected_quad_area, exact_expected_triangle_area, exact_split_largest, exceedance_limit,
    expected_kth_longest, mc_expected_quad_area, mc_expected_triangle_area, mc_split_largest, variance_kth_longest,
    Maximum,
};

pub const EXCEEDANCE_THRESHOLDS: [f64; 4] = [0.01, 0.02, 0.03, 0.04];
pub const RANDOM_QUADRILATERALS: u64 = 1000;
pub const CYCLIC_TOL: f64 = 1e-9;
pub const CRITERIA: u32 = 15;
/// Sample count for the worker-count comparison inside the matrix.
pub const DETERMINISM_SAMPLES: u64 = 20_000;

fn tag(c: u32, records: Vec<ResultRecord>) -> Vec<ResultRecord> {
    records.into_iter().map(|r| r.criterion(c)).collect()
}

fn classical(exp: &Experiment) -> Result<Vec<ResultRecord>> {
    let q = KgonQuery::new(3, 3, 1)?;
    let exact = closed_form_p(&q).expect("family");
    Ok(vec![
        ResultRecord::within("p-triangle", "k=3;n=3;m=1", Method::ClosedForm, exact, 0.25, 0.0),
        ResultRecord::z_gated("p-triangle", "k=3;n=3;m=1", &mc_p(&q, exp)?, 0.25),
    ])
}

fn triangle_area(exp: &Experiment) -> Result<Vec<ResultRecord>> {
    let c = mc_expected_triangle_area(exp)?;
    Ok(vec![ResultRecord::z_gated(
        "triangle-area",
        "stat=mean",
        &c.mean,
        exact_expected_triangle_area(),
    )])
}

fn split_largest(exp: &Experiment) -> Result<Vec<ResultRecord>> {
    let r = mc_split_largest(exp)?;
    let (perimeter, area) = exact_split_largest();
    Ok(vec![
        ResultRecord::z_gated("split-largest", "part=perimeter", &r.perimeter, perimeter),
        ResultRecord::z_gated("split-largest", "part=area", &r.area, area),
    ])
}

fn exceedance(exp: &Experiment) -> Result<Vec<ResultRecord>> {
    let mut out = exceedance_records(&EXCEEDANCE_THRESHOLDS, exp, None)?;
    out.push(
        ResultRecord::within(
            "area-exceedance",
            "a0=0",
            Method::Quadrature,
            exceedance_limit()?,
            1.0,
            1e-8,
        )
        .note("limit as a0 -> 0"),
    );
    Ok(out)
}

fn cyclic(exp: &Experiment) -> Result<Vec<ResultRecord>> {
    let quads = Experiment {
        samples: RANDOM_QUADRILATERALS,
        ..*exp
    };
    let worst = quads.run(|_, s, t: &mut Maximum| {
        let mut p = Vec::with_capacity(4);
        loop {
            sample_pieces_into(s, 4, &mut p);
            if is_polygon(&p) {
                break;
            }
        }
        let cyclic = max_cyclic_area(&p, DEFAULT_TOL).map(|c| c.area).unwrap_or(f64::NAN);
        let exact = brahmagupta_area(p[0], p[1], p[2], p[3]).unwrap_or(f64::NAN);
        let dev = (cyclic - exact).abs();
        t.observe(if dev.is_nan() { f64::MAX } else { dev });
    });
    let mut out = vec![ResultRecord::within(
        "cyclic-area",
        &format!("quadrilaterals={RANDOM_QUADRILATERALS};check=max-deviation"),
        Method::ClosedForm,
        worst.0,
        0.0,
        CYCLIC_TOL,
    )
    .note("largest |solver - Brahmagupta| over random feasible quadrilaterals")];
    for n in 3..=8usize {
        let side = 1.0 / n as f64;
        let area = max_cyclic_area(&vec![side; n], DEFAULT_TOL)?.area;
        out.push(ResultRecord::within(
            "cyclic-area",
            &format!("regular={n}"),
            Method::ClosedForm,
            area,
            regular_polygon_area(n, side),
            CYCLIC_TOL,
        ));
    }
    Ok(out)
}

fn quad_area(exp: &Experiment) -> Result<Vec<ResultRecord>> {
    let c = mc_expected_quad_area(exp)?;
    Ok(vec![
        ResultRecord::z_gated("quad-area", "stat=mean", &c.mean, exact_expected_quad_area()),
        ResultRecord::z_gated("quad-area", "stat=acceptance", &c.acceptance, 0.5),
    ])
}

fn order_statistics(exp: &Experiment) -> Result<Vec<ResultRecord>> {
    let mut out = Vec::new();
    for n in 1..=6 {
        out.extend(order_statistic_records(n, None, exp)?);
    }
    let cf = Method::ClosedForm;
    for n in 1..=6usize {
        let total: f64 = (1..=n).map(|k| expected_kth_longest(n, k)).sum::<Result<f64>>()?;
        out.push(ResultRecord::within(
            "kth-longest",
            &format!("n={n};check=sum-of-means"),
            cf,
            total,
            1.0,
            1e-12,
        ));
    }
    out.push(ResultRecord::within(
        "kth-longest",
        "n=1;k=1;stat=variance",
        cf,
        variance_kth_longest(1, 1)?,
        0.0,
        0.0,
    ));
    out.push(ResultRecord::within(
        "kth-longest",
        "n=2;k=1;stat=variance",
        cf,
        variance_kth_longest(2, 1)?,
        1.0 / 48.0,
        1e-15,
    ));
    Ok(out)
}

fn closed_form_family(exp: &Experiment) -> Result<Vec<ResultRecord>> {
    let mut cases: Vec<(KgonQuery, f64, &str)> = Vec::new();
    for n in 3..=7usize {
        cases.push((
            KgonQuery::new(n, n, 1)?,
            1.0 - n as f64 / 2f64.powi(n as i32 - 1),
            "all-pieces",
        ));
    }
    for n in 3..=6usize {
        cases.push((KgonQuery::new(3, n, 1)?, 1.0 - no_triangle_probability(n), "fibonacci"));
    }
    for n in 3..=5usize {
        let all = binomial(n as u64, 3).expect("small");
        let ways = binomial(2 * n as u64 - 2, n as u64).expect("small");
        cases.push((KgonQuery::new(3, n, all)?, 1.0 / ways as f64, "every-triple"));
    }
    let mut cache: Vec<(KgonQuery, Estimate)> = Vec::new();
    let mut out = Vec::new();
    for (q, exact, family) in cases {
        let est = match cache.iter().find(|(c, _)| *c == q) {
            Some((_, e)) => *e,
            None => {
                let e = mc_p(&q, exp)?;
                cache.push((q, e));
                e
            }
        };
        let params = format!("{};family={family}", kgon_params(&q));
        out.push(ResultRecord::z_gated("p-kgon", &params, &est, exact));
    }
    Ok(out)
}

fn witnesses() -> Result<Vec<ResultRecord>> {
    let mut out = Vec::new();
    for n in 3..=6usize {
        let subsets = binomial(n as u64, 3).expect("small");
        for m in 0..=subsets {
            let params = format!("k=3;n={n};m={m}");
            let rec = match find_witness(3, n, m) {
                Ok(pieces) => {
                    let count = count_kgons(pieces.lengths(), 3)?;
                    let list: Vec<String> = pieces.lengths().iter().map(|x| x.to_string()).collect();
                    ResultRecord::within("witness", &params, Method::Construction, count as f64, m as f64, 0.0)
                        .note(list.join(" "))
                }
                Err(e) => ResultRecord::within("witness", &params, Method::Construction, -1.0, m as f64, 0.0)
                    .note(e.to_string()),
            };
            out.push(rec);
        }
    }
    Ok(out)
}

fn x_process(exp: &Experiment) -> Result<Vec<ResultRecord>> {
    let mut out = x_process_records(exp)?;
    let e = mc_event_e(exp)?;
    out.push(ResultRecord::z_gated("event-e", "", &e.event, P_EVENT_E));
    let b = ex_bounds();
    out.push(ResultRecord::within(
        "ex-bounds",
        "part=lower",
        Method::Bound,
        b.lower,
        353.0 / 112.0,
        0.0,
    ));
    out.push(ResultRecord::info("ex-bounds", "part=upper", Method::Bound, b.upper));
    Ok(out)
}

fn center_lines(exp: &Experiment) -> Result<(Vec<ResultRecord>, Vec<ResultRecord>)> {
    let mut gated = Vec::new();
    let mut printed = Vec::new();
    for n in 2..=8 {
        for r in center_line_records(n, exp)? {
            if r.params.ends_with("stat=triangle-area") {
                printed.push(r);
            } else {
                gated.push(r);
            }
        }
    }
    Ok((gated, printed))
}

fn chords(exp: &Experiment, reports: &[ChordReport]) -> Result<Vec<ResultRecord>> {
    let mut out: Vec<ResultRecord> = reports.iter().flat_map(chord_records).collect();
    let pair = mc_chord_intersection(exp)?;
    out.push(ResultRecord::z_gated(
        "chord-intersection",
        "stat=intersect",
        &pair.intersect,
        CHORD_CROSSING_PROBABILITY,
    ));
    Ok(out)
}

fn bounds(exp: &Experiment, reports: &[ChordReport]) -> Result<Vec<ResultRecord>> {
    let (mut out, lambda) = lambda_records(exp)?;
    for r in reports.iter().filter(|r| [2, 4, 6].contains(&r.n)) {
        out.push(half_area_record(r, lambda)?);
    }
    Ok(out)
}

/// Reruns a reduced slice of the matrix with 1 and 8 workers and compares the
/// serialized records.
fn determinism(exp: &Experiment) -> Result<Vec<ResultRecord>> {
    let small = Experiment {
        samples: exp.samples.min(DETERMINISM_SAMPLES),
        ..*exp
    };
    let slice = |workers: usize| -> Result<String> {
        let e = small.with_workers(workers);
        let mut rows = order_statistic_records(4, None, &e)?;
        rows.extend(chord_records(&chord_experiment(3, &e)?));
        rows.extend(center_line_records(3, &e)?);
        Ok(serde_json::to_string(&rows).expect("records serialize"))
    };
    let same = if slice(1)? == slice(8)? { 1.0 } else { 0.0 };
    Ok(vec![ResultRecord::within(
        "determinism",
        &format!("workers=1/8;samples={}", small.samples),
        Method::Construction,
        same,
        1.0,
        0.0,
    )
    .note("1 when the serialized records are byte-identical")])
}

/// Runs every criterion. Rows are ordered by criterion number.
pub fn verify(exp: &Experiment) -> Result<Vec<ResultRecord>> {
    let mut out = Vec::new();
    out.extend(tag(1, classical(exp)?));
    out.extend(tag(2, triangle_area(exp)?));
    out.extend(tag(3, split_largest(exp)?));
    out.extend(tag(4, exceedance(exp)?));
    out.extend(tag(5, cyclic(exp)?));
    out.extend(tag(6, quad_area(exp)?));
    out.extend(tag(7, order_statistics(exp)?));
    out.extend(tag(8, closed_form_family(exp)?));
    out.extend(tag(9, witnesses()?));
    out.extend(tag(10, x_process(exp)?));
    let (centers, printed) = center_lines(exp)?;
    out.extend(tag(11, centers));
    let reports = (1..=6).map(|n| chord_experiment(n, exp)).collect::<Result<Vec<_>>>()?;
    out.extend(tag(12, chords(exp, &reports)?));
    out.extend(tag(13, bounds(exp, &reports)?));
    out.extend(tag(14, printed));
    out.extend(tag(15, determinism(exp)?));
    Ok(out)
}
