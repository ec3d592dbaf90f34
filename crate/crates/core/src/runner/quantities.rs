//! The quantity registry: what `exact` and `estimate` can compute.

use crate::error::{Error, Result};
use crate::kgon::{
    closed_form_p, ex_bounds, exact_count_distribution, mc_event_e, mc_p, mc_x_process, no_triangle_probability,
    KgonQuery, DEFAULT_X_CAP, P_EVENT_E, P_STOP_AT_THREE, P_STOP_AT_TWO,
};
use crate::numerics::montecarlo::Experiment;
use crate::polygon::{brahmagupta_area, heron_area, max_cyclic_area, DEFAULT_TOL};
use crate::runner::record::{Method, ResultRecord};
use crate::runner::Params;
use crate::square::experiments::{
    center_line_experiment, chord_experiment, expected_center_triangles, expected_chord_regions, half_area_bounds,
    lambda_estimate, mc_chord_intersection, printed_triangle_area_formula, CHORD_CROSSING_PROBABILITY,
    DEGENERATE_CHORD_PROBABILITY,
};
use crate::stick::{
    area_exceedance, exact_expected_quad_area, exact_expected_triangle_area, exact_split_largest, exceedance_limit,
    expected_kth_longest, mc_area_exceedance, mc_expected_quad_area, mc_expected_triangle_area, mc_order_statistics,
    mc_split_largest, variance_kth_longest,
};

/// Published approximations used as references.
pub const LAMBDA_REFERENCE: f64 = 0.345;
pub const LAMBDA_TOLERANCE: f64 = 0.01;
pub const EX_APPROXIMATION: f64 = 3.351;
pub const EX_APPROXIMATION_TOLERANCE: f64 = 0.05;
pub const SINGLE_CHORD_MAX_AREA: f64 = 5.0 / 6.0;

pub struct Quantity {
    pub id: &'static str,
    pub params: &'static str,
    pub exact: bool,
    pub estimate: bool,
    pub summary: &'static str,
}

const fn q(id: &'static str, params: &'static str, exact: bool, estimate: bool, summary: &'static str) -> Quantity {
    Quantity {
        id,
        params,
        exact,
        estimate,
        summary,
    }
}

pub const QUANTITIES: &[Quantity] = &[
    q("p-triangle", "", true, true, "three pieces form a triangle"),
    q(
        "p-kgon",
        "k n m",
        true,
        true,
        "at least m of the k-subsets of n pieces form k-gons",
    ),
    q(
        "count-distribution",
        "k n",
        false,
        true,
        "histogram of the number of k-gons among n pieces",
    ),
    q(
        "triangle-area",
        "",
        true,
        true,
        "mean triangle area given a triangle forms",
    ),
    q(
        "split-largest",
        "",
        true,
        true,
        "perimeter and area when re-breaking the largest piece",
    ),
    q(
        "area-exceedance",
        "a0",
        true,
        true,
        "P(area > a0) given a triangle forms",
    ),
    q(
        "quad-area",
        "",
        true,
        true,
        "mean largest quadrilateral area given one forms",
    ),
    q(
        "kth-longest",
        "n [k]",
        true,
        true,
        "mean and variance of the k-th longest of n pieces",
    ),
    q("heron-area", "sides(3)", true, false, "triangle area from side lengths"),
    q("brahmagupta-area", "sides(4)", true, false, "cyclic quadrilateral area"),
    q("cyclic-area", "sides", true, false, "largest area for a side list"),
    q(
        "x-process",
        "",
        true,
        true,
        "breaks added until some three pieces form a triangle",
    ),
    q("event-e", "", true, true, "triangle after two breaks, none after three"),
    q("ex-bounds", "", true, false, "bounds on the mean stopping count"),
    q(
        "center-lines",
        "n",
        true,
        true,
        "square cut by n lines through its center",
    ),
    q("chords", "n", true, true, "square cut by n random perimeter chords"),
    q(
        "chord-intersection",
        "",
        true,
        true,
        "two random chords cross inside the square",
    ),
    q("lambda", "", false, true, "a random chord misses the central disk"),
    q(
        "half-area-bounds",
        "n",
        true,
        true,
        "bounds on P(some region keeps half the area)",
    ),
];

pub fn lookup(id: &str) -> Result<&'static Quantity> {
    QUANTITIES
        .iter()
        .find(|q| q.id == id)
        .ok_or_else(|| Error::UnknownQuantity(id.to_string()))
}

fn need<T: Copy>(value: Option<T>, name: &'static str, quantity: &str) -> Result<T> {
    value.ok_or_else(|| Error::invalid(name, format!("{quantity} needs --{name}")))
}

fn unsupported(quantity: &str, command: &str) -> Error {
    Error::invalid("quantity", format!("{quantity} has no {command} mode"))
}

pub fn exact(quantity: &str, p: &Params) -> Result<Vec<ResultRecord>> {
    let info = lookup(quantity)?;
    if !info.exact {
        return Err(unsupported(quantity, "exact"));
    }
    let cf = Method::ClosedForm;
    let rec = |params: &str, value: f64| ResultRecord::info(quantity, params, cf, value);
    let out = match quantity {
        "p-triangle" => {
            let v = closed_form_p(&KgonQuery::new(3, 3, 1)?).expect("family");
            vec![ResultRecord::within(quantity, "k=3;n=3;m=1", cf, v, 0.25, 0.0)]
        }
        "p-kgon" => {
            let query = kgon_query(p, quantity)?;
            let v = closed_form_p(&query).ok_or_else(|| {
                Error::invalid(
                    "m",
                    "no closed form for this (k, n, m); only (n, n, 1), (3, n, 1) and (3, n, C(n, 3)) have one",
                )
            })?;
            vec![rec(&kgon_params(&query), v)]
        }
        "triangle-area" => vec![rec("", exact_expected_triangle_area())],
        "split-largest" => {
            let (perimeter, area) = exact_split_largest();
            vec![rec("part=perimeter", perimeter), rec("part=area", area)]
        }
        "area-exceedance" => {
            let a0 = need(p.a0, "a0", quantity)?;
            let e = area_exceedance(a0)?;
            let mut r = ResultRecord::info(quantity, &format!("a0={a0}"), Method::Quadrature, e.probability);
            r.std_error = None;
            r = r.note(format!("quadrature error estimate {}", e.abs_error));
            let limit = exceedance_limit()?;
            vec![
                r,
                ResultRecord::within(quantity, "a0=0", Method::Quadrature, limit, 1.0, 1e-8).note("limit as a0 -> 0"),
            ]
        }
        "quad-area" => vec![rec("", exact_expected_quad_area())],
        "kth-longest" => {
            let n = need(p.n, "n", quantity)?;
            let ks: Vec<usize> = match p.k {
                Some(k) => vec![k],
                None => (1..=n).collect(),
            };
            let mut out = Vec::new();
            for k in ks {
                let params = format!("n={n};k={k}");
                out.push(rec(&format!("{params};stat=mean"), expected_kth_longest(n, k)?));
                out.push(rec(&format!("{params};stat=variance"), variance_kth_longest(n, k)?));
            }
            out
        }
        "heron-area" => {
            let s = sides(p, 3, quantity)?;
            vec![rec(&sides_param(&s), heron_area(s[0], s[1], s[2])?)]
        }
        "brahmagupta-area" => {
            let s = sides(p, 4, quantity)?;
            vec![rec(&sides_param(&s), brahmagupta_area(s[0], s[1], s[2], s[3])?)]
        }
        "cyclic-area" => {
            let s = p
                .sides
                .clone()
                .ok_or_else(|| Error::invalid("sides", "cyclic-area needs --sides"))?;
            let sol = max_cyclic_area(&s, DEFAULT_TOL)?;
            let params = sides_param(&s);
            vec![
                rec(&format!("{params};part=area"), sol.area).note(if sol.center_inside {
                    "center inside"
                } else {
                    "center outside"
                }),
                rec(&format!("{params};part=circumradius"), sol.circumradius),
                rec(&format!("{params};part=closure-error"), sol.closure_error()),
            ]
        }
        "x-process" => {
            let b = ex_bounds();
            vec![
                rec("stat=p-two", P_STOP_AT_TWO),
                rec("stat=p-three", P_STOP_AT_THREE),
                ResultRecord::info(quantity, "stat=mean-lower", Method::Bound, b.lower),
                ResultRecord::info(quantity, "stat=mean-upper", Method::Bound, b.upper),
            ]
        }
        "event-e" => vec![rec("", P_EVENT_E)],
        "ex-bounds" => {
            let b = ex_bounds();
            vec![
                ResultRecord::info(quantity, "part=lower", Method::Bound, b.lower),
                ResultRecord::info(quantity, "part=upper", Method::Bound, b.upper),
                rec("part=series", b.series),
            ]
        }
        "center-lines" => {
            let n = need(p.n, "n", quantity)?;
            let mut out = vec![
                rec(&format!("n={n};stat=regions"), 2.0 * n as f64),
                rec(&format!("n={n};stat=triangles"), expected_center_triangles(n)),
            ];
            if let Some(v) = printed_triangle_area_formula(n) {
                out.push(rec(&format!("n={n};stat=printed-triangle-area"), v).note("outside [0, 1]; not a valid area"));
            }
            out
        }
        "chords" => {
            let n = need(p.n, "n", quantity)?;
            vec![rec(&format!("n={n};stat=regions"), expected_chord_regions(n))]
        }
        "chord-intersection" => vec![
            rec("stat=intersect", CHORD_CROSSING_PROBABILITY),
            rec("stat=degenerate", DEGENERATE_CHORD_PROBABILITY),
        ],
        "half-area-bounds" => {
            let n = need(p.n, "n", quantity)?;
            let (lo, hi) = half_area_bounds(n, LAMBDA_REFERENCE)?;
            vec![
                ResultRecord::info(quantity, &format!("n={n};part=lower"), Method::Bound, lo)
                    .note(format!("lambda = {LAMBDA_REFERENCE}")),
                ResultRecord::info(quantity, &format!("n={n};part=upper"), Method::Bound, hi),
            ]
        }
        other => return Err(unsupported(other, "exact")),
    };
    Ok(out)
}

pub fn estimate(quantity: &str, p: &Params, exp: &Experiment) -> Result<Vec<ResultRecord>> {
    let info = lookup(quantity)?;
    if !info.estimate {
        return Err(unsupported(quantity, "estimate"));
    }
    let out = match quantity {
        "p-triangle" => {
            let est = mc_p(&KgonQuery::new(3, 3, 1)?, exp)?;
            vec![ResultRecord::z_gated(quantity, "k=3;n=3;m=1", &est, 0.25)]
        }
        "p-kgon" => {
            let query = kgon_query(p, quantity)?;
            let est = mc_p(&query, exp)?;
            let params = kgon_params(&query);
            vec![match closed_form_p(&query) {
                Some(v) => ResultRecord::z_gated(quantity, &params, &est, v),
                None => ResultRecord::estimate(quantity, &params, &est),
            }]
        }
        "count-distribution" => {
            let k = need(p.k, "k", quantity)?;
            let n = need(p.n, "n", quantity)?;
            let d = exact_count_distribution(k, n, exp)?;
            (0..d.counts.len())
                .map(|c| {
                    let params = format!("k={k};n={n};count={c}");
                    let est = d.cell(c);
                    if k == 3 && c == 0 {
                        ResultRecord::z_gated(quantity, &params, &est, no_triangle_probability(n))
                    } else {
                        ResultRecord::estimate(quantity, &params, &est)
                    }
                })
                .collect()
        }
        "triangle-area" => {
            let c = mc_expected_triangle_area(exp)?;
            vec![
                ResultRecord::z_gated(quantity, "stat=mean", &c.mean, exact_expected_triangle_area()),
                ResultRecord::z_gated(quantity, "stat=acceptance", &c.acceptance, 0.25),
            ]
        }
        "split-largest" => {
            let r = mc_split_largest(exp)?;
            let (perimeter, area) = exact_split_largest();
            vec![
                ResultRecord::z_gated(quantity, "part=perimeter", &r.perimeter, perimeter),
                ResultRecord::z_gated(quantity, "part=area", &r.area, area).note(format!("{} runs capped", r.capped)),
            ]
        }
        "area-exceedance" => {
            let a0 = need(p.a0, "a0", quantity)?;
            exceedance_records(&[a0], exp, None)?
        }
        "quad-area" => {
            let c = mc_expected_quad_area(exp)?;
            vec![
                ResultRecord::z_gated(quantity, "stat=mean", &c.mean, exact_expected_quad_area()),
                ResultRecord::z_gated(quantity, "stat=acceptance", &c.acceptance, 0.5),
            ]
        }
        "kth-longest" => {
            let n = need(p.n, "n", quantity)?;
            order_statistic_records(n, p.k, exp)?
        }
        "x-process" => x_process_records(exp)?,
        "event-e" => {
            let r = mc_event_e(exp)?;
            vec![ResultRecord::z_gated(quantity, "", &r.event, P_EVENT_E)]
        }
        "center-lines" => {
            let n = need(p.n, "n", quantity)?;
            center_line_records(n, exp)?
        }
        "chords" => {
            let n = need(p.n, "n", quantity)?;
            let r = chord_experiment(n, exp)?;
            chord_records(&r)
        }
        "chord-intersection" => {
            let r = mc_chord_intersection(exp)?;
            vec![
                ResultRecord::z_gated(quantity, "stat=intersect", &r.intersect, CHORD_CROSSING_PROBABILITY),
                ResultRecord::z_gated(quantity, "stat=degenerate", &r.degenerate, DEGENERATE_CHORD_PROBABILITY),
            ]
        }
        "lambda" => lambda_records(exp)?.0,
        "half-area-bounds" => {
            let n = need(p.n, "n", quantity)?;
            let (mut out, lambda) = lambda_records(exp)?;
            let r = chord_experiment(n, exp)?;
            out.push(half_area_record(&r, lambda)?);
            out
        }
        other => return Err(unsupported(other, "estimate")),
    };
    Ok(out)
}

fn kgon_query(p: &Params, quantity: &str) -> Result<KgonQuery> {
    KgonQuery::new(
        need(p.k, "k", quantity)?,
        need(p.n, "n", quantity)?,
        need(p.m, "m", quantity)?,
    )
}

pub(crate) fn kgon_params(q: &KgonQuery) -> String {
    format!("k={};n={};m={}", q.k, q.n, q.m)
}

fn sides(p: &Params, count: usize, quantity: &str) -> Result<Vec<f64>> {
    match &p.sides {
        Some(s) if s.len() == count => Ok(s.clone()),
        Some(s) => Err(Error::invalid(
            "sides",
            format!("{quantity} needs exactly {count} sides, got {}", s.len()),
        )),
        None => Err(Error::invalid("sides", format!("{quantity} needs --sides"))),
    }
}

fn sides_param(s: &[f64]) -> String {
    let list: Vec<String> = s.iter().map(|x| x.to_string()).collect();
    format!("sides={}", list.join(" "))
}

/// Conditional exceedance frequency against quadrature, gated at
/// `3 stderr + 1e-6`.
pub(crate) fn exceedance_records(a0s: &[f64], exp: &Experiment, criterion: Option<u32>) -> Result<Vec<ResultRecord>> {
    let est = mc_area_exceedance(a0s, exp)?;
    let mut out = Vec::new();
    for (&a0, freq) in a0s.iter().zip(&est.frequencies) {
        let quad = area_exceedance(a0)?;
        let tol = 3.0 * freq.std_error + 1e-6;
        let mut r = ResultRecord::within(
            "area-exceedance",
            &format!("a0={a0}"),
            Method::MonteCarlo,
            freq.mean,
            quad.probability,
            tol,
        )
        .with_spread(freq);
        r.criterion = criterion;
        out.push(r.note("reference by quadrature"));
    }
    Ok(out)
}

pub(crate) fn order_statistic_records(n: usize, k: Option<usize>, exp: &Experiment) -> Result<Vec<ResultRecord>> {
    let stats = mc_order_statistics(n, exp)?;
    let mut out = Vec::new();
    for s in stats.iter().filter(|s| k.map_or(true, |k| k == s.k)) {
        let params = format!("n={n};k={}", s.k);
        out.push(ResultRecord::z_gated(
            "kth-longest",
            &format!("{params};stat=mean"),
            &s.mean,
            expected_kth_longest(n, s.k)?,
        ));
        out.push(ResultRecord::z_gated(
            "kth-longest",
            &format!("{params};stat=variance"),
            &s.variance,
            variance_kth_longest(n, s.k)?,
        ));
    }
    Ok(out)
}

pub(crate) fn x_process_records(exp: &Experiment) -> Result<Vec<ResultRecord>> {
    let r = mc_x_process(DEFAULT_X_CAP, exp)?;
    let b = ex_bounds();
    let q = "x-process";
    Ok(vec![
        ResultRecord::z_gated(q, "stat=p-two", &r.p_two, P_STOP_AT_TWO),
        ResultRecord::z_gated(q, "stat=p-three", &r.p_three, P_STOP_AT_THREE),
        ResultRecord::in_interval(
            q,
            "stat=mean;check=bounds",
            Method::MonteCarlo,
            r.mean.mean,
            b.lower,
            b.upper,
        )
        .with_spread(&r.mean),
        ResultRecord::within(
            q,
            "stat=mean;check=approximation",
            Method::MonteCarlo,
            r.mean.mean,
            EX_APPROXIMATION,
            EX_APPROXIMATION_TOLERANCE,
        )
        .with_spread(&r.mean)
        .note(format!(
            "{} of {} runs censored at {} breaks (probability <= {:.3e})",
            r.censored, r.mean.n_samples, r.cap, r.censoring_bound
        )),
    ])
}

pub(crate) fn center_line_records(n: usize, exp: &Experiment) -> Result<Vec<ResultRecord>> {
    let r = center_line_experiment(n, exp)?;
    let q = "center-lines";
    let cf = Method::ClosedForm;
    let mut out = vec![
        ResultRecord::within(
            q,
            &format!("n={n};check=region-count"),
            cf,
            r.count_mismatches as f64,
            0.0,
            0.0,
        )
        .note("samples without exactly 2n regions"),
        ResultRecord::z_gated(
            q,
            &format!("n={n};stat=triangles"),
            &r.triangles,
            expected_center_triangles(n),
        ),
    ];
    if n >= 2 {
        out.push(
            ResultRecord::within(
                q,
                &format!("n={n};stat=half-area"),
                Method::MonteCarlo,
                r.half_area.mean,
                0.0,
                0.0,
            )
            .with_spread(&r.half_area)
            .note("frequency of a region with area >= 1/2"),
        );
        out.push(
            ResultRecord::within(
                q,
                &format!("n={n};check=triangle-dichotomy"),
                cf,
                r.dichotomy_violations as f64,
                0.0,
                0.0,
            )
            .note("samples with neither 2n-4 nor 2n-2 triangles"),
        );
    }
    out.push(ResultRecord::estimate(q, &format!("n={n};stat=max-area"), &r.max_area));
    out.push(ResultRecord::within(
        q,
        &format!("n={n};check=area-conservation"),
        cf,
        r.max_area_deviation,
        0.0,
        1e-9,
    ));
    if let Some(t) = &r.triangle_area {
        let mut rec = ResultRecord::estimate(q, &format!("n={n};stat=triangle-area"), t);
        if let Some(printed) = r.printed_triangle_area {
            rec.reference = Some(printed);
            rec = rec.note(format!(
                "not gated: the printed closed form gives {printed}, outside [0, 1]"
            ));
        }
        out.push(rec);
    }
    Ok(out)
}

pub(crate) fn chord_records(r: &crate::square::ChordReport) -> Vec<ResultRecord> {
    let n = r.n;
    let q = "chords";
    let cf = Method::ClosedForm;
    let mut out = vec![
        ResultRecord::z_gated(q, &format!("n={n};stat=regions"), &r.regions, r.expected_regions),
        ResultRecord::within(
            q,
            &format!("n={n};check=count-agreement"),
            cf,
            r.mismatches as f64,
            0.0,
            0.0,
        )
        .note(format!("{} flagged samples excluded", r.flagged)),
        ResultRecord::within(
            q,
            &format!("n={n};check=area-conservation"),
            cf,
            r.max_area_deviation,
            0.0,
            1e-9,
        ),
    ];
    let max_area = if n == 1 {
        ResultRecord::z_gated(q, &format!("n={n};stat=max-area"), &r.max_area, SINGLE_CHORD_MAX_AREA)
    } else {
        ResultRecord::estimate(q, &format!("n={n};stat=max-area"), &r.max_area)
    };
    out.push(max_area);
    out.push(ResultRecord::estimate(
        q,
        &format!("n={n};stat=half-area"),
        &r.half_area,
    ));
    out
}

/// Lambda record and the lambda value used for the lower bound.
pub(crate) fn lambda_records(exp: &Experiment) -> Result<(Vec<ResultRecord>, f64)> {
    let l = lambda_estimate(exp)?;
    let rec = ResultRecord::within(
        "lambda",
        "given=non-degenerate",
        Method::MonteCarlo,
        l.lambda.mean,
        LAMBDA_REFERENCE,
        LAMBDA_TOLERANCE,
    )
    .with_spread(&l.lambda);
    let all =
        ResultRecord::estimate("lambda", "given=none", &l.unconditional).note("degenerate chords counted as misses");
    Ok((vec![rec, all], l.lambda.mean))
}

/// The chord experiment's half-area frequency against `[lambda^n - 3 se, upper + 3 se]`.
pub(crate) fn half_area_record(r: &crate::square::ChordReport, lambda: f64) -> Result<ResultRecord> {
    let (lo, hi) = half_area_bounds(r.n, lambda)?;
    let slack = 3.0 * r.half_area.std_error;
    Ok(ResultRecord::in_interval(
        "half-area-bounds",
        &format!("n={}", r.n),
        Method::Bound,
        r.half_area.mean,
        lo - slack,
        hi + slack,
    )
    .with_spread(&r.half_area))
}
