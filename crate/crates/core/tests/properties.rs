use brokenstick::kgon::find_witness;
use brokenstick::numerics::{find_root, StreamingStats};
use brokenstick::polygon::{brahmagupta_area, max_cyclic_area, DEFAULT_TOL};
use brokenstick::sampling::{any_kgon, count_kgons, forms_kgon, kth_longest, Partition};
use brokenstick::square::{ConvexRegion, RegionSet, Side, SquareLine};
use proptest::prelude::*;

fn pieces(min: usize, max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, min..=max)
}

fn feasible(sides: &[f64]) -> bool {
    let total: f64 = sides.iter().sum();
    let longest = sides.iter().copied().fold(0.0, f64::max);
    longest < total - longest
}

fn brute_count(p: &[f64], k: usize) -> u64 {
    let n = p.len();
    (0u32..1 << n)
        .filter(|mask| mask.count_ones() as usize == k)
        .filter(|mask| {
            let chosen: Vec<f64> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| p[i]).collect();
            feasible(&chosen)
        })
        .count() as u64
}

fn shoelace(v: &[[f64; 2]]) -> f64 {
    let n = v.len();
    0.5 * (0..n)
        .map(|i| v[i][0] * v[(i + 1) % n][1] - v[(i + 1) % n][0] * v[i][1])
        .sum::<f64>()
}

fn side() -> impl Strategy<Value = Side> {
    prop::sample::select(Side::ALL.to_vec())
}

fn chord() -> impl Strategy<Value = SquareLine> {
    (side(), 0.0f64..1.0, side(), 0.0f64..1.0).prop_map(|(a, s, b, t)| SquareLine::chord((a, s), (b, t)))
}

proptest! {
    #[test]
    fn counts_match_brute_force(p in pieces(3, 9), k in 3usize..6) {
        prop_assume!(k <= p.len());
        prop_assert_eq!(count_kgons(&p, k).unwrap(), brute_count(&p, k));
        prop_assert_eq!(any_kgon(&p, k).unwrap(), brute_count(&p, k) > 0);
    }

    #[test]
    fn counts_ignore_order_and_scale(mut p in pieces(3, 9), k in 3usize..5, scale in 0.01f64..100.0, seed in any::<u64>()) {
        prop_assume!(k <= p.len());
        let before = count_kgons(&p, k).unwrap();
        let scaled: Vec<f64> = p.iter().map(|x| x * scale).collect();
        // scaling can move a near tie across the strict inequality
        let tie = (0..1u32 << p.len()).any(|mask| {
            let s: Vec<f64> = (0..p.len()).filter(|i| mask & (1 << i) != 0).map(|i| p[i]).collect();
            let total: f64 = s.iter().sum();
            let longest = s.iter().copied().fold(0.0, f64::max);
            s.len() == k && (2.0 * longest - total).abs() < 1e-9
        });
        if !tie {
            prop_assert_eq!(count_kgons(&scaled, k).unwrap(), before);
        }
        let n = p.len();
        for i in (1..n).rev() {
            let j = (seed.rotate_left(i as u32) % (i as u64 + 1)) as usize;
            p.swap(i, j);
        }
        prop_assert_eq!(count_kgons(&p, k).unwrap(), before);
    }

    #[test]
    fn feasibility_is_the_strict_inequality(p in pieces(3, 8)) {
        prop_assert_eq!(forms_kgon(&p).unwrap(), feasible(&p));
    }

    #[test]
    fn shrinking_the_longest_side_keeps_feasibility(p in pieces(3, 8), f in 0.0f64..1.0) {
        prop_assume!(forms_kgon(&p).unwrap());
        let mut q = p.clone();
        let i = (0..q.len()).max_by(|&a, &b| q[a].total_cmp(&q[b])).unwrap();
        let others = q.iter().sum::<f64>() - q[i];
        let floor = q.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x).fold(0.0, f64::max);
        q[i] = floor + f * (q[i] - floor);
        prop_assert!(q[i] < others);
        prop_assert!(forms_kgon(&q).unwrap());
    }

    #[test]
    fn partitions_sum_to_one(breaks in prop::collection::vec(0.0f64..=1.0, 0..12)) {
        let p = Partition::from_breaks(breaks.clone()).unwrap().pieces();
        prop_assert_eq!(p.len(), breaks.len() + 1);
        prop_assert!((p.total() - 1.0).abs() < 1e-12);
        prop_assert!(p.lengths().iter().all(|&x| x >= 0.0));
        let ranks: Vec<f64> = (1..=p.len()).map(|k| kth_longest(p.lengths(), k).unwrap()).collect();
        prop_assert!(ranks.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn cyclic_area_scales_quadratically(p in pieces(3, 7), c in 0.1f64..10.0) {
        prop_assume!(p.iter().all(|&x| x > 1e-3) && feasible(&p));
        let longest = p.iter().copied().fold(0.0, f64::max);
        prop_assume!(p.iter().sum::<f64>() - 2.0 * longest > 1e-3);
        let a = max_cyclic_area(&p, DEFAULT_TOL).unwrap().area;
        let scaled: Vec<f64> = p.iter().map(|x| x * c).collect();
        let b = max_cyclic_area(&scaled, DEFAULT_TOL).unwrap().area;
        prop_assert!((b - c * c * a).abs() <= 1e-8 * (1.0 + b));
    }

    #[test]
    fn cyclic_area_ignores_side_order(p in pieces(3, 7)) {
        prop_assume!(p.iter().all(|&x| x > 1e-3) && feasible(&p));
        let longest = p.iter().copied().fold(0.0, f64::max);
        prop_assume!(p.iter().sum::<f64>() - 2.0 * longest > 1e-3);
        let a = max_cyclic_area(&p, DEFAULT_TOL).unwrap().area;
        let mut r = p.clone();
        r.reverse();
        r.rotate_left(1);
        let b = max_cyclic_area(&r, DEFAULT_TOL).unwrap().area;
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn cyclic_reconstruction_closes(p in pieces(3, 7)) {
        prop_assume!(p.iter().all(|&x| x > 1e-3) && feasible(&p));
        let longest = p.iter().copied().fold(0.0, f64::max);
        prop_assume!(p.iter().sum::<f64>() - 2.0 * longest > 1e-3);
        let sol = max_cyclic_area(&p, DEFAULT_TOL).unwrap();
        let v = sol.vertices();
        let n = v.len();
        for i in 0..n {
            let (a, b) = (v[i], v[(i + 1) % n]);
            let d = (a[0] - b[0]).hypot(a[1] - b[1]);
            prop_assert!((d - p[i]).abs() < 1e-8, "side {} is {} not {}", i, d, p[i]);
            prop_assert!(((a[0] * a[0] + a[1] * a[1]).sqrt() - sol.circumradius).abs() < 1e-9);
        }
        prop_assert!((shoelace(&v).abs() - sol.area).abs() < 1e-8);
    }

    #[test]
    fn cyclic_quadrilaterals_match_brahmagupta(p in pieces(4, 4)) {
        prop_assume!(p.iter().all(|&x| x > 1e-6) && feasible(&p));
        let cyclic = max_cyclic_area(&p, DEFAULT_TOL).unwrap().area;
        let exact = brahmagupta_area(p[0], p[1], p[2], p[3]).unwrap();
        prop_assert!((cyclic - exact).abs() < 1e-9);
    }

    #[test]
    fn merge_order_does_not_matter(xs in prop::collection::vec(-10.0f64..10.0, 2..200), cut in any::<prop::sample::Index>()) {
        let mut whole = StreamingStats::new();
        xs.iter().for_each(|&x| whole.push(x));
        let k = cut.index(xs.len());
        let (mut a, mut b) = (StreamingStats::new(), StreamingStats::new());
        xs[..k].iter().for_each(|&x| a.push(x));
        xs[k..].iter().for_each(|&x| b.push(x));
        let mut ab = a;
        ab.merge(&b);
        let mut ba = b;
        ba.merge(&a);
        for m in [&ab, &ba] {
            prop_assert_eq!(m.count(), whole.count());
            prop_assert!((m.mean() - whole.mean()).abs() < 1e-12);
            prop_assert!((m.variance() - whole.variance()).abs() < 1e-9 * (1.0 + whole.variance()));
        }
    }

    #[test]
    fn root_does_not_depend_on_bracket_orientation(c in -0.9f64..0.9) {
        let f = |x: f64| x * x * x - c;
        let a = find_root(f, -1.0, 1.0, 1e-14).unwrap();
        let b = find_root(f, 1.0, -1.0, 1e-14).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
        prop_assert!((a - c.cbrt()).abs() < 1e-9);
    }

    #[test]
    fn chord_cuts_conserve_area(lines in prop::collection::vec(chord(), 0..10)) {
        let mut rs = RegionSet::unit_square();
        for l in &lines {
            rs.cut(l);
            prop_assert!((rs.total_area() - 1.0).abs() < 1e-9);
        }
        prop_assert!(rs.regions.iter().all(|r: &ConvexRegion| r.is_convex() && r.area() > 0.0));
    }

    #[test]
    fn witnesses_reverify(n in 3usize..8, frac in 0.0f64..=1.0) {
        let total = brokenstick::sampling::binomial(n as u64, 3).unwrap();
        let m = (frac * total as f64).round() as u64;
        let w = find_witness(3, n, m).unwrap();
        prop_assert_eq!(count_kgons(w.lengths(), 3).unwrap(), m);
        prop_assert!((w.total() - 1.0).abs() < 1e-12);
    }
}
