use proptest::prelude::*;

use kmrate_core::convexity::{eta_cat0, eta_monotone, FnModulus, Modulus, Monotonized};
use kmrate_core::geodesic::{cn_excess, segment_deviation};
use kmrate_core::iteration::{run_km, weight_sum, witness_theta, LambdaSchedule, StopRule};
use kmrate_core::operators::{averaged, make_rotation, Operator};
use kmrate_core::rates::*;
use kmrate_core::spaces::{Euclidean, Hyperboloid, StarTree, TreePoint};
use kmrate_core::GeodesicSpace;

fn coord() -> impl Strategy<Value = f64> {
    -50.0..50.0f64
}

fn tree() -> StarTree {
    StarTree::new(&[10.0, 4.0, 7.0, 10.0]).unwrap()
}

fn tree_point() -> impl Strategy<Value = TreePoint> {
    (0..4usize, 0.0..1.0f64).prop_map(|(e, u)| {
        let t = tree();
        t.point(e, u * t.lengths()[e]).unwrap()
    })
}

fn spatial2() -> impl Strategy<Value = [f64; 2]> {
    (0.0..3.0f64, 0.0..core::f64::consts::TAU).prop_map(|(r, a)| [r * a.cos(), r * a.sin()])
}

proptest! {
    #[test]
    fn euclidean_distance_is_the_hypotenuse(a in coord(), b in coord(), c in coord(), d in coord()) {
        let e = Euclidean::new(2).unwrap();
        let p = e.point(&[a, b]).unwrap();
        let q = e.point(&[c, d]).unwrap();
        prop_assert!((e.distance(&p, &q).unwrap() - (a - c).hypot(b - d)).abs() <= 1e-12 * (1.0 + a.abs() + b.abs() + c.abs() + d.abs()));
    }

    #[test]
    fn tree_distance_matches_path_oracle(p in tree_point(), q in tree_point()) {
        let t = tree();
        // Walk from p to the center and out to q, then cancel any shared
        // stretch of edge.
        let through_center = p.offset + q.offset;
        let shared = if p.edge == q.edge { 2.0 * p.offset.min(q.offset) } else { 0.0 };
        let oracle = through_center - shared;
        prop_assert!((t.distance(&p, &q).unwrap() - oracle).abs() <= 1e-12);
    }

    #[test]
    fn tree_segments_are_exact(p in tree_point(), q in tree_point(), l in 0.0..=1.0f64) {
        let t = tree();
        prop_assert!(segment_deviation(&t, &p, &q, l).unwrap() <= 1e-12);
    }

    #[test]
    fn hyperbolic_segments(a in spatial2(), b in spatial2(), l in 0.0..=1.0f64) {
        let h = Hyperboloid::new(2).unwrap();
        let p = h.lift(&a).unwrap();
        let q = h.lift(&b).unwrap();
        prop_assert!(segment_deviation(&h, &p, &q, l).unwrap() <= 1e-8);
        let flipped = h.combine(&q, &p, 1.0 - l).unwrap();
        prop_assert!(h.distance(&h.combine(&p, &q, l).unwrap(), &flipped).unwrap() <= 1e-8);
    }

    #[test]
    fn hyperbolic_cn(a in spatial2(), b in spatial2(), c in spatial2()) {
        let h = Hyperboloid::new(2).unwrap();
        let (x, y, z) = (h.lift(&a).unwrap(), h.lift(&b).unwrap(), h.lift(&c).unwrap());
        prop_assert!(cn_excess(&h, &x, &y, &z).unwrap() <= 1e-7);
    }

    #[test]
    fn tree_cn(x in tree_point(), y in tree_point(), z in tree_point()) {
        prop_assert!(cn_excess(&tree(), &x, &y, &z).unwrap() <= 1e-9);
    }

    #[test]
    fn averaged_map_is_constant_step_iteration(a in coord(), b in coord(), angle in -3.0..3.0f64, l in 0.01..0.99f64) {
        let e = Euclidean::new(2).unwrap();
        let r = make_rotation(&e, angle).unwrap();
        let t = averaged(&r, l).unwrap();
        let x0 = e.point(&[a, b]).unwrap();
        let trace = run_km(&r, &x0, &LambdaSchedule::constant(l).unwrap(), StopRule::steps(20)).unwrap();
        let mut x = x0;
        for p in &trace.points {
            prop_assert_eq!(&x, p);
            x = t.apply(&x).unwrap();
        }
    }

    #[test]
    fn residuals_never_increase(a in coord(), b in coord(), angle in -3.0..3.0f64) {
        let e = Euclidean::new(2).unwrap();
        let r = make_rotation(&e, angle).unwrap();
        let x0 = e.point(&[a, b]).unwrap();
        let trace = run_km(&r, &x0, &LambdaSchedule::alternating(), StopRule::steps(60)).unwrap();
        for w in trace.residuals.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-9 * (1.0 + w[0]));
        }
    }

    #[test]
    fn witness_is_minimal(n in 1u64..400, l in 0.05..0.95f64) {
        let s = LambdaSchedule::constant(l).unwrap();
        let theta = witness_theta(&s, n).unwrap();
        prop_assert!(weight_sum(&s, theta) >= n as f64);
        if theta > 0 {
            prop_assert!(weight_sum(&s, theta - 1) < n as f64);
        }
        prop_assert!(s.closed_form_theta(n).unwrap() >= theta);
    }

    #[test]
    fn alternating_witness_is_minimal(n in 1u64..200) {
        let s = LambdaSchedule::alternating();
        let theta = witness_theta(&s, n).unwrap();
        prop_assert!(weight_sum(&s, theta) >= n as f64);
        prop_assert!(theta == 0 || weight_sum(&s, theta - 1) < n as f64);
    }

    #[test]
    fn bounds_shrink_as_eps_grows(e1 in 0.01..3.0f64, e2 in 0.01..3.0f64, d in 0.1..5.0f64) {
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let lin = ThetaFn::Linear(4);
        let pairs = [
            (cat0_bound(lo, d, &lin).unwrap(), cat0_bound(hi, d, &lin).unwrap()),
            (cat0_constant_bound(lo, d, 0.3).unwrap(), cat0_constant_bound(hi, d, 0.3).unwrap()),
            (groetsch_bound(lo, d, &lin, &eta_cat0()).unwrap(), groetsch_bound(hi, d, &lin, &eta_cat0()).unwrap()),
            (groetsch_bound_tilde(lo, d, &lin, &eta_cat0()).unwrap(), groetsch_bound_tilde(hi, d, &lin, &eta_cat0()).unwrap()),
            (constant_lambda_bound(lo, d, 0.3, &eta_cat0()).unwrap(), constant_lambda_bound(hi, d, 0.3, &eta_cat0()).unwrap()),
        ];
        for (a, b) in pairs {
            prop_assert!(a.value >= b.value, "{a} < {b}");
        }
        if d < 3.0 {
            let (a, b) = (ishikawa_bound(lo, d, 2).unwrap(), ishikawa_bound(hi, d, 2).unwrap());
            prop_assert!(a.log10 >= b.log10);
        }
    }

    #[test]
    fn halving_eps_at_most_quadruples_the_inner_count(eps in 0.01..1.9f64) {
        // With θ(n) = n the bound is the inner ceiling itself.
        let id = ThetaFn::Linear(1);
        let full = cat0_bound(eps, 1.0, &id).unwrap().to_u64().unwrap();
        let half = cat0_bound(eps / 2.0, 1.0, &id).unwrap().to_u64().unwrap();
        prop_assert!(half <= 4 * full + 3);
    }

    #[test]
    fn quadratic_growth_with_linear_theta(eps in 0.01..1.99f64, s in 1u64..10) {
        let b = cat0_bound(eps, 1.0, &ThetaFn::Linear(s)).unwrap().to_u64().unwrap() as f64;
        prop_assert!(b <= s as f64 * (32.0 / (eps * eps) + 1.0));
    }

    #[test]
    fn tilde_bound_never_exceeds_plain(eps in 0.01..1.99f64, b in 1.0..5.0f64) {
        let lin = ThetaFn::Linear(4);
        let plain = groetsch_bound(eps, b, &lin, &eta_cat0()).unwrap();
        let tilde = groetsch_bound_tilde(eps, b, &lin, &eta_cat0()).unwrap();
        prop_assert!(tilde.value <= plain.value);
    }

    #[test]
    fn constant_step_bound_equals_closed_form_theta(eps in 0.05..1.9f64, d in 1.0..4.0f64, l in 0.05..0.95f64) {
        let direct = cat0_constant_bound(eps, d, l).unwrap();
        let via_theta = cat0_bound(eps, d, &ThetaFn::ConstantLambda(l)).unwrap();
        prop_assert_eq!(direct.value, via_theta.value);
    }

    #[test]
    fn exponential_bound_log_matches_value(eps in 0.05..3.0f64, d in 0.2..2.0f64, k in 2u64..4) {
        let b = ishikawa_bound(eps, d, k).unwrap();
        let v = b.value.clone().unwrap();
        let digits = v.to_string();
        // The ceiling moves small values; the estimate is promised for large ones.
        prop_assume!(digits.len() > 6);
        let lead: f64 = digits[..digits.len().min(15)].parse().unwrap();
        let log = lead.log10() + (digits.len() - digits.len().min(15)) as f64;
        prop_assert!((log - ishikawa_log10(eps, d, k).unwrap()).abs() <= 1e-3);
    }

    #[test]
    fn envelope_is_monotone_for_a_decreasing_ramp(r1 in 0.01..50.0f64, r2 in 0.01..50.0f64, eps in 0.1..2.0f64) {
        let m = FnModulus { name: "ramp", f: |r: f64, e: f64| e * e / (8.0 * (1.0 + r)), monotone_in_r: true };
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        prop_assert!(eta_monotone(&m, hi, eps).unwrap() <= eta_monotone(&m, lo, eps).unwrap());
        prop_assert_eq!(Monotonized(m).eval(hi, eps).unwrap(), m.eval(hi, eps).unwrap());
    }

    #[test]
    fn envelope_lies_below_the_modulus(r in 0.01..50.0f64, eps in 0.1..2.0f64) {
        let bumpy = FnModulus { name: "bumpy", f: |r: f64, e: f64| e * e / 8.0 * (0.6 + 0.4 * (3.0 * r).sin().abs()), monotone_in_r: false };
        let env = eta_monotone(&bumpy, r, eps).unwrap();
        prop_assert!(env <= bumpy.eval(r, eps).unwrap());
        prop_assert!(env >= 0.6 * eps * eps / 8.0 - 1e-12);
    }
}
