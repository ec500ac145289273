//! Randomized property checks over the numeric layer and the metric
//! verifiers.

use kmpmd_core::metrics::{MetricGuards, MetricSpace, SpaceBase, SpaceKind, VerifyMode};
use kmpmd_core::numerics::{
    int, parse_rational, rat, rational_arith, render_decimal, render_rational, ArithOp,
    ArithResult,
};
use proptest::prelude::*;

fn arb_rational() -> impl Strategy<Value = kmpmd_core::numerics::Rational> {
    (any::<i32>(), 1..10_000i32).prop_map(|(n, d)| rat(n as i64, d as i64))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn render_parse_round_trip(x in arb_rational()) {
        let text = render_rational(&x);
        prop_assert_eq!(parse_rational(&text).unwrap(), x);
    }

    #[test]
    fn arithmetic_matches_direct_operators(a in arb_rational(), b in arb_rational()) {
        for (op, expect) in [
            (ArithOp::Add, &a + &b),
            (ArithOp::Sub, &a - &b),
            (ArithOp::Mul, &a * &b),
        ] {
            match rational_arith(&a, &b, op).unwrap() {
                ArithResult::Value(v) => prop_assert_eq!(v, expect),
                other => prop_assert!(false, "unexpected {:?}", other),
            }
        }
        if b != int(0) {
            match rational_arith(&a, &b, ArithOp::Div).unwrap() {
                ArithResult::Value(v) => prop_assert_eq!(v, &a / &b),
                other => prop_assert!(false, "unexpected {:?}", other),
            }
        } else {
            prop_assert!(rational_arith(&a, &b, ArithOp::Div).is_err());
        }
    }

    #[test]
    fn decimal_rendering_parses_close(x in arb_rational()) {
        // The 12-digit decimal approximation differs from x by < 10^-12.
        let text = render_decimal(&x, 12);
        let approx = parse_rational(&text).unwrap();
        let err = (&approx - &x) * int(2) * int(1_000_000_000_000);
        prop_assert!(err <= int(1) && err >= int(-1), "{} vs {}", text, x);
    }

    #[test]
    fn line_diameter_equals_dmax_over_distance_base(
        raw in proptest::collection::btree_set(-50..50i64, 2..6),
        picks in proptest::collection::vec(0..6usize, 2..4),
    ) {
        let coords: Vec<_> = raw.iter().map(|&c| int(c)).collect();
        let n = coords.len();
        let k = picks.len().max(2);
        let guards = MetricGuards::default();
        let line = MetricSpace::new(
            SpaceBase::Line { coords: coords.clone() },
            k, int(1), &guards,
        ).unwrap();
        // Base matrix of absolute coordinate gaps; d_max over it must agree
        // with the line diameter on every tuple.
        let matrix: Vec<Vec<_>> = (0..n)
            .map(|i| (0..n).map(|j| {
                let d = &coords[i] - &coords[j];
                if d < int(0) { -d } else { d }
            }).collect())
            .collect();
        let dmax = MetricSpace::new(
            SpaceBase::Dmax(kmpmd_core::metrics::BasePairMetric::new(matrix).unwrap()),
            k, int(1), &guards,
        ).unwrap();
        let tuple: Vec<usize> = picks.iter().map(|&p| p % n).cycle().take(k).collect();
        prop_assert_eq!(
            line.k_distance(&tuple).unwrap(),
            dmax.k_distance(&tuple).unwrap()
        );
    }

    #[test]
    fn sampled_axioms_pass_on_random_line_spaces(
        raw in proptest::collection::btree_set(-40..40i64, 2..7),
        k in 2..5usize,
        seed in any::<u64>(),
    ) {
        let coords: Vec<_> = raw.iter().map(|&c| int(c)).collect();
        let guards = MetricGuards::default();
        let space = MetricSpace::new(SpaceBase::Line { coords }, k, int(1), &guards).unwrap();
        let report = space
            .verify_h_axioms(VerifyMode::Sampled { count: 60, seed }, &guards)
            .unwrap();
        prop_assert!(report.passed());
        prop_assert_eq!(space.kind(), SpaceKind::LineDiameter);
    }
}
