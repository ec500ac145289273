//! Acceptance suite: one test per shipped guarantee, each ending in a
//! single `criterion N (<name>): PASS` line (visible with `--nocapture`).
//!
//! 1. Adversarial closed forms: exact engine cost and schedule on
//!    sigma_l, with the offline optimum under its ceiling.
//! 2. Competitive bounds: the general and refined inequalities hold
//!    exactly on a 200-instance seeded sweep.
//! 3. Duality chain: exact D' <= P' <= OPT on 100 seeded instances.
//! 4. Structural audits: dual feasibility, potential identity, spanning
//!    forest, cost accounting, and relaxation feasibility on the sweep.
//! 5. Metric layer: exhaustive axioms, sandwich bounds on random tuples,
//!    group-level sandwich bounds, and corrupted-metric witnesses.
//! 6. Oracle cross-checks: circuit distances against a fresh permutation
//!    enumerator; the offline optimum against its reference enumerator.
//! 7. Determinism: the bench CSV is byte-identical across two runs.

use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use kmpmd_core::gdk::{
    audit_cost_accounting, audit_dual_feasibility, audit_potential_identity,
    audit_spanning_forest, run, GdkConfig, TraceLevel,
};
use kmpmd_core::instances::{
    gen_adversarial_line, gen_random, Instance, RandomKind, RandomParams,
};
use kmpmd_core::lp::{build_p_prime, simplex_solve_with, LpGuards};
use kmpmd_core::metrics::{
    BasePairMetric, MetricGuards, MetricSpace, SpaceBase, SpaceKind, VerifyMode,
};
use kmpmd_core::numerics::{int, parse_rational, rat, Rational};
use kmpmd_core::offline::{
    brute_force_opt, brute_force_opt_reference, check_p_prime_feasibility,
    verify_optcost_sandwich, OfflineGuards,
};

fn summary_config() -> GdkConfig {
    GdkConfig {
        trace_level: TraceLevel::Summary,
        ..GdkConfig::default()
    }
}

/// The shared 200-instance seeded sweep: all three space kinds, k in
/// {2,3,4}, m <= 20, cycling twelve configurations with distinct seeds.
fn sweep() -> Vec<Instance> {
    let configs: &[(RandomKind, SpaceKind, usize, usize)] = &[
        (RandomKind::LineUniform, SpaceKind::LineDiameter, 2, 8),
        (RandomKind::LineUniform, SpaceKind::LineDiameter, 2, 20),
        (RandomKind::LineUniform, SpaceKind::LineDiameter, 3, 9),
        (RandomKind::LineUniform, SpaceKind::LineDiameter, 3, 18),
        (RandomKind::LineUniform, SpaceKind::LineDiameter, 4, 8),
        (RandomKind::LineUniform, SpaceKind::LineDiameter, 4, 20),
        (RandomKind::ExplicitRandom, SpaceKind::DmaxOverBase, 2, 8),
        (RandomKind::ExplicitRandom, SpaceKind::DmaxOverBase, 3, 9),
        (RandomKind::ExplicitRandom, SpaceKind::DmaxOverBase, 4, 12),
        (RandomKind::ExplicitRandom, SpaceKind::DhcOverBase, 2, 8),
        (RandomKind::ExplicitRandom, SpaceKind::DhcOverBase, 3, 9),
        (RandomKind::ExplicitRandom, SpaceKind::DhcOverBase, 4, 12),
    ];
    (0..200u64)
        .map(|i| {
            let (kind, hmetric, k, m) = configs[(i as usize) % configs.len()];
            let params = RandomParams {
                hmetric,
                ..RandomParams::default()
            };
            gen_random(kind, k, m, i, &params).expect("sweep instance generates")
        })
        .collect()
}

#[test]
fn criterion_1_adversarial_closed_forms() {
    for (k, s, epsilon_text) in [(2, 1, "1/100"), (3, 1, "1/9"), (2, 3, "1/12"), (4, 1, "1/16")]
    {
        let start = Instant::now();
        let epsilon = parse_rational(epsilon_text).unwrap();
        let instance = gen_adversarial_line(k, s, epsilon.clone()).unwrap();
        let m = instance.m();
        assert_eq!(m, s * k * k);

        let result = run(&instance, summary_config()).unwrap();
        let alg = rat((2 * m * (k - 1)) as i64, k as i64)
            + int(k as i64)
            + int((m - k) as i64) * &epsilon;
        assert_eq!(result.total_cost, alg, "k={k} s={s} eps={epsilon_text}");

        // Group i (0-indexed) is carved at time 1 + 2*i*epsilon.
        assert_eq!(result.groups.len(), m / k);
        for (i, group) in result.groups.iter().enumerate() {
            let expected = int(1) + int(2 * i as i64) * &epsilon;
            assert_eq!(group.time, expected, "group {i} of k={k} s={s}");
            assert_eq!(group.ids.len(), k);
        }

        let opt = brute_force_opt(&instance, &OfflineGuards::default()).unwrap();
        let ceiling = int(k as i64)
            + int(k as i64) * &epsilon
            + int((k * k * k) as i64) * &epsilon
            + int((m * k) as i64) * &epsilon;
        assert!(
            opt.value <= ceiling,
            "OPT {} above ceiling {} for k={k} s={s}",
            opt.value,
            ceiling
        );
        assert!(result.total_cost > opt.value, "the family must hurt GD-k");

        let elapsed = start.elapsed();
        assert!(
            elapsed < Duration::from_secs(1),
            "k={k} s={s} took {elapsed:?}"
        );
    }
    println!("criterion 1 (adversarial closed forms): PASS");
}

#[test]
fn criterion_2_competitive_bounds_on_sweep() {
    let start = Instant::now();
    let instances = sweep();
    assert_eq!(instances.len(), 200);
    for instance in &instances {
        let result = run(instance, summary_config()).unwrap();
        let m = instance.m();
        let k = instance.k();

        let general = int((4 * m * k + k * k) as i64)
            * instance.space().gamma()
            * &result.dual_objective;
        assert!(
            result.total_cost <= general,
            "general bound fails: {} > {}",
            result.total_cost,
            general
        );
        if matches!(
            instance.space().kind(),
            SpaceKind::LineDiameter | SpaceKind::DmaxOverBase
        ) {
            let refined = int((4 * m + k * k) as i64) * &result.dual_objective;
            assert!(
                result.total_cost <= refined,
                "refined bound fails: {} > {}",
                result.total_cost,
                refined
            );
        }

        let report = audit_cost_accounting(&result, instance).unwrap();
        assert!(report.passed, "{:?}", report.violations);
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(30), "sweep took {elapsed:?}");
    println!("criterion 2 (competitive bound audits): PASS");
}

/// 100-instance suite for the duality chain, biased toward small m so the
/// exact simplex stays well inside its budget; every m is at most 10.
fn duality_suite() -> Vec<Instance> {
    let plan: &[(usize, usize, usize)] = &[
        (2, 4, 30),
        (2, 6, 30),
        (2, 8, 16),
        (2, 10, 4),
        (3, 6, 15),
        (3, 9, 5),
    ];
    let mut out = Vec::new();
    let mut seed = 1000u64;
    for &(k, m, count) in plan {
        for i in 0..count {
            seed += 1;
            let (kind, hmetric) = match i % 3 {
                0 => (RandomKind::LineUniform, SpaceKind::LineDiameter),
                1 => (RandomKind::ExplicitRandom, SpaceKind::DmaxOverBase),
                _ => (RandomKind::ExplicitRandom, SpaceKind::DhcOverBase),
            };
            let params = RandomParams {
                hmetric,
                ..RandomParams::default()
            };
            out.push(gen_random(kind, k, m, seed, &params).unwrap());
        }
    }
    out
}

#[test]
fn criterion_3_duality_chain() {
    let start = Instant::now();
    let instances = duality_suite();
    assert_eq!(instances.len(), 100);
    let lp_guards = LpGuards::default();
    let offline_guards = OfflineGuards::default();
    for instance in &instances {
        let result = run(instance, summary_config()).unwrap();
        let model = build_p_prime(instance, &lp_guards).unwrap();
        let solution = simplex_solve_with(&model, &lp_guards).unwrap();
        let p_prime = solution.value.expect("built relaxations are solvable");
        let opt = brute_force_opt(instance, &offline_guards).unwrap();
        assert!(
            result.dual_objective <= p_prime,
            "D' {} > P' {}",
            result.dual_objective,
            p_prime
        );
        assert!(p_prime <= opt.value, "P' {} > OPT {}", p_prime, opt.value);
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(300), "chain took {elapsed:?}");
    println!("criterion 3 (duality chain): PASS");
}

#[test]
fn criterion_4_structural_audits_on_sweep() {
    let offline_guards = OfflineGuards::default();
    for instance in sweep() {
        // Full trace: the per-event audits replay every snapshot.
        let result = run(&instance, GdkConfig::default()).unwrap();

        let dual = audit_dual_feasibility(&result, &instance).unwrap();
        assert!(dual.passed, "{:?}", dual.violations);
        let potential = audit_potential_identity(&result, &instance).unwrap();
        assert!(potential.passed, "{:?}", potential.violations);
        let forest = audit_spanning_forest(&result).unwrap();
        assert!(forest.passed, "{:?}", forest.violations);
        // Includes the waiting-cost identity and both bound checks.
        let accounting = audit_cost_accounting(&result, &instance).unwrap();
        assert!(accounting.passed, "{:?}", accounting.violations);

        if instance.m() <= 16 {
            let partition: Vec<Vec<u32>> =
                result.groups.iter().map(|g| g.ids.clone()).collect();
            let feasibility =
                check_p_prime_feasibility(&instance, &partition, &offline_guards).unwrap();
            assert!(feasibility.passed, "{:?}", feasibility.violations);
        }
    }
    println!("criterion 4 (structural audits): PASS");
}

#[test]
fn criterion_5_metric_layer() {
    let guards = MetricGuards::default();

    // A four-point base shared by the explicit kinds: a valid metric with
    // uneven spread (path-like but not degenerate).
    let base = || {
        BasePairMetric::new(vec![
            vec![int(0), int(3), int(5), int(9)],
            vec![int(3), int(0), int(4), int(7)],
            vec![int(5), int(4), int(0), int(6)],
            vec![int(9), int(7), int(6), int(0)],
        ])
        .unwrap()
    };
    let mut spaces = Vec::new();
    for k in 2..=4usize {
        let coords = vec![int(0), int(3), int(7), int(12)];
        spaces.push(
            MetricSpace::new(SpaceBase::Line { coords }, k, int(1), &guards).unwrap(),
        );
        spaces.push(MetricSpace::new(SpaceBase::Dmax(base()), k, int(1), &guards).unwrap());
        spaces.push(MetricSpace::new(SpaceBase::Dhc(base()), k, int(1), &guards).unwrap());
    }
    for space in &spaces {
        let report = space.verify_h_axioms(VerifyMode::Exhaustive, &guards).unwrap();
        assert!(
            report.passed(),
            "axioms fail on {:?} k={}: {:?}",
            space.kind(),
            space.k(),
            report
        );

        // Sandwich bounds on 1000 seeded random tuples per space.
        let mut rng = ChaCha8Rng::seed_from_u64(space.k() as u64);
        for _ in 0..1000 {
            let tuple: Vec<usize> =
                (0..space.k()).map(|_| rng.gen_range(0..space.len())).collect();
            let anchor = tuple[rng.gen_range(0..tuple.len())];
            let sandwich = space.verify_sandwich(&tuple, anchor).unwrap();
            assert!(sandwich.holds, "sandwich fails on {tuple:?} anchor {anchor}");
        }
    }

    // Group-level sandwich on every group the engine carves in the sweep.
    for instance in sweep() {
        let result = run(&instance, summary_config()).unwrap();
        for group in &result.groups {
            let report = verify_optcost_sandwich(&instance, &group.ids);
            assert!(report.holds, "group {:?}: {report:?}", group.ids);
        }
    }

    // A corrupted base (triangle inequality broken through point 2) must
    // yield a generalized-triangle witness under both explicit kinds.
    let corrupt = || {
        BasePairMetric::new_unchecked(vec![
            vec![int(0), int(10), int(1)],
            vec![int(10), int(0), int(1)],
            vec![int(1), int(1), int(0)],
        ])
    };
    for space in [
        MetricSpace::new(SpaceBase::Dmax(corrupt()), 3, int(1), &guards).unwrap(),
        MetricSpace::new(SpaceBase::Dhc(corrupt()), 3, int(1), &guards).unwrap(),
    ] {
        let report = space.verify_h_axioms(VerifyMode::Exhaustive, &guards).unwrap();
        assert!(!report.delta_h.passed, "corruption undetected: {report:?}");
        assert!(report.delta_h.counterexample.is_some());
    }
    println!("criterion 5 (metric layer): PASS");
}

/// All orderings of `0..k`, by straightforward insertion recursion; the
/// production circuit search instead fixes the first slot and skips
/// reversed necklaces, so agreement is meaningful.
fn all_orders(k: usize) -> Vec<Vec<usize>> {
    let mut orders = vec![vec![0usize]];
    for next in 1..k {
        let mut grown = Vec::new();
        for order in &orders {
            for slot in 0..=order.len() {
                let mut extended = order.clone();
                extended.insert(slot, next);
                grown.push(extended);
            }
        }
        orders = grown;
    }
    orders
}

fn min_circuit_over_all_orders(space: &MetricSpace, tuple: &[usize]) -> Rational {
    let k = tuple.len();
    all_orders(k)
        .iter()
        .map(|order| {
            let mut total = int(0);
            for i in 0..k {
                total = total + space.base_dist(tuple[order[i]], tuple[order[(i + 1) % k]]);
            }
            total
        })
        .min()
        .unwrap()
}

#[test]
fn criterion_6_oracle_cross_checks() {
    // Circuit distance vs. the fresh enumerator on 5-point spaces,
    // exhaustively for k <= 4 and strided above.
    for k in 2..=6usize {
        for seed in [3u64, 17] {
            let params = RandomParams {
                points: 5,
                hmetric: SpaceKind::DhcOverBase,
                ..RandomParams::default()
            };
            let instance = gen_random(RandomKind::ExplicitRandom, k, k, seed, &params).unwrap();
            let space = instance.space();
            let n = space.len();
            let tuples = n.pow(k as u32);
            let stride = match k {
                5 => 3,
                6 => 11,
                _ => 1,
            };
            let mut checked = 0u64;
            for code in (0..tuples).step_by(stride) {
                let mut rest = code;
                let tuple: Vec<usize> = (0..k)
                    .map(|_| {
                        let point = rest % n;
                        rest /= n;
                        point
                    })
                    .collect();
                assert_eq!(
                    space.k_distance(&tuple).unwrap(),
                    min_circuit_over_all_orders(space, &tuple),
                    "k={k} seed={seed} tuple={tuple:?}"
                );
                checked += 1;
            }
            if stride == 1 {
                assert_eq!(checked as usize, tuples, "k={k} must be exhaustive");
            } else {
                assert!(checked > 1000, "k={k}: only {checked} tuples checked");
            }
        }
    }

    // Offline optimum vs. the reference enumerator on every sweep
    // instance small enough for the reference.
    let guards = OfflineGuards::default();
    let mut compared = 0;
    for instance in sweep().into_iter().filter(|i| i.m() <= 8) {
        let dp = brute_force_opt(&instance, &guards).unwrap();
        let reference = brute_force_opt_reference(&instance, 8).unwrap();
        assert_eq!(dp.value, reference.value);
        assert_eq!(dp.groups, reference.groups);
        compared += 1;
    }
    assert!(compared >= 60, "only {compared} offline comparisons");
    println!("criterion 6 (oracle cross-checks): PASS");
}

#[test]
fn criterion_7_bench_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.csv");
    let second = dir.path().join("second.csv");
    for path in [&first, &second] {
        let out = std::process::Command::new(env!("CARGO_BIN_EXE_kmpmd"))
            .args(["bench", "--out", path.to_str().unwrap()])
            .output()
            .expect("binary runs");
        assert_eq!(out.status.code(), Some(0), "bench failed: {out:?}");
    }
    let first = std::fs::read(&first).unwrap();
    let second = std::fs::read(&second).unwrap();
    assert_eq!(first, second, "bench CSV differs between runs");

    let text = String::from_utf8(first).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 51, "header plus fifty rows");
    assert_eq!(
        lines[0],
        "name,m,k,gamma,alg,dist,wait,dual,pprime,opt,ratio,bounds_ok"
    );
    for row in &lines[1..] {
        assert!(row.ends_with(",true"), "bound violated in row: {row}");
    }
    println!("criterion 7 (bench determinism): PASS");
}
