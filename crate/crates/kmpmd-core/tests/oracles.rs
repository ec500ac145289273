//! Cross-checks of the hand-rolled combinatorial kernels against
//! independent brute-force oracles that share no code with them.

use kmpmd_core::gdk::{
    audit_cost_accounting, audit_dual_feasibility, audit_potential_identity,
    audit_spanning_forest, run, GdkConfig,
};
use kmpmd_core::instances::{gen_random, RandomKind, RandomParams};
use kmpmd_core::lp::{build_p_prime, simplex_solve, simplex_solve_dual_form, LpGuards};
use kmpmd_core::metrics::{MetricSpace, SpaceKind};
use kmpmd_core::numerics::{int, Rational};
use kmpmd_core::offline::{
    brute_force_opt, brute_force_opt_reference, check_p_prime_feasibility,
    verify_optcost_sandwich, OfflineGuards,
};

/// Minimum Hamiltonian circuit cost by sweeping all k! visiting orders
/// (Heap's algorithm). Deliberately redundant: the production code fixes
/// the first slot and halves by reversal symmetry; this one does neither.
fn min_circuit_by_permutations(space: &MetricSpace, tuple: &[usize]) -> Rational {
    let k = tuple.len();
    let circuit = |order: &[usize]| -> Rational {
        let mut cost = int(0);
        for i in 0..k {
            cost += space.base_dist(order[i], order[(i + 1) % k]);
        }
        cost
    };
    let mut order: Vec<usize> = tuple.to_vec();
    let mut best = circuit(&order);
    let mut c = vec![0usize; k];
    let mut i = 0;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                order.swap(0, i);
            } else {
                order.swap(c[i], i);
            }
            let cost = circuit(&order);
            if cost < best {
                best = cost;
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best
}

/// A 5-point shortest-path-closed random base wrapped in a d_HC space
/// with arity k. Positions are ignored; only the space matters here.
fn dhc_space(k: usize, seed: u64) -> MetricSpace {
    let params = RandomParams {
        points: 5,
        hmetric: SpaceKind::DhcOverBase,
        ..RandomParams::default()
    };
    gen_random(RandomKind::ExplicitRandom, k, k, seed, &params)
        .unwrap()
        .space()
        .clone()
}

#[test]
fn dhc_matches_full_permutation_enumeration() {
    for k in 2..=5usize {
        for seed in [11u64, 29] {
            let space = dhc_space(k, seed);
            let n = space.len();
            // Exhaustive odometer over all n^k tuples, repeats included.
            let mut tuple = vec![0usize; k];
            loop {
                let fast = space.k_distance(&tuple).unwrap();
                let slow = min_circuit_by_permutations(&space, &tuple);
                assert_eq!(fast, slow, "k = {k}, seed = {seed}, tuple {tuple:?}");
                let mut slot = k;
                loop {
                    if slot == 0 {
                        break;
                    }
                    slot -= 1;
                    tuple[slot] += 1;
                    if tuple[slot] < n {
                        break;
                    }
                    tuple[slot] = 0;
                }
                if tuple.iter().all(|&p| p == 0) {
                    break;
                }
            }
        }
    }
}

#[test]
fn dhc_matches_permutations_at_k_six_strided() {
    let k = 6usize;
    let space = dhc_space(k, 47);
    let n = space.len();
    let total = n.pow(k as u32);
    let mut checked = 0u32;
    // Every 7th tuple of the odometer: deterministic variety with repeats.
    for index in (0..total).step_by(7) {
        let mut tuple = vec![0usize; k];
        let mut rest = index;
        for slot in (0..k).rev() {
            tuple[slot] = rest % n;
            rest /= n;
        }
        let fast = space.k_distance(&tuple).unwrap();
        let slow = min_circuit_by_permutations(&space, &tuple);
        assert_eq!(fast, slow, "tuple {tuple:?}");
        checked += 1;
    }
    assert_eq!(checked, 2233);
}

/// One deterministic mixed sweep shared by the pipeline assertions below:
/// line and explicit spaces, k in {2, 3}, m <= 8.
fn sweep() -> Vec<kmpmd_core::instances::Instance> {
    let mut out = Vec::new();
    let line = RandomParams {
        span: 30,
        horizon: 8,
        ..RandomParams::default()
    };
    for seed in 0..6u64 {
        out.push(gen_random(RandomKind::LineUniform, 2, 8, seed, &line).unwrap());
        out.push(gen_random(RandomKind::LineUniform, 3, 6, seed, &line).unwrap());
    }
    for kind in [SpaceKind::DmaxOverBase, SpaceKind::DhcOverBase] {
        let params = RandomParams {
            points: 5,
            span: 20,
            horizon: 8,
            hmetric: kind,
            ..RandomParams::default()
        };
        for seed in 0..4u64 {
            out.push(gen_random(RandomKind::ExplicitRandom, 2, 6, seed, &params).unwrap());
            out.push(gen_random(RandomKind::ExplicitRandom, 3, 6, seed, &params).unwrap());
        }
    }
    out
}

#[test]
fn offline_dp_matches_reference_enumerator_on_sweep() {
    let guards = OfflineGuards::default();
    for inst in sweep() {
        let dp = brute_force_opt(&inst, &guards).unwrap();
        let reference = brute_force_opt_reference(&inst, 8).unwrap();
        assert_eq!(dp.value, reference.value);
        assert_eq!(dp.groups, reference.groups);
    }
}

#[test]
fn primal_and_dual_simplex_agree_on_sweep() {
    let guards = LpGuards::default();
    for inst in sweep() {
        let model = build_p_prime(&inst, &guards).unwrap();
        let primal = simplex_solve(&model).unwrap();
        assert_eq!(primal.phase1_value, int(0));
        let dual = simplex_solve_dual_form(&model, &guards).unwrap();
        assert_eq!(primal.value.unwrap(), dual);
    }
}

#[test]
fn full_pipeline_invariants_hold_on_sweep() {
    let offline_guards = OfflineGuards::default();
    let lp_guards = LpGuards::default();
    for inst in sweep() {
        let result = run(&inst, GdkConfig::default()).unwrap();
        for report in [
            audit_dual_feasibility(&result, &inst).unwrap(),
            audit_potential_identity(&result, &inst).unwrap(),
            audit_spanning_forest(&result).unwrap(),
            audit_cost_accounting(&result, &inst).unwrap(),
        ] {
            assert!(report.passed, "{}: {:?}", report.name, report.violations);
        }

        // Exact duality chain D' <= P' <= OPT <= ALG.
        let p_prime = simplex_solve(&build_p_prime(&inst, &lp_guards).unwrap())
            .unwrap()
            .value
            .unwrap();
        let opt = brute_force_opt(&inst, &offline_guards).unwrap();
        assert!(result.dual_objective <= p_prime);
        assert!(p_prime <= opt.value);
        assert!(opt.value <= result.total_cost);

        // Group-level two-sided bound and matching feasibility for (P').
        let partition: Vec<Vec<u32>> =
            result.groups.iter().map(|g| g.ids.clone()).collect();
        for group in &partition {
            let sandwich = verify_optcost_sandwich(&inst, group);
            assert!(sandwich.holds);
        }
        let feasibility =
            check_p_prime_feasibility(&inst, &partition, &offline_guards).unwrap();
        assert!(feasibility.passed, "{:?}", feasibility.violations);

        // The engine partition evaluated offline can never beat OPT.
        let mut engine_offline = int(0);
        for group in &partition {
            engine_offline += kmpmd_core::offline::opt_cost_group(&inst, group);
        }
        assert!(opt.value <= engine_offline);
    }
}
