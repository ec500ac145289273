//! Exact offline machinery: group opt-cost, brute-force optimal perfect
//! k-way matching, and the LP-feasibility and sandwich checks that link the
//! offline optimum to the relaxation.
//!
//! The offline problem is NP-hard, so the optimum here is an honest brute
//! force: a bitmask dynamic program over request subsets, exact throughout
//! (group costs are scaled to a common integer denominator, so the DP runs
//! in big integers and loses nothing). A partition-count guard and a table
//! guard bound the work; exceeding either is an error, never a silent
//! approximation.
//!
//! [`brute_force_opt`] returns the lexicographically least optimal witness:
//! groups are listed in canonical form (each ascending, ordered by first
//! member) and the least such list among optima is reconstructed by walking
//! the DP with ascending anchor-completion choices.
//! [`brute_force_opt_reference`] is an intentionally different enumerator
//! (highest-id anchors, plain rational arithmetic, explicit lex comparison)
//! kept as an independent oracle for cross-checks on tiny instances.
//!
//! # Examples
//! ```
//! use kmpmd_core::instances::gen_adversarial_line;
//! use kmpmd_core::numerics::rat;
//! use kmpmd_core::offline::{brute_force_opt, OfflineGuards};
//!
//! let inst = gen_adversarial_line(2, 1, rat(1, 100)).unwrap();
//! let opt = brute_force_opt(&inst, &OfflineGuards::default()).unwrap();
//! assert_eq!(opt.value, rat(101, 50)); // 2 + 2 * epsilon
//! assert_eq!(opt.groups, vec![vec![0, 2], vec![1, 3]]);
//! ```

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::gdk::{opt_cost_edge, AuditReport};
use crate::instances::Instance;
use crate::numerics::{int, Rational};

/// Guard thresholds for the offline brute force.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OfflineGuards {
    /// Maximum admissible partition count `m! / ((k!)^(m/k) (m/k)!)`.
    pub max_partitions: u64,
    /// Maximum `m` for the bitmask DP (the table has `2^m` entries).
    pub dp_max_m: usize,
    /// Maximum `m` for full subset enumeration (`2^m` subsets).
    pub subset_enum_max_m: usize,
}

impl Default for OfflineGuards {
    fn default() -> Self {
        OfflineGuards {
            max_partitions: 10_000_000,
            dp_max_m: 20,
            subset_enum_max_m: 16,
        }
    }
}

/// Errors from offline computations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OfflineError {
    PartitionGuardExceeded { partitions: BigUint, guard: u64 },
    DpGuardExceeded { m: usize, guard: usize },
    SubsetGuardExceeded { m: usize, guard: usize },
    NotAPartition(String),
}

impl fmt::Display for OfflineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OfflineError::PartitionGuardExceeded { partitions, guard } => {
                write!(f, "{partitions} partitions exceed the guard of {guard}")
            }
            OfflineError::DpGuardExceeded { m, guard } => {
                write!(f, "m = {m} exceeds the DP table guard of {guard}")
            }
            OfflineError::SubsetGuardExceeded { m, guard } => {
                write!(f, "m = {m} exceeds the subset enumeration guard of {guard}")
            }
            OfflineError::NotAPartition(msg) => write!(f, "not a partition: {msg}"),
        }
    }
}

/// An optimal offline solution: the minimum total cost and the
/// lexicographically least partition achieving it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OfflineSolution {
    pub value: Rational,
    /// Groups in canonical form: each ascending, ordered by first member.
    pub groups: Vec<Vec<u32>>,
    /// Number of perfect k-way partitions of the instance.
    pub partitions: BigUint,
}

/// Offline cost of matching group `F`: `d_H` over the members' positions
/// plus everyone's wait until the latest arrival in `F`.
///
/// # Examples
/// ```
/// use kmpmd_core::instances::{Instance, Request};
/// use kmpmd_core::metrics::{MetricGuards, MetricSpace, SpaceBase};
/// use kmpmd_core::numerics::int;
/// use kmpmd_core::offline::opt_cost_group;
///
/// let space = MetricSpace::new(
///     SpaceBase::Line { coords: [0, 2, 5].map(int).to_vec() },
///     3, int(1), &MetricGuards::default(),
/// ).unwrap();
/// let inst = Instance::new(space, vec![
///     Request { id: 0, atime: int(0), pos: 0 },
///     Request { id: 1, atime: int(1), pos: 1 },
///     Request { id: 2, atime: int(4), pos: 2 },
/// ]).unwrap();
/// // d_H = 5, waits 4 + 3 + 0.
/// assert_eq!(opt_cost_group(&inst, &[0, 1, 2]), int(12));
/// ```
pub fn opt_cost_group(instance: &Instance, ids: &[u32]) -> Rational {
    let k = instance.k();
    assert_eq!(ids.len(), k, "group must have exactly k requests");
    let mut sorted = ids.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    assert_eq!(sorted.len(), k, "group members must be distinct");
    let positions: Vec<usize> = ids.iter().map(|&u| instance.request(u).pos).collect();
    let dist = instance
        .space()
        .k_distance(&positions)
        .expect("validated instance positions");
    let latest = ids
        .iter()
        .map(|&u| &instance.request(u).atime)
        .max()
        .expect("nonempty group")
        .clone();
    let mut wait = Rational::zero();
    for &u in ids {
        wait += &latest - &instance.request(u).atime;
    }
    dist + wait
}

/// Number of perfect k-way partitions of `m` requests:
/// `m! / ((k!)^(m/k) * (m/k)!)`.
pub fn partition_count(m: usize, k: usize) -> BigUint {
    assert!(k >= 1 && m % k == 0, "m must be a multiple of k");
    let factorial = |n: usize| -> BigUint {
        let mut acc = BigUint::one();
        for i in 2..=n {
            acc *= BigUint::from(i);
        }
        acc
    };
    let groups = m / k;
    let mut denom = factorial(k).pow(groups as u32);
    denom *= factorial(groups);
    factorial(m) / denom
}

/// Exact offline optimum by bitmask dynamic programming.
///
/// `dp[S]` is the cheapest perfect grouping of subset `S`; each step groups
/// the lowest-id member of `S` with every `(k-1)`-subset of the rest. Group
/// costs are scaled by the least common denominator so the DP runs in exact
/// big integers. The witness walk re-traverses the DP choosing completions
/// in ascending lexicographic order, which yields the lexicographically
/// least optimal partition.
pub fn brute_force_opt(
    instance: &Instance,
    guards: &OfflineGuards,
) -> Result<OfflineSolution, OfflineError> {
    let m = instance.m();
    let k = instance.k();
    let partitions = partition_count(m, k);
    if partitions > BigUint::from(guards.max_partitions) {
        return Err(OfflineError::PartitionGuardExceeded {
            partitions,
            guard: guards.max_partitions,
        });
    }
    if m > guards.dp_max_m {
        return Err(OfflineError::DpGuardExceeded {
            m,
            guard: guards.dp_max_m,
        });
    }
    if m == 0 {
        return Ok(OfflineSolution {
            value: Rational::zero(),
            groups: Vec::new(),
            partitions,
        });
    }

    // Cost table over all k-subsets, scaled to a common denominator.
    let mut rational_costs: BTreeMap<u32, Rational> = BTreeMap::new();
    let ids: Vec<u32> = (0..m as u32).collect();
    for_each_combination(&ids, k, &mut |group| {
        let mask = group.iter().fold(0u32, |acc, &u| acc | (1 << u));
        rational_costs.insert(mask, opt_cost_group(instance, group));
    });
    let mut denom = BigInt::one();
    for cost in rational_costs.values() {
        denom = denom.lcm(cost.denom());
    }
    let scaled: BTreeMap<u32, BigInt> = rational_costs
        .iter()
        .map(|(&mask, cost)| (mask, cost.numer() * (&denom / cost.denom())))
        .collect();

    let full: u32 = if m == 32 { u32::MAX } else { (1 << m) - 1 };
    let mut dp: Vec<Option<BigInt>> = alloc::vec![None; (full as usize) + 1];
    dp[0] = Some(BigInt::zero());
    for mask in 1..=full {
        if (mask.count_ones() as usize) % k != 0 {
            continue;
        }
        let anchor = mask.trailing_zeros();
        let rest: Vec<u32> = members_of(mask & !(1 << anchor));
        let mut best: Option<BigInt> = None;
        for_each_combination(&rest, k - 1, &mut |completion| {
            let group_mask = completion
                .iter()
                .fold(1u32 << anchor, |acc, &u| acc | (1 << u));
            let remainder = dp[(mask ^ group_mask) as usize]
                .as_ref()
                .expect("remainder has grouped popcount");
            let candidate = &scaled[&group_mask] + remainder;
            if best.as_ref().is_none_or(|b| candidate < *b) {
                best = Some(candidate);
            }
        });
        dp[mask as usize] = best;
    }
    let optimum = dp[full as usize].clone().expect("m is a multiple of k");

    // Witness walk: at each step take the lexicographically least
    // completion of the lowest remaining id that stays on an optimal path.
    let mut groups = Vec::with_capacity(m / k);
    let mut mask = full;
    while mask != 0 {
        let anchor = mask.trailing_zeros();
        let rest: Vec<u32> = members_of(mask & !(1 << anchor));
        let target = dp[mask as usize].as_ref().expect("on optimal path");
        let mut chosen: Option<u32> = None;
        for_each_combination(&rest, k - 1, &mut |completion| {
            if chosen.is_some() {
                return;
            }
            let group_mask = completion
                .iter()
                .fold(1u32 << anchor, |acc, &u| acc | (1 << u));
            if let Some(remainder) = dp[(mask ^ group_mask) as usize].as_ref() {
                if &scaled[&group_mask] + remainder == *target {
                    chosen = Some(group_mask);
                }
            }
        });
        let group_mask = chosen.expect("some completion is optimal");
        groups.push(members_of(group_mask));
        mask ^= group_mask;
    }

    Ok(OfflineSolution {
        value: Rational::new(optimum, denom),
        groups,
        partitions,
    })
}

/// Independent second enumerator for cross-checks on tiny instances:
/// anchors the *highest* remaining id, carries plain rational costs, and
/// keeps the lexicographically least optimum by explicit comparison of
/// canonicalized partitions. Intended for `m <= 8`; refuses larger inputs.
pub fn brute_force_opt_reference(
    instance: &Instance,
    max_m: usize,
) -> Result<OfflineSolution, OfflineError> {
    let m = instance.m();
    let k = instance.k();
    if m > max_m {
        return Err(OfflineError::SubsetGuardExceeded { m, guard: max_m });
    }
    let mut best: Option<(Rational, Vec<Vec<u32>>)> = None;
    let mut current: Vec<Vec<u32>> = Vec::new();
    let mut remaining: Vec<u32> = (0..m as u32).collect();
    recurse_reference(
        instance,
        k,
        &mut remaining,
        &mut current,
        &Rational::zero(),
        &mut best,
    );
    let (value, mut groups) = best.unwrap_or((Rational::zero(), Vec::new()));
    canonicalize(&mut groups);
    Ok(OfflineSolution {
        value,
        groups,
        partitions: partition_count(m, k),
    })
}

fn recurse_reference(
    instance: &Instance,
    k: usize,
    remaining: &mut Vec<u32>,
    current: &mut Vec<Vec<u32>>,
    acc: &Rational,
    best: &mut Option<(Rational, Vec<Vec<u32>>)>,
) {
    if remaining.is_empty() {
        let mut candidate = current.clone();
        canonicalize(&mut candidate);
        let replace = match best {
            None => true,
            Some((v, w)) => *acc < *v || (*acc == *v && candidate < *w),
        };
        if replace {
            *best = Some((acc.clone(), candidate));
        }
        return;
    }
    // Anchor the highest remaining id (the mirror of the DP's choice).
    let anchor = *remaining.last().expect("nonempty");
    let pool: Vec<u32> = remaining[..remaining.len() - 1].to_vec();
    for_each_combination(&pool, k - 1, &mut |completion| {
        let mut group = completion.to_vec();
        group.push(anchor);
        let cost = opt_cost_group(instance, &group);
        let next = acc + &cost;
        // No pruning: the reference oracle stays exhaustive on purpose.
        let mut rest: Vec<u32> = remaining
            .iter()
            .copied()
            .filter(|u| !group.contains(u))
            .collect();
        current.push(group);
        recurse_reference(instance, k, &mut rest, current, &next, best);
        current.pop();
    });
}

fn canonicalize(groups: &mut Vec<Vec<u32>>) {
    for g in groups.iter_mut() {
        g.sort_unstable();
    }
    groups.sort();
}

/// Checks that the characteristic edge vector of a partition satisfies the
/// relaxation's surplus constraints `sum over delta(S) of x_e >=
/// sur(S)(k - sur(S))` for every request subset `0 < |S| < m`.
pub fn check_p_prime_feasibility(
    instance: &Instance,
    partition: &[Vec<u32>],
    guards: &OfflineGuards,
) -> Result<AuditReport, OfflineError> {
    let m = instance.m();
    let k = instance.k();
    if m > guards.subset_enum_max_m {
        return Err(OfflineError::SubsetGuardExceeded {
            m,
            guard: guards.subset_enum_max_m,
        });
    }
    validate_partition(instance, partition)?;
    let mut report = AuditReport::new("p_prime_feasibility");
    let group_masks: Vec<u32> = partition
        .iter()
        .map(|g| g.iter().fold(0u32, |acc, &u| acc | (1 << u)))
        .collect();
    if m == 0 {
        return Ok(report);
    }
    let full: u32 = (1u32 << m) - 1;
    for s in 1..full {
        let sur = (s.count_ones() as usize) % k;
        let required = sur * (k - sur);
        // Crossing edges of the partition: within each group, pairs with
        // exactly one endpoint in S number |F cap S| * |F minus S|.
        let crossing: usize = group_masks
            .iter()
            .map(|&g| {
                let inside = (g & s).count_ones() as usize;
                inside * (k - inside)
            })
            .sum();
        report.checks += 1;
        if crossing < required {
            report.violate(format!(
                "subset {s:#b}: crossing edges {crossing} below surplus bound {required}"
            ));
        }
    }
    Ok(report)
}

fn validate_partition(instance: &Instance, partition: &[Vec<u32>]) -> Result<(), OfflineError> {
    let m = instance.m();
    let k = instance.k();
    let mut seen = alloc::vec![false; m];
    for group in partition {
        if group.len() != k {
            return Err(OfflineError::NotAPartition(format!(
                "block {group:?} has {} members, expected {k}",
                group.len()
            )));
        }
        for &u in group {
            if (u as usize) >= m {
                return Err(OfflineError::NotAPartition(format!(
                    "unknown request id {u}"
                )));
            }
            if seen[u as usize] {
                return Err(OfflineError::NotAPartition(format!(
                    "request {u} appears twice"
                )));
            }
            seen[u as usize] = true;
        }
    }
    if !seen.iter().all(|&s| s) {
        return Err(OfflineError::NotAPartition(String::from(
            "not all requests are covered",
        )));
    }
    Ok(())
}

/// Report of [`verify_optcost_sandwich`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptcostSandwichReport {
    pub lower: Rational,
    pub value: Rational,
    pub upper: Rational,
    /// The latest-arrival anchor used by the upper bound (ties by id).
    pub anchor: u32,
    pub holds: bool,
}

/// Checks the two-sided bound relating a group's opt-cost to its pairwise
/// edge costs:
///
/// `(1/(gamma k^2)) * sum_{i<j} opt_cost_edge(v_i, v_j)
///  <= opt_cost_group(F) <= sum_i opt_cost_edge(v, v_i)`
///
/// where `v` is the group's latest arrival (smallest id among ties).
pub fn verify_optcost_sandwich(instance: &Instance, ids: &[u32]) -> OptcostSandwichReport {
    let k = instance.k();
    assert_eq!(ids.len(), k, "group must have exactly k requests");
    let value = opt_cost_group(instance, ids);
    let mut pair_sum = Rational::zero();
    for i in 0..ids.len() {
        for j in (i + 1)..ids.len() {
            pair_sum += opt_cost_edge(instance, ids[i], ids[j]);
        }
    }
    let gamma = instance.space().gamma();
    let lower = pair_sum / (gamma * int((k * k) as i64));
    let anchor = ids
        .iter()
        .copied()
        .max_by(|&a, &b| {
            let ta = &instance.request(a).atime;
            let tb = &instance.request(b).atime;
            // Latest arrival wins; among ties the smallest id wins.
            ta.cmp(tb).then(b.cmp(&a))
        })
        .expect("nonempty group");
    let mut upper = Rational::zero();
    for &u in ids {
        if u != anchor {
            upper += opt_cost_edge(instance, anchor, u);
        }
    }
    let holds = lower <= value && value <= upper;
    OptcostSandwichReport {
        lower,
        value,
        upper,
        anchor,
        holds,
    }
}

fn members_of(mask: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut rest = mask;
    while rest != 0 {
        let bit = rest.trailing_zeros();
        out.push(bit);
        rest &= !(1 << bit);
    }
    out
}

/// Calls `f` for every size-`k` combination of `items`, in lexicographic
/// order of the chosen subsequence.
fn for_each_combination(items: &[u32], k: usize, f: &mut impl FnMut(&[u32])) {
    fn go(items: &[u32], k: usize, start: usize, chosen: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
        if chosen.len() == k {
            f(chosen);
            return;
        }
        let needed = k - chosen.len();
        for i in start..=items.len().saturating_sub(needed) {
            chosen.push(items[i]);
            go(items, k, i + 1, chosen, f);
            chosen.pop();
        }
    }
    if k > items.len() {
        return;
    }
    let mut chosen = Vec::with_capacity(k);
    go(items, k, 0, &mut chosen, f);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gdk::{run, GdkConfig};
    use crate::instances::{gen_adversarial_line, gen_random, Instance, RandomKind, RandomParams, Request};
    use crate::metrics::{MetricGuards, MetricSpace, SpaceBase};
    use crate::numerics::rat;
    use alloc::vec;

    fn worked_line_instance() -> Instance {
        let space = MetricSpace::new(
            SpaceBase::Line {
                coords: vec![int(0), int(2), int(5)],
            },
            3,
            int(1),
            &MetricGuards::default(),
        )
        .unwrap();
        Instance::new(
            space,
            vec![
                Request { id: 0, atime: int(0), pos: 0 },
                Request { id: 1, atime: int(1), pos: 1 },
                Request { id: 2, atime: int(4), pos: 2 },
            ],
        )
        .unwrap()
    }

    #[test]
    fn opt_cost_group_worked_example() {
        let inst = worked_line_instance();
        assert_eq!(opt_cost_group(&inst, &[0, 1, 2]), int(12));
        // Invariant under listing order.
        assert_eq!(opt_cost_group(&inst, &[2, 0, 1]), int(12));
    }

    #[test]
    fn opt_cost_group_co_located_simultaneous_is_zero() {
        let space = MetricSpace::new(
            SpaceBase::Line {
                coords: vec![int(0), int(9)],
            },
            2,
            int(1),
            &MetricGuards::default(),
        )
        .unwrap();
        let inst = Instance::new(
            space,
            vec![
                Request { id: 0, atime: int(2), pos: 1 },
                Request { id: 1, atime: int(2), pos: 1 },
            ],
        )
        .unwrap();
        assert_eq!(opt_cost_group(&inst, &[0, 1]), int(0));
    }

    #[test]
    fn partition_counts_match_closed_form() {
        assert_eq!(partition_count(4, 2), BigUint::from(3u32));
        assert_eq!(partition_count(9, 3), BigUint::from(280u32));
        assert_eq!(partition_count(12, 2), BigUint::from(10395u32));
        assert_eq!(partition_count(16, 4), BigUint::from(2_627_625u32));
        assert_eq!(partition_count(0, 2), BigUint::one());
    }

    #[test]
    fn brute_force_on_sigma_2_1() {
        let inst = gen_adversarial_line(2, 1, rat(1, 100)).unwrap();
        let opt = brute_force_opt(&inst, &OfflineGuards::default()).unwrap();
        // Pairings cost 4, 2 + 2 eps, 6 + 2 eps; the column pairing wins.
        assert_eq!(opt.value, rat(101, 50));
        assert_eq!(opt.groups, vec![vec![0, 2], vec![1, 3]]);
        assert_eq!(opt.partitions, BigUint::from(3u32));
    }

    #[test]
    fn brute_force_on_forced_two_point() {
        let space = MetricSpace::new(
            SpaceBase::Line {
                coords: vec![int(0), int(1)],
            },
            2,
            int(1),
            &MetricGuards::default(),
        )
        .unwrap();
        let inst = Instance::new(
            space,
            vec![
                Request { id: 0, atime: int(0), pos: 0 },
                Request { id: 1, atime: int(0), pos: 1 },
            ],
        )
        .unwrap();
        let opt = brute_force_opt(&inst, &OfflineGuards::default()).unwrap();
        assert_eq!(opt.value, int(1));
        assert_eq!(opt.groups, vec![vec![0, 1]]);
    }

    #[test]
    fn brute_force_on_sigma_3_1_meets_claim_bound() {
        let eps = rat(1, 9);
        let inst = gen_adversarial_line(3, 1, eps.clone()).unwrap();
        let opt = brute_force_opt(&inst, &OfflineGuards::default()).unwrap();
        // Columns (same point across batches) pay waiting only.
        assert_eq!(opt.value, rat(14, 3));
        assert_eq!(
            opt.groups,
            vec![vec![0, 3, 6], vec![1, 4, 7], vec![2, 5, 8]]
        );
        // OPT <= k + k eps + k^3 eps + m k eps.
        let m = int(inst.m() as i64);
        let k = int(3);
        let bound = &k + &k * &eps + &k * &k * &k * &eps + m * k * &eps;
        assert_eq!(bound, rat(28, 3));
        assert!(opt.value <= bound);
    }

    #[test]
    fn partition_guard_trips() {
        let params = RandomParams::default();
        let inst = gen_random(RandomKind::LineUniform, 2, 18, 1, &params).unwrap();
        let err = brute_force_opt(&inst, &OfflineGuards::default()).unwrap_err();
        assert!(matches!(
            err,
            OfflineError::PartitionGuardExceeded { guard: 10_000_000, .. }
        ));
    }

    #[test]
    fn reference_enumerator_agrees_with_dp() {
        let params = RandomParams {
            points: 4,
            span: 12,
            horizon: 6,
            ..RandomParams::default()
        };
        for seed in 0..10 {
            for (k, m) in [(2usize, 6usize), (2, 8), (4, 8)] {
                let inst = gen_random(RandomKind::LineUniform, k, m, seed, &params).unwrap();
                let dp = brute_force_opt(&inst, &OfflineGuards::default()).unwrap();
                let reference = brute_force_opt_reference(&inst, 8).unwrap();
                assert_eq!(dp.value, reference.value, "value (seed {seed}, k {k}, m {m})");
                assert_eq!(dp.groups, reference.groups, "witness (seed {seed}, k {k}, m {m})");
            }
        }
        let sigma = gen_adversarial_line(2, 1, rat(1, 100)).unwrap();
        let dp = brute_force_opt(&sigma, &OfflineGuards::default()).unwrap();
        let reference = brute_force_opt_reference(&sigma, 8).unwrap();
        assert_eq!(dp.value, reference.value);
        assert_eq!(dp.groups, reference.groups);
    }

    #[test]
    fn reference_enumerator_refuses_large_instances() {
        let inst = gen_adversarial_line(3, 1, rat(1, 9)).unwrap();
        assert!(matches!(
            brute_force_opt_reference(&inst, 8),
            Err(OfflineError::SubsetGuardExceeded { m: 9, guard: 8 })
        ));
    }

    #[test]
    fn p_prime_feasibility_on_sigma_pairings() {
        let inst = gen_adversarial_line(2, 1, rat(1, 100)).unwrap();
        for partition in [
            vec![vec![0u32, 1], vec![2, 3]],
            vec![vec![0, 2], vec![1, 3]],
            vec![vec![0, 3], vec![1, 2]],
        ] {
            let report =
                check_p_prime_feasibility(&inst, &partition, &OfflineGuards::default()).unwrap();
            assert!(report.passed, "{:?}", report.violations);
            assert_eq!(report.checks, 14); // all S with 0 < |S| < m
        }
    }

    #[test]
    fn p_prime_feasibility_on_engine_output() {
        let params = RandomParams {
            points: 5,
            span: 10,
            horizon: 8,
            ..RandomParams::default()
        };
        for seed in 0..8 {
            let inst = gen_random(RandomKind::LineUniform, 3, 9, seed, &params).unwrap();
            let result = run(&inst, GdkConfig::default()).unwrap();
            let partition: Vec<Vec<u32>> =
                result.groups.iter().map(|g| g.ids.clone()).collect();
            let report =
                check_p_prime_feasibility(&inst, &partition, &OfflineGuards::default()).unwrap();
            assert!(report.passed, "seed {seed}: {:?}", report.violations);
        }
    }

    #[test]
    fn p_prime_feasibility_rejects_non_partitions() {
        let inst = gen_adversarial_line(2, 1, rat(1, 100)).unwrap();
        let short_block = vec![vec![0u32], vec![1, 2], vec![3]];
        assert!(matches!(
            check_p_prime_feasibility(&inst, &short_block, &OfflineGuards::default()),
            Err(OfflineError::NotAPartition(_))
        ));
        let duplicate = vec![vec![0u32, 1], vec![1, 2]];
        assert!(matches!(
            check_p_prime_feasibility(&inst, &duplicate, &OfflineGuards::default()),
            Err(OfflineError::NotAPartition(_))
        ));
        let uncovered = vec![vec![0u32, 1]];
        assert!(matches!(
            check_p_prime_feasibility(&inst, &uncovered, &OfflineGuards::default()),
            Err(OfflineError::NotAPartition(_))
        ));
    }

    #[test]
    fn optcost_sandwich_on_worked_example() {
        let inst = worked_line_instance();
        let report = verify_optcost_sandwich(&inst, &[0, 1, 2]);
        // Pairwise edge costs 3, 9, 6 give lower 18/9 = 2; anchor is the
        // atime-4 request with upper 9 + 6 = 15.
        assert_eq!(report.lower, int(2));
        assert_eq!(report.value, int(12));
        assert_eq!(report.upper, int(15));
        assert_eq!(report.anchor, 2);
        assert!(report.holds);
    }

    #[test]
    fn optcost_sandwich_co_located_is_all_zero() {
        let space = MetricSpace::new(
            SpaceBase::Line {
                coords: vec![int(0), int(9)],
            },
            2,
            int(1),
            &MetricGuards::default(),
        )
        .unwrap();
        let inst = Instance::new(
            space,
            vec![
                Request { id: 0, atime: int(2), pos: 1 },
                Request { id: 1, atime: int(2), pos: 1 },
            ],
        )
        .unwrap();
        let report = verify_optcost_sandwich(&inst, &[0, 1]);
        assert_eq!(report.lower, int(0));
        assert_eq!(report.value, int(0));
        assert_eq!(report.upper, int(0));
        // Tie on atime: the smaller id anchors.
        assert_eq!(report.anchor, 0);
        assert!(report.holds);
    }

    #[test]
    fn optcost_sandwich_holds_on_random_sweep_groups() {
        let params = RandomParams {
            points: 5,
            span: 10,
            horizon: 8,
            ..RandomParams::default()
        };
        for seed in 0..8 {
            let inst = gen_random(RandomKind::ExplicitRandom, 3, 9, seed, &params).unwrap();
            let result = run(&inst, GdkConfig::default()).unwrap();
            for g in &result.groups {
                let report = verify_optcost_sandwich(&inst, &g.ids);
                assert!(
                    report.holds,
                    "seed {seed}, group {:?}: {report:?}",
                    g.ids
                );
            }
        }
    }

    #[test]
    fn opt_is_below_offline_evaluation_of_engine_output() {
        let params = RandomParams {
            points: 5,
            span: 10,
            horizon: 8,
            ..RandomParams::default()
        };
        for seed in 0..8 {
            let inst = gen_random(RandomKind::LineUniform, 2, 8, seed, &params).unwrap();
            let result = run(&inst, GdkConfig::default()).unwrap();
            let opt = brute_force_opt(&inst, &OfflineGuards::default()).unwrap();
            let mut offline_eval = Rational::zero();
            for g in &result.groups {
                offline_eval += opt_cost_group(&inst, &g.ids);
            }
            // OPT minimizes over partitions; the engine's own cost can only
            // add waiting beyond each group's last arrival.
            assert!(opt.value <= offline_eval, "seed {seed}");
            assert!(offline_eval <= result.total_cost, "seed {seed}");
        }
    }
}
