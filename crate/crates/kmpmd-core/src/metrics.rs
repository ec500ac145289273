//! Finite metric spaces and the three supported k-point H-metrics.
//!
//! An H-metric is a k-variable distance function `d_H` over a point set
//! satisfying four axioms:
//!
//! * `Pi` — invariance under permutations of the tuple;
//! * `O_D` — nonnegativity, with `d_H = 0` exactly on all-equal tuples;
//! * `Delta_H` — the generalized triangle inequality: for every split index
//!   `i` in `1..=k` and every anchor point `a`,
//!   `d_H(p_1..p_k) <= d_H(p_1..p_i, a..a) + d_H(a..a, p_{i+1}..p_k)`;
//! * `S_H` — the separation axiom with parameter `gamma`:
//!   `d_H(p) <= d_H(p')` when `elem(p)` is a strict subset of `elem(p')`,
//!   and `d_H(p) <= gamma * d_H(p')` when the element sets are equal.
//!
//! Three kinds are implemented, all H-metrics with `gamma = 1`:
//!
//! * [`SpaceBase::Line`] — diameter on a line: max coordinate minus min;
//! * [`SpaceBase::Dmax`] — maximum pairwise distance over a base metric;
//! * [`SpaceBase::Dhc`] — minimum Hamiltonian-circuit cost over the tuple
//!   (multiset semantics: repeated points contribute zero-cost edges).
//!
//! [`MetricSpace::induced_pair_distance`] exposes the induced pair metric
//! `d'(p, q) = d_H(p, q, ..., q)`, the only pair metric consumed by the
//! engine and LP layers. It is a genuine metric for every supported kind:
//! symmetry holds by direct evaluation, positive definiteness is `O_D`, and
//! the triangle inequality follows from `Delta_H` with split 1 and the
//! middle point as anchor. [`MetricSpace::verify_sandwich`] checks the
//! two-sided approximation of `d_H` by `d'`, and
//! [`MetricSpace::verify_h_axioms`] brute-forces the axioms themselves.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use core::fmt;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::numerics::{int, Rational};

/// Guard thresholds for brute-force metric machinery. All limits are
/// configuration, not hard-coded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricGuards {
    /// Largest `k` for which `Dhc` circuit enumeration ((k-1)!/2 circuits)
    /// is permitted.
    pub dhc_max_k: usize,
    /// Evaluation budget for exhaustive axiom verification, counted as
    /// `n^k * n * k`.
    pub axiom_eval_budget: u64,
}

impl Default for MetricGuards {
    fn default() -> Self {
        MetricGuards {
            dhc_max_k: 8,
            axiom_eval_budget: 10_000_000,
        }
    }
}

/// Errors from metric construction, evaluation, and verification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MetricError {
    KTooSmall { k: usize },
    GammaOutOfRange { gamma: Rational, k: usize },
    EmptyPointSet,
    DuplicateCoordinate { p: usize, q: usize },
    RaggedMatrix { row: usize },
    NonZeroDiagonal { p: usize },
    AsymmetricEntry { p: usize, q: usize },
    NonPositiveOffDiagonal { p: usize, q: usize },
    TriangleViolation { p: usize, q: usize, r: usize },
    WrongArity { expected: usize, got: usize },
    UnknownPoint { point: usize, n: usize },
    AnchorNotInTuple { anchor: usize },
    CircuitGuardExceeded { k: usize, max_k: usize },
    BudgetExceeded { needed: u128, budget: u64 },
}

impl fmt::Display for MetricError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricError::KTooSmall { k } => write!(f, "k must be at least 2, got {k}"),
            MetricError::GammaOutOfRange { gamma, k } => {
                write!(f, "gamma {gamma} outside [1, k-1] for k = {k}")
            }
            MetricError::EmptyPointSet => write!(f, "point set is empty"),
            MetricError::DuplicateCoordinate { p, q } => {
                write!(f, "points {p} and {q} share a coordinate")
            }
            MetricError::RaggedMatrix { row } => write!(f, "matrix row {row} has wrong length"),
            MetricError::NonZeroDiagonal { p } => write!(f, "dist[{p}][{p}] is not zero"),
            MetricError::AsymmetricEntry { p, q } => {
                write!(f, "dist[{p}][{q}] differs from dist[{q}][{p}]")
            }
            MetricError::NonPositiveOffDiagonal { p, q } => {
                write!(f, "dist[{p}][{q}] is not positive")
            }
            MetricError::TriangleViolation { p, q, r } => {
                write!(f, "triangle inequality fails: dist[{p}][{r}] > dist[{p}][{q}] + dist[{q}][{r}]")
            }
            MetricError::WrongArity { expected, got } => {
                write!(f, "tuple has {got} entries, expected {expected}")
            }
            MetricError::UnknownPoint { point, n } => {
                write!(f, "point id {point} out of range (n = {n})")
            }
            MetricError::AnchorNotInTuple { anchor } => {
                write!(f, "anchor point {anchor} does not occur in the tuple")
            }
            MetricError::CircuitGuardExceeded { k, max_k } => {
                write!(f, "circuit enumeration guard: k = {k} exceeds {max_k}")
            }
            MetricError::BudgetExceeded { needed, budget } => {
                write!(f, "exhaustive verification needs {needed} evaluations, budget is {budget}")
            }
        }
    }
}

/// Base pair metric on points `0..n-1`: a validated symmetric matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasePairMetric {
    dist: Vec<Vec<Rational>>,
}

impl BasePairMetric {
    /// Validates and wraps a full `n x n` matrix: zero diagonal, symmetry,
    /// positive off-diagonal entries, and the triangle inequality.
    pub fn new(dist: Vec<Vec<Rational>>) -> Result<Self, MetricError> {
        let n = dist.len();
        if n == 0 {
            return Err(MetricError::EmptyPointSet);
        }
        for (i, row) in dist.iter().enumerate() {
            if row.len() != n {
                return Err(MetricError::RaggedMatrix { row: i });
            }
        }
        for p in 0..n {
            if !dist[p][p].is_zero() {
                return Err(MetricError::NonZeroDiagonal { p });
            }
            for q in (p + 1)..n {
                if dist[p][q] != dist[q][p] {
                    return Err(MetricError::AsymmetricEntry { p, q });
                }
                if dist[p][q] <= Rational::zero() {
                    return Err(MetricError::NonPositiveOffDiagonal { p, q });
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    if dist[p][r] > &dist[p][q] + &dist[q][r] {
                        return Err(MetricError::TriangleViolation { p, q, r });
                    }
                }
            }
        }
        Ok(BasePairMetric { dist })
    }

    /// Wraps a matrix without validation. Intended for negative tests that
    /// need deliberately corrupted metrics; every regular path goes through
    /// [`BasePairMetric::new`].
    pub fn new_unchecked(dist: Vec<Vec<Rational>>) -> Self {
        BasePairMetric { dist }
    }

    /// Builds the full matrix from strictly-lower-triangular rows: row `i`
    /// holds `dist[i][0..i]`, so row 0 is empty.
    pub fn from_lower_triangular(rows: &[Vec<Rational>]) -> Result<Self, MetricError> {
        let n = rows.len();
        if n == 0 {
            return Err(MetricError::EmptyPointSet);
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != i {
                return Err(MetricError::RaggedMatrix { row: i });
            }
        }
        let mut dist = alloc::vec![alloc::vec![Rational::zero(); n]; n];
        for i in 0..n {
            for j in 0..i {
                dist[i][j] = rows[i][j].clone();
                dist[j][i] = rows[i][j].clone();
            }
        }
        BasePairMetric::new(dist)
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn dist(&self, p: usize, q: usize) -> &Rational {
        &self.dist[p][q]
    }

    /// Strictly-lower-triangular view used by the file format.
    pub fn lower_triangular(&self) -> Vec<Vec<Rational>> {
        (0..self.len())
            .map(|i| self.dist[i][..i].to_vec())
            .collect()
    }
}

/// The point set and base structure of a metric space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpaceBase {
    /// Points on a line, identified by distinct rational coordinates;
    /// `d_H` is the diameter (max minus min coordinate).
    Line { coords: Vec<Rational> },
    /// `d_H` is the maximum pairwise base distance.
    Dmax(BasePairMetric),
    /// `d_H` is the minimum-cost Hamiltonian circuit through the tuple,
    /// brute-forced over the (k-1)!/2 distinct circular orders.
    Dhc(BasePairMetric),
}

/// Discriminant of [`SpaceBase`] for reports and file formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceKind {
    LineDiameter,
    DmaxOverBase,
    DhcOverBase,
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            SpaceKind::LineDiameter => "line_diameter",
            SpaceKind::DmaxOverBase => "dmax_over_base",
            SpaceKind::DhcOverBase => "dhc_over_base",
        };
        write!(f, "{name}")
    }
}

/// A finite H-metric space: base structure, tuple arity `k`, and the
/// separation parameter `gamma` (in `[1, k-1]`; 1 for all supported kinds
/// unless overridden for experiments).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricSpace {
    base: SpaceBase,
    k: usize,
    gamma: Rational,
}

impl MetricSpace {
    /// Validates and builds a space. `gamma` must lie in `[1, k-1]`
    /// (in particular `gamma = 0` is rejected), the point set must be
    /// nonempty with distinct line coordinates, and `Dhc` spaces must
    /// respect the circuit-enumeration guard.
    pub fn new(
        base: SpaceBase,
        k: usize,
        gamma: Rational,
        guards: &MetricGuards,
    ) -> Result<Self, MetricError> {
        if k < 2 {
            return Err(MetricError::KTooSmall { k });
        }
        if gamma < Rational::one() || gamma > int(k as i64 - 1) {
            return Err(MetricError::GammaOutOfRange { gamma, k });
        }
        match &base {
            SpaceBase::Line { coords } => {
                if coords.is_empty() {
                    return Err(MetricError::EmptyPointSet);
                }
                for p in 0..coords.len() {
                    for q in (p + 1)..coords.len() {
                        if coords[p] == coords[q] {
                            return Err(MetricError::DuplicateCoordinate { p, q });
                        }
                    }
                }
            }
            SpaceBase::Dmax(m) | SpaceBase::Dhc(m) => {
                if m.is_empty() {
                    return Err(MetricError::EmptyPointSet);
                }
            }
        }
        if matches!(base, SpaceBase::Dhc(_)) && k > guards.dhc_max_k {
            return Err(MetricError::CircuitGuardExceeded {
                k,
                max_k: guards.dhc_max_k,
            });
        }
        Ok(MetricSpace { base, k, gamma })
    }

    pub fn base(&self) -> &SpaceBase {
        &self.base
    }

    pub fn kind(&self) -> SpaceKind {
        match self.base {
            SpaceBase::Line { .. } => SpaceKind::LineDiameter,
            SpaceBase::Dmax(_) => SpaceKind::DmaxOverBase,
            SpaceBase::Dhc(_) => SpaceKind::DhcOverBase,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn gamma(&self) -> &Rational {
        &self.gamma
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        match &self.base {
            SpaceBase::Line { coords } => coords.len(),
            SpaceBase::Dmax(m) | SpaceBase::Dhc(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coordinate of a point in a line space, if this is one.
    pub fn coord(&self, p: usize) -> Option<&Rational> {
        match &self.base {
            SpaceBase::Line { coords } => coords.get(p),
            _ => None,
        }
    }

    /// Base pair distance between two points (line spaces: |difference of
    /// coordinates|).
    pub fn base_dist(&self, p: usize, q: usize) -> Rational {
        match &self.base {
            SpaceBase::Line { coords } => {
                let d = &coords[p] - &coords[q];
                if d < Rational::zero() {
                    -d
                } else {
                    d
                }
            }
            SpaceBase::Dmax(m) | SpaceBase::Dhc(m) => m.dist(p, q).clone(),
        }
    }

    fn check_tuple(&self, tuple: &[usize]) -> Result<(), MetricError> {
        if tuple.len() != self.k {
            return Err(MetricError::WrongArity {
                expected: self.k,
                got: tuple.len(),
            });
        }
        let n = self.len();
        for &p in tuple {
            if p >= n {
                return Err(MetricError::UnknownPoint { point: p, n });
            }
        }
        Ok(())
    }

    /// Evaluates `d_H` on a k-tuple of point ids (repeats allowed).
    ///
    /// # Examples
    /// ```
    /// use kmpmd_core::metrics::{MetricSpace, MetricGuards, SpaceBase};
    /// use kmpmd_core::numerics::int;
    /// let coords = [0, 2, 5].map(int).to_vec();
    /// let space = MetricSpace::new(
    ///     SpaceBase::Line { coords }, 3, int(1), &MetricGuards::default(),
    /// ).unwrap();
    /// assert_eq!(space.k_distance(&[0, 1, 2]).unwrap(), int(5));
    /// assert_eq!(space.k_distance(&[1, 1, 1]).unwrap(), int(0));
    /// ```
    pub fn k_distance(&self, tuple: &[usize]) -> Result<Rational, MetricError> {
        self.check_tuple(tuple)?;
        match &self.base {
            SpaceBase::Line { coords } => {
                let mut min = &coords[tuple[0]];
                let mut max = min;
                for &p in &tuple[1..] {
                    let c = &coords[p];
                    if c < min {
                        min = c;
                    }
                    if c > max {
                        max = c;
                    }
                }
                Ok(max - min)
            }
            SpaceBase::Dmax(m) => {
                let mut best = Rational::zero();
                for i in 0..tuple.len() {
                    for j in (i + 1)..tuple.len() {
                        let d = m.dist(tuple[i], tuple[j]);
                        if *d > best {
                            best = d.clone();
                        }
                    }
                }
                Ok(best)
            }
            SpaceBase::Dhc(m) => Ok(min_circuit(m, tuple)),
        }
    }

    /// The induced pair metric `d'(p, q) = d_H(p, q, ..., q)`: the only pair
    /// metric consumed by the engine and LP layers. Evaluates to the
    /// coordinate gap on line spaces, the base distance on `Dmax` spaces,
    /// and twice the base distance on `Dhc` spaces (the circuit enters and
    /// leaves the lone point).
    ///
    /// # Examples
    /// ```
    /// use kmpmd_core::metrics::{MetricSpace, MetricGuards, SpaceBase};
    /// use kmpmd_core::numerics::int;
    /// let coords = [0, 3].map(int).to_vec();
    /// let space = MetricSpace::new(
    ///     SpaceBase::Line { coords }, 2, int(1), &MetricGuards::default(),
    /// ).unwrap();
    /// assert_eq!(space.induced_pair_distance(0, 1).unwrap(), int(3));
    /// ```
    pub fn induced_pair_distance(&self, p: usize, q: usize) -> Result<Rational, MetricError> {
        let mut tuple = alloc::vec![q; self.k];
        tuple[0] = p;
        self.k_distance(&tuple)
    }

    /// Brute-force verification of the four H-metric axioms.
    ///
    /// Exhaustive mode sweeps every tuple; its cost is counted as
    /// `n^k * n * k` against the configured budget. Sampled mode draws
    /// `count` random tuples from a seeded deterministic stream and checks
    /// each axiom on randomized witnesses.
    pub fn verify_h_axioms(
        &self,
        mode: VerifyMode,
        guards: &MetricGuards,
    ) -> Result<AxiomReport, MetricError> {
        match mode {
            VerifyMode::Exhaustive => self.verify_axioms_exhaustive(guards),
            VerifyMode::Sampled { count, seed } => Ok(self.verify_axioms_sampled(count, seed)),
        }
    }

    fn verify_axioms_exhaustive(&self, guards: &MetricGuards) -> Result<AxiomReport, MetricError> {
        let n = self.len() as u128;
        let k = self.k as u128;
        let tuples = n.checked_pow(self.k as u32).unwrap_or(u128::MAX);
        let needed = tuples.saturating_mul(n).saturating_mul(k);
        if needed > guards.axiom_eval_budget as u128 {
            return Err(MetricError::BudgetExceeded {
                needed,
                budget: guards.axiom_eval_budget,
            });
        }

        let mut pi = AxiomCheck::new("Pi");
        let mut od = AxiomCheck::new("O_D");
        let mut delta = AxiomCheck::new("Delta_H");
        let mut sh = AxiomCheck::new("S_H");
        // elem set -> (min tuple, min value, max tuple, max value)
        let mut buckets: BTreeMap<Vec<usize>, Bucket> = BTreeMap::new();

        let mut tuple = alloc::vec![0usize; self.k];
        loop {
            let d = self.k_distance(&tuple)?;

            let all_equal = tuple.iter().all(|&p| p == tuple[0]);
            od.checks += 1;
            if d < Rational::zero() || (d.is_zero() != all_equal) {
                od.fail(format!("O_D fails on {tuple:?}: d_H = {d}"));
            }

            let mut sorted = tuple.clone();
            sorted.sort_unstable();
            pi.checks += 1;
            if self.k_distance(&sorted)? != d {
                pi.fail(format!(
                    "Pi fails: d_H{tuple:?} != d_H{sorted:?} (sorted reordering)"
                ));
            }

            for anchor in 0..self.len() {
                for i in 1..=self.k {
                    delta.checks += 1;
                    let mut left = tuple[..i].to_vec();
                    left.resize(self.k, anchor);
                    let mut right = alloc::vec![anchor; i];
                    right.extend_from_slice(&tuple[i..]);
                    let bound = self.k_distance(&left)? + self.k_distance(&right)?;
                    if d > bound {
                        delta.fail(format!(
                            "Delta_H fails on {tuple:?} split {i} anchor {anchor}: {d} > {bound}"
                        ));
                    }
                }
            }

            let mut elem = tuple.clone();
            elem.sort_unstable();
            elem.dedup();
            buckets
                .entry(elem)
                .and_modify(|b| b.update(&tuple, &d))
                .or_insert_with(|| Bucket::new(&tuple, &d));

            if !next_tuple(&mut tuple, self.len()) {
                break;
            }
        }

        // S_H over elem-set pairs: comparing bucket extrema covers every
        // tuple pair with the given elem relation.
        let keys: Vec<Vec<usize>> = buckets.keys().cloned().collect();
        for small in &keys {
            let b_small = &buckets[small];
            for large in &keys {
                if small == large {
                    sh.checks += 1;
                    let b = &buckets[small];
                    if b.max_value > &self.gamma * &b.min_value {
                        sh.fail(format!(
                            "S_H (equal elem sets {small:?}) fails: d_H{:?} = {} > gamma * d_H{:?} = {} * {}",
                            b.max_tuple, b.max_value, b.min_tuple, self.gamma, b.min_value
                        ));
                    }
                } else if is_strict_subset(small, large) {
                    sh.checks += 1;
                    let b_large = &buckets[large];
                    if b_small.max_value > b_large.min_value {
                        sh.fail(format!(
                            "S_H (elem {small:?} subset of {large:?}) fails: d_H{:?} = {} > d_H{:?} = {}",
                            b_small.max_tuple, b_small.max_value, b_large.min_tuple, b_large.min_value
                        ));
                    }
                }
            }
        }

        Ok(AxiomReport {
            gamma: self.gamma.clone(),
            mode: "exhaustive",
            pi,
            o_d: od,
            delta_h: delta,
            s_h: sh,
        })
    }

    fn verify_axioms_sampled(&self, count: u64, seed: u64) -> AxiomReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.len();
        let mut pi = AxiomCheck::new("Pi");
        let mut od = AxiomCheck::new("O_D");
        let mut delta = AxiomCheck::new("Delta_H");
        let mut sh = AxiomCheck::new("S_H");

        for _ in 0..count {
            let tuple: Vec<usize> = (0..self.k).map(|_| rng.gen_range(0..n)).collect();
            let d = self
                .k_distance(&tuple)
                .expect("sampled tuple is always valid");

            let all_equal = tuple.iter().all(|&p| p == tuple[0]);
            od.checks += 1;
            if d < Rational::zero() || (d.is_zero() != all_equal) {
                od.fail(format!("O_D fails on {tuple:?}: d_H = {d}"));
            }

            let mut shuffled = tuple.clone();
            for i in (1..shuffled.len()).rev() {
                shuffled.swap(i, rng.gen_range(0..=i));
            }
            pi.checks += 1;
            if self.k_distance(&shuffled).expect("valid tuple") != d {
                pi.fail(format!("Pi fails: d_H{tuple:?} != d_H{shuffled:?}"));
            }

            let split = rng.gen_range(1..=self.k);
            let anchor = rng.gen_range(0..n);
            let mut left = tuple[..split].to_vec();
            left.resize(self.k, anchor);
            let mut right = alloc::vec![anchor; split];
            right.extend_from_slice(&tuple[split..]);
            let bound = self.k_distance(&left).expect("valid tuple")
                + self.k_distance(&right).expect("valid tuple");
            delta.checks += 1;
            if d > bound {
                delta.fail(format!(
                    "Delta_H fails on {tuple:?} split {split} anchor {anchor}: {d} > {bound}"
                ));
            }

            let mut elem = tuple.clone();
            elem.sort_unstable();
            elem.dedup();
            let other: Vec<usize> = (0..self.k)
                .map(|_| elem[rng.gen_range(0..elem.len())])
                .collect();
            let d_other = self.k_distance(&other).expect("valid tuple");
            let mut elem_other = other.clone();
            elem_other.sort_unstable();
            elem_other.dedup();
            sh.checks += 1;
            if elem_other == elem {
                if d_other > &self.gamma * &d || d > &self.gamma * &d_other {
                    sh.fail(format!(
                        "S_H (equal elem sets) fails on {other:?} vs {tuple:?}: {d_other} vs gamma * {d}"
                    ));
                }
            } else if d_other > d {
                // elem(other) is a strict subset of elem(tuple) by construction.
                sh.fail(format!(
                    "S_H (subset) fails on {other:?} vs {tuple:?}: {d_other} > {d}"
                ));
            }
        }

        AxiomReport {
            gamma: self.gamma.clone(),
            mode: "sampled",
            pi,
            o_d: od,
            delta_h: delta,
            s_h: sh,
        }
    }

    /// Evaluates both sides of the pair-metric sandwich around `d_H`:
    ///
    /// `(1/(gamma k^2)) * sum_{i<j} d'(p_i, p_j) <= d_H(p_1..p_k)
    ///  <= sum_i d'(anchor, p_i)`
    ///
    /// for an anchor occurring in the tuple. Returns the three values and
    /// whether both inequalities hold (they always do on a valid H-metric).
    pub fn verify_sandwich(
        &self,
        tuple: &[usize],
        anchor: usize,
    ) -> Result<SandwichReport, MetricError> {
        self.check_tuple(tuple)?;
        if !tuple.contains(&anchor) {
            return Err(MetricError::AnchorNotInTuple { anchor });
        }
        let mut pair_sum = Rational::zero();
        for i in 0..tuple.len() {
            for j in (i + 1)..tuple.len() {
                pair_sum += self.induced_pair_distance(tuple[i], tuple[j])?;
            }
        }
        let kk = int((self.k * self.k) as i64);
        let lower = pair_sum / (&self.gamma * kk);
        let d_h = self.k_distance(tuple)?;
        let mut upper = Rational::zero();
        for &p in tuple {
            upper += self.induced_pair_distance(anchor, p)?;
        }
        let holds = lower <= d_h && d_h <= upper;
        Ok(SandwichReport {
            lower,
            d_h,
            upper,
            holds,
        })
    }
}

/// Minimum Hamiltonian-circuit cost through the tuple's points, enumerating
/// the (k-1)!/2 distinct circular orders (slot 0 fixed, reversed sequences
/// deduplicated). Repeated points cost nothing between themselves.
fn min_circuit(m: &BasePairMetric, tuple: &[usize]) -> Rational {
    let k = tuple.len();
    if k == 1 {
        return Rational::zero();
    }
    let mut rest: Vec<usize> = (1..k).collect();
    let mut best: Option<Rational> = None;
    permute_circuits(m, tuple, &mut rest, 0, &mut best);
    best.expect("at least one circuit")
}

fn permute_circuits(
    m: &BasePairMetric,
    tuple: &[usize],
    rest: &mut Vec<usize>,
    depth: usize,
    best: &mut Option<Rational>,
) {
    let k = rest.len() + 1;
    if depth == rest.len() {
        // Skip the reversal twin: keep orders whose first moving slot is
        // smaller than the last. With k = 2 there is a single order.
        if k > 2 && rest[0] > rest[k - 2] {
            return;
        }
        let mut cost = m.dist(tuple[0], tuple[rest[0]]).clone();
        for w in rest.windows(2) {
            cost += m.dist(tuple[w[0]], tuple[w[1]]);
        }
        cost += m.dist(tuple[rest[k - 2]], tuple[0]);
        if best.as_ref().is_none_or(|b| cost < *b) {
            *best = Some(cost);
        }
        return;
    }
    for i in depth..rest.len() {
        rest.swap(depth, i);
        permute_circuits(m, tuple, rest, depth + 1, best);
        rest.swap(depth, i);
    }
}

fn next_tuple(tuple: &mut [usize], n: usize) -> bool {
    for slot in tuple.iter_mut().rev() {
        *slot += 1;
        if *slot < n {
            return true;
        }
        *slot = 0;
    }
    false
}

fn is_strict_subset(small: &[usize], large: &[usize]) -> bool {
    small.len() < large.len() && small.iter().all(|x| large.binary_search(x).is_ok())
}

struct Bucket {
    min_tuple: Vec<usize>,
    min_value: Rational,
    max_tuple: Vec<usize>,
    max_value: Rational,
}

impl Bucket {
    fn new(tuple: &[usize], d: &Rational) -> Self {
        Bucket {
            min_tuple: tuple.to_vec(),
            min_value: d.clone(),
            max_tuple: tuple.to_vec(),
            max_value: d.clone(),
        }
    }

    fn update(&mut self, tuple: &[usize], d: &Rational) {
        if *d < self.min_value {
            self.min_value = d.clone();
            self.min_tuple = tuple.to_vec();
        }
        if *d > self.max_value {
            self.max_value = d.clone();
            self.max_tuple = tuple.to_vec();
        }
    }
}

/// Verification mode for [`MetricSpace::verify_h_axioms`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    Exhaustive,
    Sampled { count: u64, seed: u64 },
}

/// Result of checking one axiom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomCheck {
    pub name: &'static str,
    pub passed: bool,
    pub checks: u64,
    /// Human-readable witness for the first failure, if any.
    pub counterexample: Option<String>,
}

impl AxiomCheck {
    fn new(name: &'static str) -> Self {
        AxiomCheck {
            name,
            passed: true,
            checks: 0,
            counterexample: None,
        }
    }

    fn fail(&mut self, witness: String) {
        if self.passed {
            self.passed = false;
            self.counterexample = Some(witness);
        }
    }
}

/// Report of [`MetricSpace::verify_h_axioms`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub gamma: Rational,
    pub mode: &'static str,
    pub pi: AxiomCheck,
    pub o_d: AxiomCheck,
    pub delta_h: AxiomCheck,
    pub s_h: AxiomCheck,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.pi.passed && self.o_d.passed && self.delta_h.passed && self.s_h.passed
    }

    pub fn axioms(&self) -> [&AxiomCheck; 4] {
        [&self.pi, &self.o_d, &self.delta_h, &self.s_h]
    }
}

/// Report of [`MetricSpace::verify_sandwich`]: the lower bound, `d_H`
/// itself, and the upper bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SandwichReport {
    pub lower: Rational,
    pub d_h: Rational,
    pub upper: Rational,
    pub holds: bool,
}
