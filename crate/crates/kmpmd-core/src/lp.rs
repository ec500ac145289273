//! The surplus relaxation of the offline problem and an exact rational
//! simplex to solve it.
//!
//! The model has one variable per unordered request pair `e`, with
//! objective coefficient `(1/(gamma k^2)) * opt_cost_edge(e)`, and one
//! covering constraint per request subset `S` with `0 < |S| < m`:
//! `sum over e in delta(S) of x_e >= sur(S) * (k - sur(S))` where
//! `sur(S) = |S| mod k`. Constraints with right-hand side 0 are vacuous
//! under nonnegativity and are pruned at build time (the pruned subsets are
//! kept in the model's provenance log). A subset and its complement yield
//! the same constraint; the model keeps both, the solver deduplicates.
//!
//! [`simplex_solve`] is a dense two-phase primal simplex over exact big
//! rationals with Bland's anti-cycling rule throughout. Artificial
//! variables are implicit: phase 1 prices columns against the rows whose
//! basic variable is still artificial, and artificials never re-enter.
//! Every surplus column is unique to its row, so no row of the equality
//! system can vanish; basic zero artificials at the end of phase 1 are
//! always driven out by a degenerate pivot. [`simplex_solve_dual_form`]
//! independently maximizes the dual over a slack basis and must agree by
//! strong duality; the pair serves as a cross-check oracle.
//!
//! # Examples
//! ```
//! use kmpmd_core::instances::gen_adversarial_line;
//! use kmpmd_core::lp::{build_p_prime, simplex_solve, LpGuards, LpStatus};
//! use kmpmd_core::numerics::rat;
//!
//! let inst = gen_adversarial_line(2, 1, rat(1, 100)).unwrap();
//! let model = build_p_prime(&inst, &LpGuards::default()).unwrap();
//! let solution = simplex_solve(&model).unwrap();
//! assert_eq!(solution.status, LpStatus::Optimal);
//! assert_eq!(solution.value.unwrap(), rat(101, 200)); // (1 + eps) / 2
//! ```

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use core::fmt;

use num_traits::Zero;

use crate::gdk::{opt_cost_edge, AuditReport};
use crate::instances::Instance;
use crate::numerics::{int, Rational};

/// Guard thresholds for model construction and solving.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpGuards {
    /// Maximum `m` for model construction (`2^m - 2` candidate rows).
    pub max_m: usize,
    /// Pivot budget; exceeding it signals a solver bug, not a hard model.
    pub max_pivots: u64,
}

impl Default for LpGuards {
    fn default() -> Self {
        LpGuards {
            max_m: 12,
            max_pivots: 1_000_000,
        }
    }
}

/// Errors from the LP layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpError {
    BuildGuardExceeded { m: usize, guard: usize },
    PivotGuardExceeded { pivots: u64 },
}

impl fmt::Display for LpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpError::BuildGuardExceeded { m, guard } => {
                write!(f, "m = {m} exceeds the LP build guard of {guard}")
            }
            LpError::PivotGuardExceeded { pivots } => {
                write!(f, "simplex exceeded the pivot guard of {pivots}")
            }
        }
    }
}

/// One covering constraint: `sum over vars of x >= rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpRow {
    /// The request subset `S` this row came from.
    pub subset_mask: u32,
    /// Indices of the variables in `delta(S)`, ascending.
    pub vars: Vec<usize>,
    /// `sur(S) * (k - sur(S))`.
    pub rhs: u64,
}

/// The fully materialized relaxation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpModel {
    pub m: usize,
    pub k: usize,
    /// Variable index -> unordered request pair, in lexicographic order.
    pub pairs: Vec<(u32, u32)>,
    /// Objective coefficient per variable: `(1/(gamma k^2)) * opt_cost`.
    pub objective: Vec<Rational>,
    pub rows: Vec<LpRow>,
    /// Provenance log: subsets whose constraint had right-hand side 0 and
    /// was pruned as vacuous.
    pub pruned_masks: Vec<u32>,
}

impl LpModel {
    /// Objective value of an explicit point (no feasibility check).
    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (c, v) in self.objective.iter().zip(x) {
            acc += c * v;
        }
        acc
    }

    /// Whether an explicit nonnegative point satisfies every row.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        if x.len() != self.pairs.len() || x.iter().any(|v| *v < Rational::zero()) {
            return false;
        }
        self.rows.iter().all(|row| {
            let mut acc = Rational::zero();
            for &j in &row.vars {
                acc += &x[j];
            }
            acc >= int(row.rhs as i64)
        })
    }

    /// Characteristic vector of a partition: 1 on every within-group pair.
    pub fn characteristic_vector(&self, partition: &[Vec<u32>]) -> Vec<Rational> {
        let index: BTreeMap<(u32, u32), usize> = self
            .pairs
            .iter()
            .enumerate()
            .map(|(j, &p)| (p, j))
            .collect();
        let mut x = alloc::vec![Rational::zero(); self.pairs.len()];
        for group in partition {
            for i in 0..group.len() {
                for j in (i + 1)..group.len() {
                    let key = if group[i] < group[j] {
                        (group[i], group[j])
                    } else {
                        (group[j], group[i])
                    };
                    x[index[&key]] = int(1);
                }
            }
        }
        x
    }
}

/// Builds the relaxation for an instance.
///
/// # Examples
/// ```
/// use kmpmd_core::instances::{Instance, Request};
/// use kmpmd_core::lp::{build_p_prime, LpGuards};
/// use kmpmd_core::metrics::{MetricGuards, MetricSpace, SpaceBase};
/// use kmpmd_core::numerics::int;
///
/// let space = MetricSpace::new(
///     SpaceBase::Line { coords: [0, 1].map(int).to_vec() },
///     2, int(1), &MetricGuards::default(),
/// ).unwrap();
/// let inst = Instance::new(space, vec![
///     Request { id: 0, atime: int(0), pos: 0 },
///     Request { id: 1, atime: int(0), pos: 1 },
/// ]).unwrap();
/// let model = build_p_prime(&inst, &LpGuards::default()).unwrap();
/// // One pair variable; S = {u0} and S = {u1} both demand x >= 1.
/// assert_eq!(model.pairs.len(), 1);
/// assert_eq!(model.rows.len(), 2);
/// assert!(model.pruned_masks.is_empty());
/// ```
pub fn build_p_prime(instance: &Instance, guards: &LpGuards) -> Result<LpModel, LpError> {
    let m = instance.m();
    let k = instance.k();
    if m > guards.max_m {
        return Err(LpError::BuildGuardExceeded {
            m,
            guard: guards.max_m,
        });
    }
    let mut pairs = Vec::new();
    let mut objective = Vec::new();
    let scale = int(1) / (instance.space().gamma() * int((k * k) as i64));
    for u in 0..m as u32 {
        for v in (u + 1)..m as u32 {
            pairs.push((u, v));
            objective.push(&scale * opt_cost_edge(instance, u, v));
        }
    }
    let pair_index: BTreeMap<(u32, u32), usize> = pairs
        .iter()
        .enumerate()
        .map(|(j, &p)| (p, j))
        .collect();

    let mut rows = Vec::new();
    let mut pruned_masks = Vec::new();
    if m > 0 {
        let full: u32 = (1u32 << m) - 1;
        for s in 1..full {
            let sur = (s.count_ones() as usize) % k;
            let rhs = (sur * (k - sur)) as u64;
            if rhs == 0 {
                pruned_masks.push(s);
                continue;
            }
            let mut vars = Vec::new();
            for (j, &(u, v)) in pairs.iter().enumerate() {
                let u_in = s & (1 << u) != 0;
                let v_in = s & (1 << v) != 0;
                if u_in != v_in {
                    vars.push(j);
                }
            }
            debug_assert!(pair_index.len() == pairs.len());
            rows.push(LpRow {
                subset_mask: s,
                vars,
                rhs,
            });
        }
    }
    Ok(LpModel {
        m,
        k,
        pairs,
        objective,
        rows,
        pruned_masks,
    })
}

/// Solver outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    /// Phase 1 ended with a positive artificial sum; on a built model this
    /// indicates input corruption, never valid behavior.
    Infeasible,
    /// The objective decreases without bound; likewise input corruption.
    Unbounded,
}

/// Exact solution report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Optimal objective value, present iff `status == Optimal`.
    pub value: Option<Rational>,
    /// Optimal point per variable, present iff `status == Optimal`.
    pub x: Option<Vec<Rational>>,
    /// Final phase-1 objective: 0 exactly whenever the model is feasible.
    pub phase1_value: Rational,
    pub pivots: u64,
}

/// Basis entry: a real column (structural or surplus) or the implicit
/// artificial of a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BasisVar {
    Real(usize),
    Artificial(usize),
}

/// Solves `min c x` subject to the model's covering rows and `x >= 0` by
/// the two-phase method described in the module doc.
pub fn simplex_solve(model: &LpModel) -> Result<LpSolution, LpError> {
    simplex_solve_with(model, &LpGuards::default())
}

/// [`simplex_solve`] with explicit guards.
pub fn simplex_solve_with(model: &LpModel, guards: &LpGuards) -> Result<LpSolution, LpError> {
    let n = model.pairs.len();

    // Identical rows (same variable set and right-hand side) are redundant;
    // solve over the deduplicated system.
    let mut unique: BTreeMap<(Vec<usize>, u64), ()> = BTreeMap::new();
    let mut rows: Vec<(&Vec<usize>, u64)> = Vec::new();
    for row in &model.rows {
        if unique.insert((row.vars.clone(), row.rhs), ()).is_none() {
            rows.push((&row.vars, row.rhs));
        }
    }
    let r = rows.len();
    if r == 0 {
        // No constraints: all-zero is optimal for nonnegative objectives.
        let value = Rational::zero();
        return Ok(LpSolution {
            status: LpStatus::Optimal,
            value: Some(model.objective_value(&alloc::vec![
                Rational::zero();
                n
            ])),
            x: Some(alloc::vec![Rational::zero(); n]),
            phase1_value: value,
            pivots: 0,
        });
    }

    // Columns: n structural, r surplus; the right-hand side rides along.
    let cols = n + r;
    let mut t: Vec<Vec<Rational>> = alloc::vec![alloc::vec![Rational::zero(); cols + 1]; r];
    for (i, (vars, rhs)) in rows.iter().enumerate() {
        for &j in vars.iter() {
            t[i][j] = int(1);
        }
        t[i][n + i] = int(-1);
        t[i][cols] = int(*rhs as i64);
    }
    let mut basis: Vec<BasisVar> = (0..r).map(BasisVar::Artificial).collect();
    let mut pivots: u64 = 0;

    let bland_index = |b: BasisVar| match b {
        BasisVar::Real(j) => j,
        BasisVar::Artificial(row) => cols + row,
    };

    // Shared pivot: normalize row `pr` on column `pc`, eliminate elsewhere.
    let pivot = |t: &mut Vec<Vec<Rational>>, basis: &mut Vec<BasisVar>, pr: usize, pc: usize| {
        let factor = t[pr][pc].clone();
        for entry in t[pr].iter_mut() {
            if !entry.is_zero() {
                *entry /= &factor;
            }
        }
        for i in 0..t.len() {
            if i == pr || t[i][pc].is_zero() {
                continue;
            }
            let coeff = t[i][pc].clone();
            for j in 0..=cols {
                if !t[pr][j].is_zero() {
                    let delta = &coeff * &t[pr][j];
                    t[i][j] -= delta;
                }
            }
        }
        basis[pr] = BasisVar::Real(pc);
    };

    // Ratio test with Bland's tie-break (smallest basis identifier).
    let leaving = |t: &Vec<Vec<Rational>>, basis: &Vec<BasisVar>, pc: usize| -> Option<usize> {
        let mut best: Option<(Rational, usize, usize)> = None;
        for (i, row) in t.iter().enumerate() {
            if row[pc] <= Rational::zero() {
                continue;
            }
            let ratio = &row[cols] / &row[pc];
            let id = bland_index(basis[i]);
            let better = match &best {
                None => true,
                Some((r, bid, _)) => ratio < *r || (ratio == *r && id < *bid),
            };
            if better {
                best = Some((ratio, id, i));
            }
        }
        best.map(|(_, _, i)| i)
    };

    // Phase 1: minimize the artificial sum. The reduced cost of column j is
    // minus the sum of its entries over artificial-basic rows; entering
    // picks the smallest such column (Bland).
    loop {
        let art_rows: Vec<usize> = (0..r)
            .filter(|&i| matches!(basis[i], BasisVar::Artificial(_)))
            .collect();
        let mut entering = None;
        'cols: for j in 0..cols {
            let mut sum = Rational::zero();
            for &i in &art_rows {
                sum += &t[i][j];
            }
            if sum > Rational::zero() {
                entering = Some(j);
                break 'cols;
            }
        }
        let Some(pc) = entering else { break };
        let Some(pr) = leaving(&t, &basis, pc) else {
            // The artificial sum is bounded below by 0, so a missing ratio
            // row cannot occur on a well-formed tableau; treat defensively.
            break;
        };
        pivot(&mut t, &mut basis, pr, pc);
        pivots += 1;
        if pivots > guards.max_pivots {
            return Err(LpError::PivotGuardExceeded { pivots });
        }
    }
    let mut phase1_value = Rational::zero();
    for i in 0..r {
        if matches!(basis[i], BasisVar::Artificial(_)) {
            phase1_value += &t[i][cols];
        }
    }
    if !phase1_value.is_zero() {
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            value: None,
            x: None,
            phase1_value,
            pivots,
        });
    }

    // Drive out artificials still basic at value 0 with degenerate pivots;
    // every surplus column is unique to its row, so a nonzero entry exists.
    for i in 0..r {
        if !matches!(basis[i], BasisVar::Artificial(_)) {
            continue;
        }
        let pc = (0..cols)
            .find(|&j| !t[i][j].is_zero())
            .expect("equality rows are independent");
        pivot(&mut t, &mut basis, i, pc);
        pivots += 1;
    }

    // Phase 2: minimize the real objective (surplus columns cost 0).
    let cost = |j: usize| -> Rational {
        if j < n {
            model.objective[j].clone()
        } else {
            Rational::zero()
        }
    };
    loop {
        let mut entering = None;
        'cols: for j in 0..cols {
            // Reduced cost: c_j minus the basic costs weighted by column j.
            let mut reduced = cost(j);
            for i in 0..r {
                if let BasisVar::Real(b) = basis[i] {
                    if b == j {
                        // Basic columns price to zero; skip.
                        continue 'cols;
                    }
                    let cb = cost(b);
                    if !cb.is_zero() && !t[i][j].is_zero() {
                        reduced -= cb * &t[i][j];
                    }
                }
            }
            if reduced < Rational::zero() {
                entering = Some(j);
                break 'cols;
            }
        }
        let Some(pc) = entering else { break };
        let Some(pr) = leaving(&t, &basis, pc) else {
            return Ok(LpSolution {
                status: LpStatus::Unbounded,
                value: None,
                x: None,
                phase1_value,
                pivots,
            });
        };
        pivot(&mut t, &mut basis, pr, pc);
        pivots += 1;
        if pivots > guards.max_pivots {
            return Err(LpError::PivotGuardExceeded { pivots });
        }
    }

    let mut x = alloc::vec![Rational::zero(); n];
    let mut value = Rational::zero();
    for i in 0..r {
        if let BasisVar::Real(j) = basis[i] {
            if j < n {
                x[j] = t[i][cols].clone();
                value += &model.objective[j] * &t[i][cols];
            }
        }
    }
    Ok(LpSolution {
        status: LpStatus::Optimal,
        value: Some(value),
        x: Some(x),
        phase1_value,
        pivots,
    })
}

/// Independent oracle: solves the dual `max b y` subject to `A^T y <= c`,
/// `y >= 0` by a plain max-form simplex from the slack basis (the
/// objective coefficients are nonnegative, so the basis is feasible and no
/// phase 1 is needed). By strong duality the value equals the primal
/// optimum; the two routes share no tableau code path.
pub fn simplex_solve_dual_form(model: &LpModel, guards: &LpGuards) -> Result<Rational, LpError> {
    let n = model.pairs.len();
    let mut unique: BTreeMap<(Vec<usize>, u64), ()> = BTreeMap::new();
    let mut rows: Vec<(&Vec<usize>, u64)> = Vec::new();
    for row in &model.rows {
        if unique.insert((row.vars.clone(), row.rhs), ()).is_none() {
            rows.push((&row.vars, row.rhs));
        }
    }
    let r = rows.len();
    if r == 0 {
        return Ok(Rational::zero());
    }

    // Tableau rows = primal variables (A^T y + slack = c); columns = r dual
    // variables + n slacks + rhs.
    let cols = r + n;
    let mut t: Vec<Vec<Rational>> = alloc::vec![alloc::vec![Rational::zero(); cols + 1]; n];
    for (col, (vars, _)) in rows.iter().enumerate() {
        for &j in vars.iter() {
            t[j][col] = int(1);
        }
    }
    for j in 0..n {
        t[j][r + j] = int(1);
        t[j][cols] = model.objective[j].clone();
    }
    // Profit per column: b for dual variables, 0 for slacks.
    let profit = |col: usize| -> Rational {
        if col < r {
            int(rows[col].1 as i64)
        } else {
            Rational::zero()
        }
    };
    let mut basis: Vec<usize> = (0..n).map(|j| r + j).collect();
    let mut pivots: u64 = 0;
    loop {
        let mut entering = None;
        'cols: for col in 0..cols {
            let mut reduced = profit(col);
            for i in 0..n {
                if basis[i] == col {
                    continue 'cols;
                }
                let pb = profit(basis[i]);
                if !pb.is_zero() && !t[i][col].is_zero() {
                    reduced -= pb * &t[i][col];
                }
            }
            if reduced > Rational::zero() {
                entering = Some(col);
                break 'cols;
            }
        }
        let Some(pc) = entering else { break };
        let mut leave: Option<(Rational, usize, usize)> = None;
        for i in 0..n {
            if t[i][pc] <= Rational::zero() {
                continue;
            }
            let ratio = &t[i][cols] / &t[i][pc];
            let better = match &leave {
                None => true,
                Some((best, bid, _)) => ratio < *best || (ratio == *best && basis[i] < *bid),
            };
            if better {
                leave = Some((ratio, basis[i], i));
            }
        }
        let Some((_, _, pr)) = leave else {
            // The dual of a feasible primal is bounded; defensive only.
            return Err(LpError::PivotGuardExceeded { pivots });
        };
        let factor = t[pr][pc].clone();
        for entry in t[pr].iter_mut() {
            if !entry.is_zero() {
                *entry /= &factor;
            }
        }
        for i in 0..n {
            if i == pr || t[i][pc].is_zero() {
                continue;
            }
            let coeff = t[i][pc].clone();
            for j in 0..=cols {
                if !t[pr][j].is_zero() {
                    let delta = &coeff * &t[pr][j];
                    t[i][j] -= delta;
                }
            }
        }
        basis[pr] = pc;
        pivots += 1;
        if pivots > guards.max_pivots {
            return Err(LpError::PivotGuardExceeded { pivots });
        }
    }
    let mut value = Rational::zero();
    for i in 0..n {
        let pb = profit(basis[i]);
        if !pb.is_zero() {
            value += pb * &t[i][cols];
        }
    }
    Ok(value)
}

/// Asserts the exact chain `D' <= P' <= OPT` for values computed on one
/// instance at the default rate.
pub fn verify_duality_chain(
    d_prime: &Rational,
    p_prime: &Rational,
    opt: &Rational,
) -> AuditReport {
    let mut report = AuditReport::new("duality_chain");
    report.checks += 2;
    if d_prime > p_prime {
        report.violate(format!("D' = {d_prime} exceeds P' = {p_prime}"));
    }
    if p_prime > opt {
        report.violate(format!("P' = {p_prime} exceeds OPT = {opt}"));
    }
    report
        .notes
        .push(format!("D' = {d_prime}, P' = {p_prime}, OPT = {opt}"));
    report
}
