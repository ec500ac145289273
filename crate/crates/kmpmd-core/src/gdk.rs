//! The GD-k engine: an exact discrete-event simulation of the primal-dual
//! online grouping algorithm, plus its structural and dual audits.
//!
//! Every request belongs to exactly one *active set*. A set with a free
//! (unmatched) member grows: its growth duration `g_S` increases one-for-one
//! with time, its dual variable is `y_S = r * g_S` (default rate
//! `r = 1/(gamma k^2)`), and the potential `Phi(u)` of each member `u` (the
//! sum of `g_S` over all sets that ever contained `u`) grows with it. A
//! cross-set request pair `e = (u, v)` becomes *tight* when its dual load
//! `Phi(u) + Phi(v)` reaches the threshold
//! `opt_cost_edge(e) * (1/(gamma k^2)) / r`; the engine then merges the two
//! sets into a fresh child set, marks the edge, and carves groups of `k`
//! free requests out of the child while at least `k` are free. Merging
//! freezes the dual load of every pair that becomes internal; internal
//! pairs never accumulate load again.
//!
//! Time never ticks: the engine jumps between event instants, which are
//! exact rational roots of linear slack functions. One event is either one
//! instant's batch of arrivals (processed before tight-edge detection at
//! that instant) or one instant's batch of tight edges (processed in
//! ascending `(min id, max id)` order, re-checking set membership before
//! each merge).
//!
//! The audits re-verify, from the run's own records, the facts the
//! competitive analysis rests on: dual feasibility of `y` at every event
//! time, the potential identity `Phi(u) = now - atime(u)` for unmatched
//! requests, the spanning-forest structure of marked edges (with the
//! path-crossing bound used by the distance-cost argument), and the cost
//! accounting identities and competitive bounds themselves.
//!
//! # Examples
//! ```
//! use kmpmd_core::gdk::{run, GdkConfig};
//! use kmpmd_core::instances::gen_adversarial_line;
//! use kmpmd_core::numerics::{int, rat};
//!
//! let inst = gen_adversarial_line(2, 1, rat(1, 100)).unwrap();
//! let result = run(&inst, GdkConfig::default()).unwrap();
//! assert_eq!(result.total_cost, rat(301, 50)); // 6 + 2 * epsilon
//! assert_eq!(result.groups[0].time, int(1));
//! assert_eq!(result.groups[1].time, rat(51, 50)); // 1 + 2 * epsilon
//! ```

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use core::fmt;

use num_traits::Zero;

use crate::instances::Instance;
use crate::metrics::SpaceKind;
use crate::numerics::{int, Rational};

/// Engine errors. Invariant breaches signal an engine bug, never
/// valid-input behavior.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GdkError {
    /// `step` called on a terminal state.
    Terminal,
    /// The configured rate override is not positive.
    RateNotPositive,
    /// Audit precondition: the run must use the default rate.
    NonDefaultRate,
    /// Audit precondition: the run must carry a full trace.
    TraceTooCoarse,
    /// Internal invariant breach (negative slack, event guard exceeded).
    InvariantBreach(String),
}

impl fmt::Display for GdkError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GdkError::Terminal => write!(f, "engine is terminal; no events remain"),
            GdkError::RateNotPositive => write!(f, "rate override must be positive"),
            GdkError::NonDefaultRate => {
                write!(f, "audit requires the default rate 1/(gamma k^2); rerun without override")
            }
            GdkError::TraceTooCoarse => {
                write!(f, "audit requires a full event trace; rerun with TraceLevel::Full")
            }
            GdkError::InvariantBreach(msg) => write!(f, "engine invariant breach: {msg}"),
        }
    }
}

/// How much per-event state the trace retains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TraceLevel {
    /// Events only: kind, time, merges, groups.
    Summary,
    /// Events plus per-event potential and set-membership snapshots, as
    /// required by the dual-feasibility and potential audits.
    #[default]
    Full,
}

/// Engine configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GdkConfig {
    /// Dual growth rate; `None` selects the default `1/(gamma k^2)`.
    /// The cost-accounting audit refuses runs made with an override.
    pub rate_override: Option<Rational>,
    pub trace_level: TraceLevel,
    /// Event guard: the run aborts after `max_events_factor * m` events.
    /// Termination analysis bounds the true count by `2m`; the guard is a
    /// bug tripwire, not a tuning knob.
    pub max_events_factor: usize,
}

impl Default for GdkConfig {
    fn default() -> Self {
        GdkConfig {
            rate_override: None,
            trace_level: TraceLevel::Full,
            max_events_factor: 4,
        }
    }
}

/// One active (or formerly active) set. Records are immutable once the set
/// dies; members are fixed at birth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActiveSetRecord {
    pub id: usize,
    /// Member request ids, ascending.
    pub members: Vec<u32>,
    /// Free (unmatched) members, ascending; shrinks as groups are carved.
    pub free: Vec<u32>,
    /// Total time this set was active with at least one free member.
    pub g: Rational,
    pub birth: Rational,
    pub birth_event: usize,
    pub death: Option<Rational>,
    pub death_event: Option<usize>,
    /// The two sets merged to create this one; `None` for singletons.
    pub parents: Option<(usize, usize)>,
}

impl ActiveSetRecord {
    /// `sur(S) = |S| mod k`: members left over after maximal grouping.
    pub fn surplus(&self, k: usize) -> usize {
        self.members.len() % k
    }
}

/// A marked (tight) edge: the merge witness for one set union.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkRecord {
    pub u: u32,
    pub v: u32,
    pub time: Rational,
    pub event: usize,
}

/// The frozen dual load of a pair that became internal to one set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrozenEdge {
    /// `Phi(u) + Phi(v)` at the merge instant, in growth-duration units.
    pub load: Rational,
    pub time: Rational,
    pub event: usize,
}

/// One formed group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupRecord {
    /// The k member request ids, ascending.
    pub ids: Vec<u32>,
    /// Match time.
    pub time: Rational,
    /// `d_H` over the members' positions.
    pub dist: Rational,
    /// `sum over members of (time - atime)`.
    pub wait: Rational,
    /// The set the group was carved from.
    pub set: usize,
    /// Index of the event that formed the group.
    pub event: usize,
}

/// What happened at one event instant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventKind {
    /// All arrivals at this instant, in id order.
    Arrivals { ids: Vec<u32> },
    /// One instant's batch of tight-edge merges, plus the indices (into
    /// `RunResult::groups`) of groups carved during the batch.
    TightBatch {
        merges: Vec<MergeRecord>,
        groups: Vec<usize>,
    },
}

/// One executed merge inside a tight batch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeRecord {
    pub u: u32,
    pub v: u32,
    /// Id of the child set created by the merge.
    pub child: usize,
}

/// One trace entry. Snapshots are taken after the event completes and are
/// present only at [`TraceLevel::Full`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEvent {
    pub index: usize,
    pub time: Rational,
    pub kind: EventKind,
    /// Per-request potentials (index = request id; 0 until arrival).
    pub phi: Option<Vec<Rational>>,
    /// Per-request active-set id (index = request id; `None` until arrival).
    pub set_of: Option<Vec<Option<usize>>>,
}

/// Complete outcome of a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub groups: Vec<GroupRecord>,
    pub total_dist: Rational,
    pub total_wait: Rational,
    /// `ALG = total_dist + total_wait`.
    pub total_cost: Rational,
    /// `D' = sum over sets of sur(S) * (k - sur(S)) * r * g_S`.
    pub dual_objective: Rational,
    /// The rate the run used.
    pub rate: Rational,
    /// Full set history; index = set id.
    pub sets: Vec<ActiveSetRecord>,
    pub marks: Vec<MarkRecord>,
    /// Frozen dual loads, keyed by `(min id, max id)`.
    pub frozen: BTreeMap<(u32, u32), FrozenEdge>,
    pub trace: Vec<TraceEvent>,
    pub trace_level: TraceLevel,
    /// Final potentials (index = request id).
    pub final_phi: Vec<Rational>,
}

/// The edge cost the LP objective and tightness thresholds are built from:
/// induced pair distance plus arrival-time gap.
///
/// # Examples
/// ```
/// use kmpmd_core::gdk::opt_cost_edge;
/// use kmpmd_core::instances::{Instance, Request};
/// use kmpmd_core::metrics::{MetricGuards, MetricSpace, SpaceBase};
/// use kmpmd_core::numerics::int;
///
/// let space = MetricSpace::new(
///     SpaceBase::Line { coords: [0, 1].map(int).to_vec() },
///     2, int(1), &MetricGuards::default(),
/// ).unwrap();
/// let inst = Instance::new(space, vec![
///     Request { id: 0, atime: int(0), pos: 0 },
///     Request { id: 1, atime: int(3), pos: 1 },
/// ]).unwrap();
/// assert_eq!(opt_cost_edge(&inst, 0, 1), int(4)); // 1 + |0 - 3|
/// assert_eq!(opt_cost_edge(&inst, 1, 0), int(4));
/// ```
pub fn opt_cost_edge(instance: &Instance, u: u32, v: u32) -> Rational {
    assert_ne!(u, v, "opt_cost_edge needs two distinct requests");
    let ru = instance.request(u);
    let rv = instance.request(v);
    let dist = instance
        .space()
        .induced_pair_distance(ru.pos, rv.pos)
        .expect("validated instance positions");
    let gap = &ru.atime - &rv.atime;
    let gap = if gap < Rational::zero() { -gap } else { gap };
    dist + gap
}

/// The default dual growth rate `1/(gamma k^2)`.
pub fn default_rate(instance: &Instance) -> Rational {
    let k = instance.k() as i64;
    int(1) / (instance.space().gamma() * int(k * k))
}

/// Live engine state; create with [`EngineState::new`], drive with
/// [`EngineState::step`], extract with [`EngineState::into_result`].
#[derive(Debug, Clone)]
pub struct EngineState<'a> {
    instance: &'a Instance,
    config: GdkConfig,
    rate: Rational,
    /// Tightness threshold per pair `(u, v)`, `u < v`, in growth-duration
    /// units: `opt_cost_edge * (1/(gamma k^2)) / r`.
    threshold: BTreeMap<(u32, u32), Rational>,
    now: Rational,
    /// Index of the next unregistered request.
    next_arrival: usize,
    matched: Vec<bool>,
    matched_count: usize,
    phi: Vec<Rational>,
    set_of: Vec<Option<usize>>,
    sets: Vec<ActiveSetRecord>,
    marks: Vec<MarkRecord>,
    frozen: BTreeMap<(u32, u32), FrozenEdge>,
    groups: Vec<GroupRecord>,
    trace: Vec<TraceEvent>,
}

fn key(u: u32, v: u32) -> (u32, u32) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl<'a> EngineState<'a> {
    pub fn new(instance: &'a Instance, config: GdkConfig) -> Result<Self, GdkError> {
        let rate = match &config.rate_override {
            Some(r) if *r <= Rational::zero() => return Err(GdkError::RateNotPositive),
            Some(r) => r.clone(),
            None => default_rate(instance),
        };
        let m = instance.m();
        // threshold = opt_cost * (1/(gamma k^2)) / r; equals opt_cost at the
        // default rate.
        let scale = default_rate(instance) / &rate;
        let mut threshold = BTreeMap::new();
        for u in 0..m {
            for v in (u + 1)..m {
                let (u, v) = (u as u32, v as u32);
                threshold.insert((u, v), opt_cost_edge(instance, u, v) * &scale);
            }
        }
        Ok(EngineState {
            instance,
            config,
            rate,
            threshold,
            now: Rational::zero(),
            next_arrival: 0,
            matched: alloc::vec![false; m],
            matched_count: 0,
            phi: alloc::vec![Rational::zero(); m],
            set_of: alloc::vec![None; m],
            sets: Vec::new(),
            marks: Vec::new(),
            frozen: BTreeMap::new(),
            groups: Vec::new(),
            trace: Vec::new(),
        })
    }

    pub fn is_terminal(&self) -> bool {
        self.next_arrival == self.instance.m() && self.matched_count == self.instance.m()
    }

    pub fn now(&self) -> &Rational {
        &self.now
    }

    pub fn phi(&self, u: u32) -> &Rational {
        &self.phi[u as usize]
    }

    pub fn set_of(&self, u: u32) -> Option<usize> {
        self.set_of[u as usize]
    }

    pub fn sets(&self) -> &[ActiveSetRecord] {
        &self.sets
    }

    pub fn groups(&self) -> &[GroupRecord] {
        &self.groups
    }

    pub fn events(&self) -> &[TraceEvent] {
        &self.trace
    }

    /// Dual load of an arrived pair in growth-duration units: the potential
    /// sum while the pair is cross-set, frozen at the merge instant after.
    pub fn dual_load(&self, u: u32, v: u32) -> Rational {
        if let Some(f) = self.frozen.get(&key(u, v)) {
            f.load.clone()
        } else {
            &self.phi[u as usize] + &self.phi[v as usize]
        }
    }

    /// Processes exactly one event: one instant's arrival batch or one
    /// instant's tight-edge batch.
    pub fn step(&mut self) -> Result<(), GdkError> {
        if self.is_terminal() {
            return Err(GdkError::Terminal);
        }
        let guard = self.config.max_events_factor * self.instance.m();
        if self.trace.len() >= guard {
            return Err(GdkError::InvariantBreach(format!(
                "event guard exceeded: {} events for m = {}",
                self.trace.len(),
                self.instance.m()
            )));
        }

        // Tight edges pending at the current instant are the next event
        // (arrivals at this instant have already been registered).
        let tight = self.collect_tight()?;
        if !tight.is_empty() {
            self.process_tight_batch(tight);
            return Ok(());
        }

        let t_arrival = self
            .instance
            .requests()
            .get(self.next_arrival)
            .map(|r| r.atime.clone());
        let t_tight = self.next_tight_time();
        let target = match (&t_arrival, &t_tight) {
            (Some(a), Some(t)) => core::cmp::min(a, t).clone(),
            (Some(a), None) => a.clone(),
            (None, Some(t)) => t.clone(),
            (None, None) => {
                return Err(GdkError::InvariantBreach(String::from(
                    "no next event although unmatched requests remain",
                )))
            }
        };
        self.advance_to(&target)?;

        // Arrivals take precedence over tight detection at a shared instant.
        if t_arrival.as_ref() == Some(&target) {
            self.process_arrivals();
            return Ok(());
        }
        let tight = self.collect_tight()?;
        if tight.is_empty() {
            return Err(GdkError::InvariantBreach(format!(
                "advanced to {} expecting a tight edge, found none",
                self.now
            )));
        }
        self.process_tight_batch(tight);
        Ok(())
    }

    /// All cross-set arrived pairs with zero slack, ascending `(min, max)`.
    fn collect_tight(&self) -> Result<Vec<(u32, u32)>, GdkError> {
        let mut out = Vec::new();
        for u in 0..self.next_arrival {
            for v in (u + 1)..self.next_arrival {
                let (u, v) = (u as u32, v as u32);
                let (a, b) = (self.set_of[u as usize], self.set_of[v as usize]);
                if a == b {
                    continue;
                }
                let load = &self.phi[u as usize] + &self.phi[v as usize];
                let threshold = &self.threshold[&(u, v)];
                if load > *threshold {
                    return Err(GdkError::InvariantBreach(format!(
                        "negative slack on pair ({u}, {v}) at time {}",
                        self.now
                    )));
                }
                if load == *threshold {
                    out.push((u, v));
                }
            }
        }
        Ok(out)
    }

    /// Earliest future tightness time over growing cross-set pairs.
    fn next_tight_time(&self) -> Option<Rational> {
        let mut best: Option<Rational> = None;
        for u in 0..self.next_arrival {
            for v in (u + 1)..self.next_arrival {
                let (u, v) = (u as u32, v as u32);
                let (a, b) = (self.set_of[u as usize], self.set_of[v as usize]);
                if a == b {
                    continue;
                }
                let growing = |s: Option<usize>| -> i64 {
                    s.map_or(0, |id| i64::from(!self.sets[id].free.is_empty()))
                };
                let pair_rate = growing(a) + growing(b);
                if pair_rate == 0 {
                    continue;
                }
                let load = &self.phi[u as usize] + &self.phi[v as usize];
                let slack = &self.threshold[&(u, v)] - load;
                let t = &self.now + slack / int(pair_rate);
                if best.as_ref().is_none_or(|b| t < *b) {
                    best = Some(t);
                }
            }
        }
        best
    }

    /// Advances the clock, growing `g_S` for every active set with a free
    /// member and `Phi(u)` for every member of such sets.
    fn advance_to(&mut self, target: &Rational) -> Result<(), GdkError> {
        let delta = target - &self.now;
        if delta < Rational::zero() {
            return Err(GdkError::InvariantBreach(format!(
                "time would move backwards: {} -> {target}",
                self.now
            )));
        }
        if delta.is_zero() {
            return Ok(());
        }
        for set in &mut self.sets {
            if set.death.is_none() && !set.free.is_empty() {
                set.g += &delta;
                for &u in &set.members {
                    self.phi[u as usize] += &delta;
                }
            }
        }
        self.now = target.clone();
        Ok(())
    }

    /// Registers every arrival at the current instant, in id order, each as
    /// a fresh singleton active set.
    fn process_arrivals(&mut self) {
        let mut ids = Vec::new();
        while let Some(r) = self.instance.requests().get(self.next_arrival) {
            if r.atime != self.now {
                break;
            }
            let set_id = self.sets.len();
            self.sets.push(ActiveSetRecord {
                id: set_id,
                members: alloc::vec![r.id],
                free: alloc::vec![r.id],
                g: Rational::zero(),
                birth: self.now.clone(),
                birth_event: self.trace.len(),
                death: None,
                death_event: None,
                parents: None,
            });
            self.set_of[r.id as usize] = Some(set_id);
            ids.push(r.id);
            self.next_arrival += 1;
        }
        self.push_event(EventKind::Arrivals { ids });
    }

    /// Executes one instant's batch of merges. The collected pairs are
    /// processed in ascending order; each is re-checked for cross-set
    /// membership since an earlier merge in the batch may have united its
    /// endpoints. Dual loads do not change during the batch (potentials
    /// move only with time), so the collected batch is exhaustive for this
    /// instant.
    fn process_tight_batch(&mut self, pairs: Vec<(u32, u32)>) {
        let mut merges = Vec::new();
        let mut new_groups = Vec::new();
        for (u, v) in pairs {
            let a = self.set_of[u as usize].expect("arrived");
            let b = self.set_of[v as usize].expect("arrived");
            if a == b {
                continue;
            }
            let event = self.trace.len();
            self.marks.push(MarkRecord {
                u,
                v,
                time: self.now.clone(),
                event,
            });
            // Freeze every pair that becomes internal through this merge.
            for &x in &self.sets[a].members {
                for &y in &self.sets[b].members {
                    let load = &self.phi[x as usize] + &self.phi[y as usize];
                    let prev = self.frozen.insert(
                        key(x, y),
                        FrozenEdge {
                            load,
                            time: self.now.clone(),
                            event,
                        },
                    );
                    debug_assert!(prev.is_none(), "pair frozen twice");
                }
            }
            let child = self.sets.len();
            let members = merge_sorted(&self.sets[a].members, &self.sets[b].members);
            let free = merge_sorted(&self.sets[a].free, &self.sets[b].free);
            for &x in &members {
                self.set_of[x as usize] = Some(child);
            }
            self.sets[a].death = Some(self.now.clone());
            self.sets[a].death_event = Some(event);
            self.sets[b].death = Some(self.now.clone());
            self.sets[b].death_event = Some(event);
            self.sets.push(ActiveSetRecord {
                id: child,
                members,
                free,
                g: Rational::zero(),
                birth: self.now.clone(),
                birth_event: event,
                death: None,
                death_event: None,
                parents: Some((a, b)),
            });
            merges.push(MergeRecord { u, v, child });
            self.carve(child, &mut new_groups);
        }
        debug_assert!(!merges.is_empty(), "tight batch executed no merge");
        self.push_event(EventKind::TightBatch {
            merges,
            groups: new_groups,
        });
    }

    /// Carves groups out of a set while at least `k` members are free,
    /// extracting the `k` free requests with smallest `(atime, id)`.
    fn carve(&mut self, set_id: usize, new_groups: &mut Vec<usize>) {
        let k = self.instance.k();
        while self.sets[set_id].free.len() >= k {
            let mut by_arrival: Vec<u32> = self.sets[set_id].free.clone();
            by_arrival.sort_by(|&a, &b| {
                let ta = &self.instance.request(a).atime;
                let tb = &self.instance.request(b).atime;
                ta.cmp(tb).then(a.cmp(&b))
            });
            let mut ids: Vec<u32> = by_arrival[..k].to_vec();
            ids.sort_unstable();
            self.sets[set_id].free.retain(|x| !ids.contains(x));
            let positions: Vec<usize> =
                ids.iter().map(|&x| self.instance.request(x).pos).collect();
            let dist = self
                .instance
                .space()
                .k_distance(&positions)
                .expect("validated instance positions");
            let mut wait = Rational::zero();
            for &x in &ids {
                wait += &self.now - &self.instance.request(x).atime;
                self.matched[x as usize] = true;
            }
            self.matched_count += k;
            new_groups.push(self.groups.len());
            self.groups.push(GroupRecord {
                ids,
                time: self.now.clone(),
                dist,
                wait,
                set: set_id,
                event: self.trace.len(),
            });
        }
    }

    fn push_event(&mut self, kind: EventKind) {
        let (phi, set_of) = match self.config.trace_level {
            TraceLevel::Full => (Some(self.phi.clone()), Some(self.set_of.clone())),
            TraceLevel::Summary => (None, None),
        };
        self.trace.push(TraceEvent {
            index: self.trace.len(),
            time: self.now.clone(),
            kind,
            phi,
            set_of,
        });
    }

    /// Finalizes a terminal run into a [`RunResult`].
    pub fn into_result(self) -> Result<RunResult, GdkError> {
        if !self.is_terminal() {
            return Err(GdkError::InvariantBreach(String::from(
                "into_result called before termination",
            )));
        }
        let k = self.instance.k();
        let mut total_dist = Rational::zero();
        let mut total_wait = Rational::zero();
        for g in &self.groups {
            total_dist += &g.dist;
            total_wait += &g.wait;
        }
        let total_cost = &total_dist + &total_wait;
        let mut dual = Rational::zero();
        for set in &self.sets {
            let sur = set.surplus(k);
            dual += int((sur * (k - sur)) as i64) * &self.rate * &set.g;
        }
        Ok(RunResult {
            groups: self.groups,
            total_dist,
            total_wait,
            total_cost,
            dual_objective: dual,
            rate: self.rate,
            sets: self.sets,
            marks: self.marks,
            frozen: self.frozen,
            trace: self.trace,
            trace_level: self.config.trace_level,
            final_phi: self.phi,
        })
    }
}

fn merge_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Runs the engine to termination.
pub fn run(instance: &Instance, config: GdkConfig) -> Result<RunResult, GdkError> {
    let mut state = EngineState::new(instance, config)?;
    while !state.is_terminal() {
        state.step()?;
    }
    state.into_result()
}

/// Outcome of one audit. Violations carry human-readable witnesses; `notes`
/// carry informational extras such as the worst observed slack.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    pub name: &'static str,
    pub passed: bool,
    pub checks: u64,
    pub violations: Vec<String>,
    pub notes: Vec<String>,
}

impl AuditReport {
    pub fn new(name: &'static str) -> Self {
        AuditReport {
            name,
            passed: true,
            checks: 0,
            violations: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Records a failed check; at most 16 witnesses are retained.
    pub fn violate(&mut self, witness: String) {
        self.passed = false;
        if self.violations.len() < 16 {
            self.violations.push(witness);
        }
    }
}

/// Checks dual feasibility at every event time and at termination: for
/// every arrived pair, `r * dualload(e) <= (1/(gamma k^2)) * opt_cost(e)`.
/// Reports the worst (smallest) slack observed. Requires a full trace.
pub fn audit_dual_feasibility(
    result: &RunResult,
    instance: &Instance,
) -> Result<AuditReport, GdkError> {
    if result.trace_level != TraceLevel::Full {
        return Err(GdkError::TraceTooCoarse);
    }
    let mut report = AuditReport::new("dual_feasibility");
    let bound_rate = default_rate(instance);
    let mut worst: Option<(Rational, (u32, u32), usize)> = None;
    for event in &result.trace {
        let phi = event.phi.as_ref().expect("full trace");
        let set_of = event.set_of.as_ref().expect("full trace");
        for u in 0..instance.m() {
            for v in (u + 1)..instance.m() {
                let (u, v) = (u as u32, v as u32);
                if instance.request(v).atime > event.time {
                    break;
                }
                let load = match (set_of[u as usize], set_of[v as usize]) {
                    (Some(a), Some(b)) if a == b => {
                        result.frozen[&(u, v)].load.clone()
                    }
                    _ => &phi[u as usize] + &phi[v as usize],
                };
                let lhs = &result.rate * load;
                let rhs = &bound_rate * opt_cost_edge(instance, u, v);
                report.checks += 1;
                if lhs > rhs {
                    report.violate(format!(
                        "pair ({u}, {v}) at event {} (time {}): dual load {lhs} exceeds {rhs}",
                        event.index, event.time
                    ));
                }
                let slack = rhs - lhs;
                if worst.as_ref().is_none_or(|(w, _, _)| slack < *w) {
                    worst = Some((slack, (u, v), event.index));
                }
            }
        }
    }
    if let Some((slack, (u, v), event)) = worst {
        report
            .notes
            .push(format!("worst slack {slack} on pair ({u}, {v}) at event {event}"));
    }
    Ok(report)
}

/// Checks the potential identity at every event time: `Phi(u)` equals
/// elapsed time since arrival while `u` is unmatched, and never exceeds it.
/// Requires a full trace.
pub fn audit_potential_identity(
    result: &RunResult,
    instance: &Instance,
) -> Result<AuditReport, GdkError> {
    if result.trace_level != TraceLevel::Full {
        return Err(GdkError::TraceTooCoarse);
    }
    let mut report = AuditReport::new("potential_identity");
    // Event index at which each request was matched.
    let mut matched_at = alloc::vec![usize::MAX; instance.m()];
    for g in &result.groups {
        for &u in &g.ids {
            matched_at[u as usize] = g.event;
        }
    }
    for event in &result.trace {
        let phi = event.phi.as_ref().expect("full trace");
        for r in instance.requests() {
            if r.atime > event.time {
                break;
            }
            let elapsed = &event.time - &r.atime;
            let p = &phi[r.id as usize];
            report.checks += 1;
            if matched_at[r.id as usize] > event.index {
                if *p != elapsed {
                    report.violate(format!(
                        "request {} unmatched at event {} (time {}): Phi = {p}, elapsed = {elapsed}",
                        r.id, event.index, event.time
                    ));
                }
            } else if *p > elapsed {
                report.violate(format!(
                    "request {} matched at event {} (time {}): Phi = {p} exceeds elapsed {elapsed}",
                    r.id, event.index, event.time
                ));
            }
        }
    }
    Ok(report)
}

/// Checks that the marked edges internal to every set in the history form a
/// spanning tree of that set, and that for every formed group the tree path
/// between any two members crosses the boundary of any historical set at
/// most twice.
pub fn audit_spanning_forest(result: &RunResult) -> Result<AuditReport, GdkError> {
    let mut report = AuditReport::new("spanning_forest");
    for set in &result.sets {
        let internal: Vec<&MarkRecord> = result
            .marks
            .iter()
            .filter(|mk| {
                set.members.binary_search(&mk.u).is_ok()
                    && set.members.binary_search(&mk.v).is_ok()
            })
            .collect();
        report.checks += 1;
        if internal.len() != set.members.len() - 1 {
            report.violate(format!(
                "set {} has {} internal marks for {} members",
                set.id,
                internal.len(),
                set.members.len()
            ));
            continue;
        }
        // Connectivity via union-find over the member list.
        let index_of = |u: u32| set.members.binary_search(&u).expect("member");
        let mut parent: Vec<usize> = (0..set.members.len()).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            if parent[x] != x {
                let root = find(parent, parent[x]);
                parent[x] = root;
            }
            parent[x]
        }
        let mut components = set.members.len();
        for mk in &internal {
            let (a, b) = (
                find(&mut parent, index_of(mk.u)),
                find(&mut parent, index_of(mk.v)),
            );
            if a != b {
                parent[a] = b;
                components -= 1;
            }
        }
        if components != 1 {
            report.violate(format!(
                "internal marks do not connect set {} ({components} components)",
                set.id
            ));
        }
    }

    // Path-crossing bound: within the carve set's spanning tree, the path
    // between two group members crosses any historical set boundary at most
    // twice.
    for group in &result.groups {
        let tree_set = &result.sets[group.set];
        let adjacency = tree_adjacency(tree_set, &result.marks);
        for i in 0..group.ids.len() {
            for j in (i + 1)..group.ids.len() {
                let path = match tree_path(&adjacency, group.ids[i], group.ids[j]) {
                    Some(p) => p,
                    None => {
                        report.violate(format!(
                            "no tree path between {} and {} in set {}",
                            group.ids[i], group.ids[j], group.set
                        ));
                        continue;
                    }
                };
                for other in &result.sets {
                    let crossings = path
                        .windows(2)
                        .filter(|e| {
                            let inside_a = other.members.binary_search(&e[0]).is_ok();
                            let inside_b = other.members.binary_search(&e[1]).is_ok();
                            inside_a != inside_b
                        })
                        .count();
                    report.checks += 1;
                    if crossings > 2 {
                        report.violate(format!(
                            "path {} - {} in set {} crosses boundary of set {} {crossings} times",
                            group.ids[i], group.ids[j], group.set, other.id
                        ));
                    }
                }
            }
        }
    }
    Ok(report)
}

fn tree_adjacency(set: &ActiveSetRecord, marks: &[MarkRecord]) -> BTreeMap<u32, Vec<u32>> {
    let mut adjacency: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for mk in marks {
        if set.members.binary_search(&mk.u).is_ok() && set.members.binary_search(&mk.v).is_ok() {
            adjacency.entry(mk.u).or_default().push(mk.v);
            adjacency.entry(mk.v).or_default().push(mk.u);
        }
    }
    adjacency
}

/// Path between two vertices in a tree given by adjacency lists (BFS with
/// parent pointers); `None` if disconnected.
fn tree_path(adjacency: &BTreeMap<u32, Vec<u32>>, from: u32, to: u32) -> Option<Vec<u32>> {
    if from == to {
        return Some(alloc::vec![from]);
    }
    let mut parent: BTreeMap<u32, u32> = BTreeMap::new();
    let mut queue = alloc::collections::VecDeque::new();
    queue.push_back(from);
    parent.insert(from, from);
    while let Some(x) = queue.pop_front() {
        if x == to {
            let mut path = alloc::vec![to];
            let mut cur = to;
            while cur != from {
                cur = parent[&cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for &y in adjacency.get(&x).into_iter().flatten() {
            parent.entry(y).or_insert_with(|| {
                queue.push_back(y);
                x
            });
        }
    }
    None
}

/// Checks the cost accounting of a completed default-rate run: the waiting
/// identity `total_wait = sum over sets of sur(S) * g_S`, the general bound
/// `ALG <= (4mk + k^2) * gamma * D'`, and on line and d_max spaces the
/// sharper `ALG <= (4m + k^2) * D'`.
pub fn audit_cost_accounting(
    result: &RunResult,
    instance: &Instance,
) -> Result<AuditReport, GdkError> {
    if result.rate != default_rate(instance) {
        return Err(GdkError::NonDefaultRate);
    }
    let mut report = AuditReport::new("cost_accounting");
    let k = instance.k();
    let m = instance.m();

    let mut waiting = Rational::zero();
    for set in &result.sets {
        waiting += int(set.surplus(k) as i64) * &set.g;
    }
    report.checks += 1;
    if waiting != result.total_wait {
        report.violate(format!(
            "waiting identity fails: sum sur(S) * g_S = {waiting}, total waiting = {}",
            result.total_wait
        ));
    }

    let gamma = instance.space().gamma();
    let general = int((4 * m * k + k * k) as i64) * gamma * &result.dual_objective;
    report.checks += 1;
    if result.total_cost > general {
        report.violate(format!(
            "general bound fails: ALG = {} > (4mk + k^2) gamma D' = {general}",
            result.total_cost
        ));
    }
    report
        .notes
        .push(format!("ALG = {}, (4mk + k^2) gamma D' = {general}", result.total_cost));

    if matches!(
        instance.space().kind(),
        SpaceKind::LineDiameter | SpaceKind::DmaxOverBase
    ) {
        let sharper = int((4 * m + k * k) as i64) * &result.dual_objective;
        report.checks += 1;
        if result.total_cost > sharper {
            report.violate(format!(
                "diameter bound fails: ALG = {} > (4m + k^2) D' = {sharper}",
                result.total_cost
            ));
        }
        report
            .notes
            .push(format!("(4m + k^2) D' = {sharper}"));
    }

    // D' recomputed from the set history must match the engine's figure.
    let mut dual = Rational::zero();
    for set in &result.sets {
        let sur = set.surplus(k);
        dual += int((sur * (k - sur)) as i64) * &result.rate * &set.g;
    }
    report.checks += 1;
    if dual != result.dual_objective {
        report.violate(format!(
            "dual objective mismatch: recomputed {dual}, reported {}",
            result.dual_objective
        ));
    }
    Ok(report)
}
