//! Breadth-first exploration, verdicts and trace reconstruction.
//!
//! The visited set maps each [`StateKey`] to the index of its BFS parent and
//! the position of the generating move in the parent's successor list.
//! Traces are rebuilt by regenerating successors along that path and are
//! replayed before being returned.

use std::time::{Duration, Instant};

use indexmap::map::Entry;
use indexmap::IndexMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automata::EvalError;
use crate::property::{ElaboratedProperty, PathQuantifier};
use crate::semantics::{Network, StateKey, SystemState, TransitionLabel};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub max_states: usize,
    pub max_depth: Option<usize>,
    pub time_budget: Option<Duration>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_states: 5_000_000, max_depth: None, time_budget: None }
    }
}

impl Limits {
    pub fn with_max_states(max_states: usize) -> Self {
        Limits { max_states, ..Limits::default() }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Sequential,
    /// Level-synchronous: successors of a BFS level are computed in parallel
    /// and merged in the sequential order, so results are identical.
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitHit {
    MaxStates,
    MaxDepth,
    TimeBudget,
}

/// `states[0]` is the initial state; `labels[k]` leads from `states[k]` to
/// `states[k + 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub states: Vec<SystemState>,
    pub labels: Vec<TransitionLabel>,
}

impl Trace {
    /// Number of transitions.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn last_state(&self) -> &SystemState {
        self.states.last().expect("a trace has at least one state")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Holds,
    Violated(Trace),
    Reachable(Trace),
    NotReachable,
    Inconclusive { limit: LimitHit, states_explored: usize },
}

impl Verdict {
    pub fn trace(&self) -> Option<&Trace> {
        match self {
            Verdict::Violated(t) | Verdict::Reachable(t) => Some(t),
            _ => None,
        }
    }

    /// Lower-case keyword: `holds`, `violated`, `reachable`, `unreachable`
    /// or `inconclusive`.
    pub fn keyword(&self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Violated(_) => "violated",
            Verdict::Reachable(_) => "reachable",
            Verdict::NotReachable => "unreachable",
            Verdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateSpaceStats {
    /// Distinct states discovered.
    pub states: usize,
    /// Successor edges generated from expanded states.
    pub transitions: usize,
    /// Depth of the deepest discovered state.
    pub max_depth: usize,
    /// Largest number of states on one BFS level.
    pub peak_frontier: usize,
    #[serde(skip)]
    pub elapsed: Duration,
    /// Whether the whole reachable set was explored.
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub verdict: Verdict,
    pub stats: StateSpaceStats,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("evaluation failed during exploration: {0}")]
    Eval(#[from] EvalError),
    #[error("internal error: reconstructed trace does not replay")]
    TraceReplay,
}

enum Stop {
    Found(usize),
    Limit(LimitHit),
    Exhausted,
}

struct Search<'a> {
    net: &'a Network,
    visited: IndexMap<StateKey, (u32, u32)>,
    stats: StateSpaceStats,
}

type Expanded = Result<Vec<(u32, StateKey, bool)>, EvalError>;

impl<'a> Search<'a> {
    fn expand(net: &Network, key: &StateKey, target: &(dyn Fn(&SystemState) -> bool + Sync)) -> Expanded {
        let s = net.decode(key).expect("visited keys decode");
        Ok(net
            .successors(&s)?
            .into_iter()
            .enumerate()
            .map(|(k, (_, next))| (k as u32, net.encode(&next), target(&next)))
            .collect())
    }

    fn run(
        &mut self,
        target: &(dyn Fn(&SystemState) -> bool + Sync),
        limits: &Limits,
        mode: Mode,
    ) -> Result<Stop, EvalError> {
        let start = Instant::now();
        let s0 = self.net.initial_state();
        self.visited.insert(self.net.encode(&s0), (u32::MAX, 0));
        self.stats.states = 1;
        self.stats.peak_frontier = 1;
        if target(&s0) {
            return Ok(Stop::Found(0));
        }
        let (mut level_start, mut level_end, mut depth) = (0usize, 1usize, 0usize);
        const CHUNK: usize = 4096;
        while level_start < level_end {
            if limits.max_depth.is_some_and(|d| depth >= d) {
                return Ok(Stop::Limit(LimitHit::MaxDepth));
            }
            let mut at = level_start;
            while at < level_end {
                if limits.time_budget.is_some_and(|b| start.elapsed() > b) {
                    return Ok(Stop::Limit(LimitHit::TimeBudget));
                }
                let chunk_end = (at + CHUNK).min(level_end);
                let keys: Vec<&StateKey> = (at..chunk_end).map(|i| self.visited.get_index(i).unwrap().0).collect();
                let net = self.net;
                let batch: Vec<Expanded> = match mode {
                    Mode::Sequential => keys.into_iter().map(|k| Self::expand(net, k, target)).collect(),
                    Mode::Parallel => keys.into_par_iter().map(|k| Self::expand(net, k, target)).collect(),
                };
                for (idx, succs) in (at..chunk_end).zip(batch) {
                    let succs = succs?;
                    for (k, key, hit) in succs {
                        self.stats.transitions += 1;
                        if let Entry::Vacant(v) = self.visited.entry(key) {
                            if self.stats.states >= limits.max_states {
                                return Ok(Stop::Limit(LimitHit::MaxStates));
                            }
                            v.insert((idx as u32, k));
                            self.stats.states += 1;
                            self.stats.max_depth = depth + 1;
                            if hit {
                                return Ok(Stop::Found(self.stats.states - 1));
                            }
                        }
                    }
                }
                at = chunk_end;
            }
            level_start = level_end;
            level_end = self.visited.len();
            self.stats.peak_frontier = self.stats.peak_frontier.max(level_end - level_start);
            depth += 1;
        }
        self.stats.complete = true;
        Ok(Stop::Exhausted)
    }

    fn trace_to(&self, idx: usize) -> Result<Trace, CheckError> {
        let mut path = Vec::new();
        let mut at = idx;
        while at != 0 {
            let (parent, k) = self.visited[at];
            path.push(k as usize);
            at = parent as usize;
        }
        path.reverse();
        let mut states = vec![self.net.initial_state()];
        let mut labels = Vec::with_capacity(path.len());
        for k in path {
            let (label, next) = self.net.successors(states.last().unwrap())?.swap_remove(k);
            labels.push(label);
            states.push(next);
        }
        let trace = Trace { states, labels };
        let expected = self.net.decode(self.visited.get_index(idx).unwrap().0).expect("visited keys decode");
        if *trace.last_state() != expected || !replay(self.net, &trace) {
            return Err(CheckError::TraceReplay);
        }
        Ok(trace)
    }
}

fn search<'a>(
    net: &'a Network,
    target: &(dyn Fn(&SystemState) -> bool + Sync),
    limits: &Limits,
    mode: Mode,
) -> Result<(Search<'a>, Stop), CheckError> {
    let mut s = Search {
        net,
        visited: IndexMap::new(),
        stats: StateSpaceStats {
            states: 0,
            transitions: 0,
            max_depth: 0,
            peak_frontier: 0,
            elapsed: Duration::ZERO,
            complete: false,
        },
    };
    let start = Instant::now();
    let stop = s.run(target, limits, mode)?;
    s.stats.elapsed = start.elapsed();
    Ok((s, stop))
}

/// Checks `prop` by breadth-first search, sequentially.
pub fn check(net: &Network, prop: &ElaboratedProperty, limits: &Limits) -> Result<CheckOutcome, CheckError> {
    check_with(net, prop, limits, Mode::Sequential)
}

/// `A[] p` searches for a state falsifying `p`, `E<> p` for one satisfying
/// it. The first hit is depth-minimal, so traces are shortest.
pub fn check_with(
    net: &Network,
    prop: &ElaboratedProperty,
    limits: &Limits,
    mode: Mode,
) -> Result<CheckOutcome, CheckError> {
    let target = |s: &SystemState| prop.is_target(s);
    let (search, stop) = search(net, &target, limits, mode)?;
    let verdict = match stop {
        Stop::Found(idx) => {
            let trace = search.trace_to(idx)?;
            if !prop.is_target(trace.last_state()) {
                return Err(CheckError::TraceReplay);
            }
            match prop.quantifier {
                PathQuantifier::Invariant => Verdict::Violated(trace),
                PathQuantifier::Reach => Verdict::Reachable(trace),
            }
        }
        Stop::Limit(limit) => Verdict::Inconclusive { limit, states_explored: search.stats.states },
        Stop::Exhausted => match prop.quantifier {
            PathQuantifier::Invariant => Verdict::Holds,
            PathQuantifier::Reach => Verdict::NotReachable,
        },
    };
    Ok(CheckOutcome { verdict, stats: search.stats })
}

/// Explores the full reachable set under `limits`. `complete` is false when a
/// limit cut the exploration short.
pub fn explore(net: &Network, limits: &Limits) -> Result<StateSpaceStats, CheckError> {
    explore_with(net, limits, Mode::Sequential)
}

pub fn explore_with(net: &Network, limits: &Limits, mode: Mode) -> Result<StateSpaceStats, CheckError> {
    let (search, _) = search(net, &|_| false, limits, mode)?;
    Ok(search.stats)
}

/// Every reachable state in BFS order, or `None` if `limits` cut the
/// exploration short.
pub fn reachable_states(net: &Network, limits: &Limits) -> Result<Option<Vec<SystemState>>, CheckError> {
    let (search, stop) = search(net, &|_| false, limits, Mode::Sequential)?;
    if !matches!(stop, Stop::Exhausted) {
        return Ok(None);
    }
    Ok(Some(search.visited.keys().map(|k| net.decode(k).expect("visited keys decode")).collect()))
}

/// Whether `trace` starts at the initial state and every step is one of the
/// successors of the state before it.
pub fn replay(net: &Network, trace: &Trace) -> bool {
    if trace.states.len() != trace.labels.len() + 1 || trace.states[0] != net.initial_state() {
        return false;
    }
    trace.labels.iter().enumerate().all(|(k, label)| {
        let (from, to) = (&trace.states[k], &trace.states[k + 1]);
        net.is_valid_state(from)
            && net.successors(from).is_ok_and(|succ| succ.iter().any(|(l, s)| l == label && s == to))
    })
}
