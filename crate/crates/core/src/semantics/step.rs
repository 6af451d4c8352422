//! Successor generation.
//!
//! Moves are unit delays, internal edges, and broadcast sends. A broadcast
//! sender applies its update first; every other process with an enabled
//! receiving edge on the channel (guards evaluated after the sender's update)
//! then takes one such edge, in ascending process order. Processes without
//! one miss the message. While any process sits in a committed location,
//! only committed processes may initiate a move and time cannot pass. A move
//! whose resulting state violates a location invariant is disabled.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automata::EvalError;

use super::network::{BoolE, CSync, IntE, Step, Target};
use super::{Network, SystemState};

/// One edge taken by one process, with the value bound by the edge's select.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeRef {
    pub process: usize,
    pub edge: usize,
    pub select: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TransitionLabel {
    Delay,
    Internal(EdgeRef),
    Broadcast { channel: usize, sender: EdgeRef, receivers: Vec<EdgeRef> },
}

impl TransitionLabel {
    /// The process that initiated the move; `None` for delays.
    pub fn initiator(&self) -> Option<usize> {
        match self {
            TransitionLabel::Delay => None,
            TransitionLabel::Internal(e) => Some(e.process),
            TransitionLabel::Broadcast { sender, .. } => Some(sender.process),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

struct Ctx<'a> {
    vars: &'a [i64],
    clocks: &'a [i64],
    select: i64,
}

impl IntE {
    fn eval(&self, c: &Ctx<'_>) -> i64 {
        match self {
            IntE::Lit(v) => *v,
            IntE::Slot(s) => c.vars[*s],
            IntE::Dyn { base, stride } => c.vars[base + c.select as usize * stride],
            IntE::Clock(k) => c.clocks[*k],
            IntE::Select => c.select,
            IntE::Add(a, b) => a.eval(c) + b.eval(c),
            IntE::Sub(a, b) => a.eval(c) - b.eval(c),
        }
    }
}

impl BoolE {
    fn eval(&self, c: &Ctx<'_>) -> bool {
        match self {
            BoolE::Lit(b) => *b,
            BoolE::Cmp(op, a, b) => op.apply(a.eval(c), b.eval(c)),
            BoolE::Not(a) => !a.eval(c),
            BoolE::And(a, b) => a.eval(c) && b.eval(c),
            BoolE::Or(a, b) => a.eval(c) || b.eval(c),
            BoolE::Imply(a, b) => !a.eval(c) || b.eval(c),
        }
    }
}

impl Network {
    pub fn initial_state(&self) -> SystemState {
        SystemState {
            locations: self.processes.iter().map(|p| p.initial).collect(),
            vars: self.var_slots.iter().map(|s| s.initial).collect(),
            clocks: vec![0; self.clock_slots.len()],
        }
    }

    pub fn is_committed_active(&self, s: &SystemState) -> bool {
        s.locations.iter().enumerate().any(|(p, &l)| self.processes[p].locations[l].committed)
    }

    fn invariants_hold(&self, s: &SystemState) -> bool {
        let ctx = Ctx { vars: &s.vars, clocks: &s.clocks, select: 0 };
        s.locations.iter().enumerate().all(|(p, &l)| self.processes[p].locations[l].invariant.eval(&ctx))
    }

    fn guard_holds(&self, s: &SystemState, e: EdgeRef) -> bool {
        let edge = &self.processes[e.process].edges[e.edge];
        let ctx = Ctx { vars: &s.vars, clocks: &s.clocks, select: e.select.unwrap_or(0) };
        edge.guard.eval(&ctx)
    }

    /// Applies the update of `e` to `s` in place and moves its process.
    fn take_edge(&self, s: &mut SystemState, e: EdgeRef) -> Result<(), EvalError> {
        let edge = &self.processes[e.process].edges[e.edge];
        let select = e.select.unwrap_or(0);
        for step in &edge.steps {
            match step {
                Step::Assign(target, value) => {
                    let v = value.eval(&Ctx { vars: &s.vars, clocks: &s.clocks, select });
                    let slot = match *target {
                        Target::Slot(slot) => slot,
                        Target::Dyn { base, stride } => base + select as usize * stride,
                    };
                    let info = &self.var_slots[slot];
                    if !info.range.contains(v) {
                        return Err(EvalError::OutOfRange {
                            target: info.name.clone(),
                            value: v,
                            lo: info.range.lo,
                            hi: info.range.hi,
                        });
                    }
                    s.vars[slot] = v;
                }
                Step::Reset(k) => s.clocks[*k] = 0,
            }
        }
        s.locations[e.process] = edge.target;
        Ok(())
    }

    /// Advances every clock by one unit (saturating), unless a committed
    /// location is active or a location invariant would be violated.
    pub fn apply_delay(&self, s: &SystemState) -> Option<SystemState> {
        if self.is_committed_active(s) {
            return None;
        }
        let mut next = s.clone();
        for (k, v) in next.clocks.iter_mut().enumerate() {
            *v = (*v + 1).min(self.clock_slots[k].ceiling);
        }
        self.invariants_hold(&next).then_some(next)
    }

    /// Enabled instances of `process`'s edges leaving its current location,
    /// filtered by sync kind.
    fn enabled<'a>(
        &'a self,
        s: &'a SystemState,
        process: usize,
        want: impl Fn(CSync) -> bool + 'a,
    ) -> impl Iterator<Item = EdgeRef> + 'a {
        let p = &self.processes[process];
        p.outgoing[s.locations[process]].iter().flat_map(move |&edge| {
            let e = &p.edges[edge];
            let keep = want(e.sync);
            e.select_values()
                .filter(move |_| keep)
                .map(move |select| EdgeRef { process, edge, select })
                .filter(move |r| self.guard_holds(s, *r))
        })
    }

    /// Fires the broadcast send `sender` from `s`. Returns one successor per
    /// combination of receiver choices whose result satisfies all invariants.
    pub fn fire_broadcast(
        &self,
        s: &SystemState,
        sender: EdgeRef,
    ) -> Result<Vec<(TransitionLabel, SystemState)>, StepError> {
        let proc = self
            .processes
            .get(sender.process)
            .ok_or_else(|| StepError::Precondition(format!("no process {}", sender.process)))?;
        let edge = proc
            .edges
            .get(sender.edge)
            .ok_or_else(|| StepError::Precondition(format!("no edge {} in {}", sender.edge, proc.name)))?;
        let CSync::Send(channel) = edge.sync else {
            return Err(StepError::Precondition(format!("edge {} of {} is not a send", sender.edge, proc.name)));
        };
        if edge.source != s.locations[sender.process] {
            return Err(StepError::Precondition(format!("{} is not at the edge source", proc.name)));
        }
        if edge.select.is_some() != sender.select.is_some()
            || sender.select.is_some_and(|v| !edge.select.unwrap().contains(v))
        {
            return Err(StepError::Precondition("select value does not match the edge".into()));
        }
        if !self.guard_holds(s, sender) {
            return Err(StepError::Precondition(format!("guard of edge {} of {} is false", sender.edge, proc.name)));
        }
        let mut out = Vec::new();
        self.broadcast_into(s, sender, channel, &mut out)?;
        Ok(out)
    }

    fn broadcast_into(
        &self,
        s: &SystemState,
        sender: EdgeRef,
        channel: usize,
        out: &mut Vec<(TransitionLabel, SystemState)>,
    ) -> Result<(), EvalError> {
        let mut after_send = s.clone();
        self.take_edge(&mut after_send, sender)?;

        let choices: Vec<Vec<EdgeRef>> = (0..self.processes.len())
            .filter(|&q| q != sender.process)
            .map(|q| self.enabled(&after_send, q, |k| k == CSync::Receive(channel)).collect::<Vec<_>>())
            .filter(|c| !c.is_empty())
            .collect();

        // Odometer over the cross product of receiver choices.
        let mut pick = vec![0usize; choices.len()];
        loop {
            let receivers: Vec<EdgeRef> = choices.iter().zip(&pick).map(|(c, &i)| c[i]).collect();
            let mut next = after_send.clone();
            for r in &receivers {
                self.take_edge(&mut next, *r)?;
            }
            if self.invariants_hold(&next) {
                out.push((TransitionLabel::Broadcast { channel, sender, receivers }, next));
            }
            let mut i = choices.len();
            loop {
                if i == 0 {
                    return Ok(());
                }
                i -= 1;
                pick[i] += 1;
                if pick[i] < choices[i].len() {
                    break;
                }
                pick[i] = 0;
            }
        }
    }

    /// Every enabled move from `s`, ordered by initiating process, then edge
    /// declaration order and select value, with the delay move last.
    pub fn successors(&self, s: &SystemState) -> Result<Vec<(TransitionLabel, SystemState)>, EvalError> {
        let committed = self.is_committed_active(s);
        let mut out = Vec::new();
        for pid in 0..self.processes.len() {
            let p = &self.processes[pid];
            if committed && !p.locations[s.locations[pid]].committed {
                continue;
            }
            let initiating: Vec<EdgeRef> = self.enabled(s, pid, |k| !matches!(k, CSync::Receive(_))).collect();
            for e in initiating {
                match p.edges[e.edge].sync {
                    CSync::None => {
                        let mut next = s.clone();
                        self.take_edge(&mut next, e)?;
                        if self.invariants_hold(&next) {
                            out.push((TransitionLabel::Internal(e), next));
                        }
                    }
                    CSync::Send(ch) => self.broadcast_into(s, e, ch, &mut out)?,
                    CSync::Receive(_) => unreachable!("filtered above"),
                }
            }
        }
        if let Some(next) = self.apply_delay(s) {
            out.push((TransitionLabel::Delay, next));
        }
        Ok(out)
    }

    fn describe_edge(&self, e: &EdgeRef) -> String {
        let p = &self.processes[e.process];
        let edge = &p.edges[e.edge];
        let tdef = &self.def.templates[p.template].edges[e.edge];
        let mut s = format!("{}: {} -> {}", p.name, p.locations[edge.source].name, p.locations[edge.target].name);
        if let Some(tag) = &tdef.tag {
            s.push_str(&format!(" [{tag}]"));
        }
        if let (Some(v), Some(sel)) = (e.select, &tdef.select) {
            s.push_str(&format!(" ({} = {v})", sel.name));
        }
        s
    }

    /// One-line rendering of a transition label.
    pub fn describe_label(&self, label: &TransitionLabel) -> String {
        match label {
            TransitionLabel::Delay => "delay 1".to_string(),
            TransitionLabel::Internal(e) => format!("internal {}", self.describe_edge(e)),
            TransitionLabel::Broadcast { channel, sender, receivers } => {
                let recv = if receivers.is_empty() {
                    "dropped (no receiver)".to_string()
                } else {
                    receivers.iter().map(|r| self.describe_edge(r)).collect::<Vec<_>>().join("; ")
                };
                format!("{}! {} => {}", self.channels[*channel], self.describe_edge(sender), recv)
            }
        }
    }
}
