//! Naive successor oracle. Interprets a [`SystemDef`] directly over a
//! name-keyed state, with its own expression evaluator and no slot layout,
//! so it shares no code path with the compiled engine.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use handshake_core::automata::{
    slot_name, CmpOp, Edge, Expr, Ident, Index, IntRange, ProcessTemplate, Sync, SystemDef, UpdateStep, VarRef,
};
use handshake_core::semantics::{EdgeRef, StateView, TransitionLabel};

/// Same naming as [`StateView`]: locals are `Proc.var`, globals bare,
/// clocks `Proc.clock`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NaiveState {
    pub locations: BTreeMap<String, String>,
    pub vars: BTreeMap<String, i64>,
    pub clocks: BTreeMap<String, i64>,
}

impl NaiveState {
    pub fn from_view(v: &StateView) -> Self {
        NaiveState { locations: v.locations.clone(), vars: v.variables.clone(), clocks: v.clocks.clone() }
    }

    pub fn to_view(&self) -> StateView {
        StateView { locations: self.locations.clone(), variables: self.vars.clone(), clocks: self.clocks.clone() }
    }
}

struct Proc<'a> {
    name: String,
    template: &'a ProcessTemplate,
    params: BTreeMap<String, i64>,
}

pub struct Oracle<'a> {
    def: &'a SystemDef,
    procs: Vec<Proc<'a>>,
    ranges: BTreeMap<String, IntRange>,
    ceilings: BTreeMap<String, i64>,
}

type Moves = Vec<(TransitionLabel, NaiveState)>;

struct Scope<'s, 'a> {
    oracle: &'s Oracle<'a>,
    pid: usize,
    select: Option<(&'s Ident, i64)>,
    state: &'s NaiveState,
}

impl Scope<'_, '_> {
    fn proc(&self) -> &Proc<'_> {
        &self.oracle.procs[self.pid]
    }

    fn param(&self, name: &Ident) -> Result<i64, String> {
        if let Some((s, v)) = self.select {
            if s == name {
                return Ok(v);
            }
        }
        self.proc().params.get(name.as_str()).copied().ok_or_else(|| format!("parameter {name}"))
    }

    fn constant(&self, name: &Ident) -> Result<i64, String> {
        self.oracle.def.constant(name.as_str()).ok_or_else(|| format!("constant {name}"))
    }

    fn key(&self, r: &VarRef) -> Result<String, String> {
        let index = match &r.index {
            None => None,
            Some(Index::Lit(v)) => Some(*v),
            Some(Index::Param(p)) => Some(self.param(p)?),
            Some(Index::Const(c)) => Some(self.constant(c)?),
        };
        let flat = slot_name(r.name.as_str(), index, r.field.as_ref().map(Ident::as_str));
        let local = self.proc().template.locals.iter().any(|d| d.name == r.name);
        Ok(if local { format!("{}.{flat}", self.proc().name) } else { flat })
    }

    fn int(&self, e: &Expr) -> Result<i64, String> {
        Ok(match e {
            Expr::Int(v) => *v,
            Expr::Var(r) => {
                let k = self.key(r)?;
                *self.state.vars.get(&k).ok_or_else(|| format!("variable {k}"))?
            }
            Expr::Clock(c) => {
                let k = format!("{}.{c}", self.proc().name);
                *self.state.clocks.get(&k).ok_or_else(|| format!("clock {k}"))?
            }
            Expr::Param(p) => self.param(p)?,
            Expr::Const(c) => self.constant(c)?,
            Expr::Add(a, b) => self.int(a)? + self.int(b)?,
            Expr::Sub(a, b) => self.int(a)? - self.int(b)?,
            other => return Err(format!("not an integer: {other:?}")),
        })
    }

    fn truth(&self, e: &Expr) -> Result<bool, String> {
        Ok(match e {
            Expr::Bool(b) => *b,
            Expr::Cmp(op, a, b) => {
                let (x, y) = (self.int(a)?, self.int(b)?);
                match op {
                    CmpOp::Eq => x == y,
                    CmpOp::Ne => x != y,
                    CmpOp::Lt => x < y,
                    CmpOp::Le => x <= y,
                    CmpOp::Gt => x > y,
                    CmpOp::Ge => x >= y,
                }
            }
            Expr::Not(a) => !self.truth(a)?,
            Expr::And(a, b) => self.truth(a)? & self.truth(b)?,
            Expr::Or(a, b) => self.truth(a)? | self.truth(b)?,
            Expr::Imply(a, b) => !self.truth(a)? | self.truth(b)?,
            other => return Err(format!("not a boolean: {other:?}")),
        })
    }
}

impl<'a> Oracle<'a> {
    pub fn new(def: &'a SystemDef) -> Self {
        let mut ranges = BTreeMap::new();
        let mut ceilings = BTreeMap::new();
        for g in &def.globals {
            for (i, f, spec) in g.slots() {
                ranges.insert(slot_name(g.name.as_str(), i, f.map(Ident::as_str)), spec.range);
            }
        }
        let procs: Vec<Proc<'a>> = def
            .processes
            .iter()
            .enumerate()
            .map(|(pid, inst)| {
                let template = def.template(&inst.template).expect("known template");
                let name = def.process_name(pid);
                for l in &template.locals {
                    for (i, f, spec) in l.slots() {
                        let flat = slot_name(l.name.as_str(), i, f.map(Ident::as_str));
                        ranges.insert(format!("{name}.{flat}"), spec.range);
                    }
                }
                for c in &template.clocks {
                    ceilings.insert(format!("{name}.{}", c.name), c.ceiling);
                }
                let params =
                    template.parameters.iter().zip(&inst.args).map(|(p, v)| (p.name.to_string(), *v)).collect();
                Proc { name, template, params }
            })
            .collect();
        Oracle { def, procs, ranges, ceilings }
    }

    pub fn initial(&self) -> NaiveState {
        let mut s = NaiveState { locations: BTreeMap::new(), vars: BTreeMap::new(), clocks: BTreeMap::new() };
        for g in &self.def.globals {
            for (i, f, spec) in g.slots() {
                s.vars.insert(slot_name(g.name.as_str(), i, f.map(Ident::as_str)), spec.initial);
            }
        }
        for p in &self.procs {
            let init = p.template.locations.iter().find(|l| l.initial).expect("initial location");
            s.locations.insert(p.name.clone(), init.name.to_string());
            for l in &p.template.locals {
                for (i, f, spec) in l.slots() {
                    s.vars.insert(
                        format!("{}.{}", p.name, slot_name(l.name.as_str(), i, f.map(Ident::as_str))),
                        spec.initial,
                    );
                }
            }
            for c in &p.template.clocks {
                s.clocks.insert(format!("{}.{}", p.name, c.name), 0);
            }
        }
        s
    }

    fn at<'s>(&'s self, s: &'s NaiveState, pid: usize) -> &'s str {
        &s.locations[&self.procs[pid].name]
    }

    fn committed(&self, s: &NaiveState, pid: usize) -> bool {
        let here = self.at(s, pid);
        self.procs[pid].template.locations.iter().any(|l| l.name.as_str() == here && l.is_committed())
    }

    fn invariants_hold(&self, s: &NaiveState) -> Result<bool, String> {
        for pid in 0..self.procs.len() {
            let here = self.at(s, pid);
            let loc = self.procs[pid].template.locations.iter().find(|l| l.name.as_str() == here).unwrap();
            let scope = Scope { oracle: self, pid, select: None, state: s };
            if !scope.truth(&loc.invariant)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `(edge index, select)` pairs of `pid` leaving its location whose
    /// guard holds in `s` and whose sync satisfies `want`.
    fn enabled(&self, s: &NaiveState, pid: usize, want: &dyn Fn(&Sync) -> bool) -> Result<Vec<EdgeRef>, String> {
        let mut out = Vec::new();
        let here = self.at(s, pid).to_string();
        for (k, e) in self.procs[pid].template.edges.iter().enumerate() {
            if e.source.as_str() != here || !want(&e.sync) {
                continue;
            }
            let values: Vec<Option<i64>> = match &e.select {
                Some(sel) => sel.range.values().map(Some).collect(),
                None => vec![None],
            };
            for v in values {
                let select = e.select.as_ref().zip(v).map(|(sel, v)| (&sel.name, v));
                let scope = Scope { oracle: self, pid, select, state: s };
                if scope.truth(&e.guard)? {
                    out.push(EdgeRef { process: pid, edge: k, select: v });
                }
            }
        }
        Ok(out)
    }

    fn edge(&self, r: EdgeRef) -> &Edge {
        &self.procs[r.process].template.edges[r.edge]
    }

    fn take(&self, s: &NaiveState, r: EdgeRef) -> Result<NaiveState, String> {
        let e = self.edge(r);
        let mut next = s.clone();
        for step in &e.update {
            let select = e.select.as_ref().zip(r.select).map(|(sel, v)| (&sel.name, v));
            let scope = Scope { oracle: self, pid: r.process, select, state: &next };
            match step {
                UpdateStep::Assign(target, value) => {
                    let (k, v) = (scope.key(target)?, scope.int(value)?);
                    let range = self.ranges.get(&k).ok_or_else(|| format!("variable {k}"))?;
                    if !range.contains(v) {
                        return Err(format!("{k} := {v} out of range"));
                    }
                    next.vars.insert(k, v);
                }
                UpdateStep::ResetClock(c) => {
                    next.clocks.insert(format!("{}.{c}", self.procs[r.process].name), 0);
                }
            }
        }
        next.locations.insert(self.procs[r.process].name.clone(), e.target.to_string());
        Ok(next)
    }

    fn channel(&self, name: &Ident) -> usize {
        self.def.channels.iter().position(|c| &c.name == name).expect("declared channel")
    }

    fn broadcast(&self, s: &NaiveState, sender: EdgeRef, out: &mut Moves) -> Result<(), String> {
        let Sync::Send(ch) = &self.edge(sender).sync else { unreachable!() };
        let after = self.take(s, sender)?;
        let mut partial: Vec<(Vec<EdgeRef>, NaiveState)> = vec![(Vec::new(), after.clone())];
        for q in 0..self.procs.len() {
            if q == sender.process {
                continue;
            }
            let options = self.enabled(&after, q, &|k| *k == Sync::Receive(ch.clone()))?;
            if options.is_empty() {
                continue;
            }
            let mut grown = Vec::new();
            for (chosen, st) in &partial {
                for r in &options {
                    let mut c = chosen.clone();
                    c.push(*r);
                    grown.push((c, self.take(st, *r)?));
                }
            }
            partial = grown;
        }
        for (receivers, st) in partial {
            if self.invariants_hold(&st)? {
                out.push((TransitionLabel::Broadcast { channel: self.channel(ch), sender, receivers }, st));
            }
        }
        Ok(())
    }

    /// Every enabled move from `s`. Order is unspecified.
    pub fn successors(&self, s: &NaiveState) -> Result<Moves, String> {
        let any_committed = (0..self.procs.len()).any(|p| self.committed(s, p));
        let mut out = Vec::new();
        for pid in 0..self.procs.len() {
            if any_committed && !self.committed(s, pid) {
                continue;
            }
            for r in self.enabled(s, pid, &|k| !matches!(k, Sync::Receive(_)))? {
                if matches!(self.edge(r).sync, Sync::Send(_)) {
                    self.broadcast(s, r, &mut out)?;
                } else {
                    let next = self.take(s, r)?;
                    if self.invariants_hold(&next)? {
                        out.push((TransitionLabel::Internal(r), next));
                    }
                }
            }
        }
        if !any_committed {
            let mut next = s.clone();
            for (k, v) in next.clocks.iter_mut() {
                *v = (*v + 1).min(self.ceilings[k]);
            }
            if self.invariants_hold(&next)? {
                out.push((TransitionLabel::Delay, next));
            }
        }
        Ok(out)
    }

    /// Number of reachable states, or `None` above `cap`.
    pub fn count_reachable(&self, cap: usize) -> Result<Option<usize>, String> {
        let init = self.initial();
        let mut seen = BTreeSet::from([init.clone()]);
        let mut queue = VecDeque::from([init]);
        while let Some(s) = queue.pop_front() {
            for (_, n) in self.successors(&s)? {
                if seen.insert(n.clone()) {
                    if seen.len() > cap {
                        return Ok(None);
                    }
                    queue.push_back(n);
                }
            }
        }
        Ok(Some(seen.len()))
    }
}

/// Canonical, order-independent form of a successor list for comparison.
pub fn canonical(moves: impl IntoIterator<Item = (TransitionLabel, StateView)>) -> Vec<String> {
    let mut v: Vec<String> = moves.into_iter().map(|(l, s)| format!("{l:?} -> {s:?}")).collect();
    v.sort();
    v
}
