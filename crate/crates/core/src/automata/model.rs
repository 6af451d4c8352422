use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Expr, Ident, VarRef};

/// Inclusive integer interval. `lo > hi` denotes the empty range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntRange {
    pub lo: i64,
    pub hi: i64,
}

impl IntRange {
    pub fn new(lo: i64, hi: i64) -> Self {
        IntRange { lo, hi }
    }

    pub fn contains(&self, v: i64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn values(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChannelKind {
    Broadcast,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Channel {
    pub name: Ident,
    pub kind: ChannelKind,
}

impl Channel {
    pub fn broadcast(name: &str) -> Self {
        Channel { name: Ident::lit(name), kind: ChannelKind::Broadcast }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntSpec {
    pub range: IntRange,
    pub initial: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Shape {
    Int(IntSpec),
    Record(Vec<(Ident, IntSpec)>),
}

/// A bounded integer variable, an array of them, or an array of records.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableDecl {
    pub name: Ident,
    /// `Some(n)` declares an array of `n` elements.
    pub len: Option<usize>,
    pub shape: Shape,
}

impl VariableDecl {
    pub fn int(name: &str, lo: i64, hi: i64, initial: i64) -> Self {
        VariableDecl {
            name: Ident::lit(name),
            len: None,
            shape: Shape::Int(IntSpec { range: IntRange::new(lo, hi), initial }),
        }
    }

    pub fn record_array(name: &str, len: usize, fields: Vec<(&str, IntSpec)>) -> Self {
        VariableDecl {
            name: Ident::lit(name),
            len: Some(len),
            shape: Shape::Record(fields.into_iter().map(|(n, s)| (Ident::lit(n), s)).collect()),
        }
    }

    /// Flat slots in declaration order: `(index, field, spec)`.
    pub fn slots(&self) -> Vec<(Option<i64>, Option<&Ident>, IntSpec)> {
        let indices: Vec<Option<i64>> = match self.len {
            None => vec![None],
            Some(n) => (0..n as i64).map(Some).collect(),
        };
        let mut out = Vec::new();
        for i in indices {
            match &self.shape {
                Shape::Int(spec) => out.push((i, None, *spec)),
                Shape::Record(fields) => {
                    for (f, spec) in fields {
                        out.push((i, Some(f), *spec));
                    }
                }
            }
        }
        out
    }
}

/// A per-process discrete clock. Values saturate at `ceiling`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClockDecl {
    pub name: Ident,
    pub ceiling: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LocationKind {
    Normal,
    Committed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Location {
    pub name: Ident,
    pub kind: LocationKind,
    pub initial: bool,
    /// Clock-only boolean condition; `true` when absent.
    pub invariant: Expr,
}

impl Location {
    pub fn normal(name: &str) -> Self {
        Location { name: Ident::lit(name), kind: LocationKind::Normal, initial: false, invariant: Expr::Bool(true) }
    }

    pub fn committed(name: &str) -> Self {
        Location { kind: LocationKind::Committed, ..Location::normal(name) }
    }

    pub fn initial(mut self) -> Self {
        self.initial = true;
        self
    }

    pub fn with_invariant(mut self, inv: Expr) -> Self {
        self.invariant = inv;
        self
    }

    pub fn is_committed(&self) -> bool {
        self.kind == LocationKind::Committed
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sync {
    None,
    Send(Ident),
    Receive(Ident),
}

impl Sync {
    pub fn channel(&self) -> Option<&Ident> {
        match self {
            Sync::None => None,
            Sync::Send(c) | Sync::Receive(c) => Some(c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum UpdateStep {
    Assign(VarRef, Expr),
    ResetClock(Ident),
}

/// Ordered assignments; later steps observe earlier ones.
pub type Update = Vec<UpdateStep>;

/// Non-deterministic binding of an edge-local name over an integer range,
/// usable like a parameter in the edge's guard, update and array indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Select {
    pub name: Ident,
    pub range: IntRange,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub source: Ident,
    pub target: Ident,
    pub select: Option<Select>,
    pub guard: Expr,
    pub sync: Sync,
    pub update: Update,
    /// Display-only tag such as `time-out`; no semantic meaning.
    pub tag: Option<String>,
}

impl Edge {
    pub fn new(source: &str, target: &str) -> Self {
        Edge {
            source: Ident::lit(source),
            target: Ident::lit(target),
            select: None,
            guard: Expr::Bool(true),
            sync: Sync::None,
            update: Vec::new(),
            tag: None,
        }
    }

    pub fn guard(mut self, guard: Expr) -> Self {
        self.guard = guard;
        self
    }

    pub fn send(mut self, channel: &str) -> Self {
        self.sync = Sync::Send(Ident::lit(channel));
        self
    }

    pub fn receive(mut self, channel: &str) -> Self {
        self.sync = Sync::Receive(Ident::lit(channel));
        self
    }

    pub fn select(mut self, name: &str, lo: i64, hi: i64) -> Self {
        self.select = Some(Select { name: Ident::lit(name), range: IntRange::new(lo, hi) });
        self
    }

    pub fn assign(mut self, target: VarRef, value: Expr) -> Self {
        self.update.push(UpdateStep::Assign(target, value));
        self
    }

    pub fn reset(mut self, clock: &str) -> Self {
        self.update.push(UpdateStep::ResetClock(Ident::lit(clock)));
        self
    }

    pub fn updates(mut self, steps: impl IntoIterator<Item = UpdateStep>) -> Self {
        self.update.extend(steps);
        self
    }

    pub fn tag(mut self, tag: &str) -> Self {
        self.tag = Some(tag.to_string());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parameter {
    pub name: Ident,
    pub range: IntRange,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcessTemplate {
    pub name: Ident,
    pub parameters: Vec<Parameter>,
    pub locations: Vec<Location>,
    pub edges: Vec<Edge>,
    pub locals: Vec<VariableDecl>,
    pub clocks: Vec<ClockDecl>,
}

impl ProcessTemplate {
    pub fn new(name: &str) -> Self {
        ProcessTemplate {
            name: Ident::lit(name),
            parameters: Vec::new(),
            locations: Vec::new(),
            edges: Vec::new(),
            locals: Vec::new(),
            clocks: Vec::new(),
        }
    }

    pub fn location_index(&self, name: &Ident) -> Option<usize> {
        self.locations.iter().position(|l| &l.name == name)
    }

    pub fn initial_location(&self) -> Option<usize> {
        self.locations.iter().position(|l| l.initial)
    }
}

/// A template bound to concrete parameter values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcessInstance {
    pub template: Ident,
    pub args: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SystemDef {
    pub constants: BTreeMap<Ident, i64>,
    /// Named integer ranges, e.g. `ids`.
    pub typedefs: BTreeMap<Ident, IntRange>,
    pub channels: Vec<Channel>,
    pub globals: Vec<VariableDecl>,
    pub templates: Vec<ProcessTemplate>,
    pub processes: Vec<ProcessInstance>,
}

impl SystemDef {
    pub fn template(&self, name: &Ident) -> Option<&ProcessTemplate> {
        self.templates.iter().find(|t| &t.name == name)
    }

    pub fn constant(&self, name: &str) -> Option<i64> {
        self.constants.iter().find(|(k, _)| k.as_str() == name).map(|(_, v)| *v)
    }

    /// Display name of process `pid`: the template name, followed by the
    /// argument list when the template is parameterised.
    pub fn process_name(&self, pid: usize) -> String {
        let p = &self.processes[pid];
        if p.args.is_empty() {
            p.template.to_string()
        } else {
            let args: Vec<String> = p.args.iter().map(i64::to_string).collect();
            format!("{}({})", p.template, args.join(","))
        }
    }
}
