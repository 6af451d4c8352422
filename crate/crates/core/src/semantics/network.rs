//! Compilation of a validated [`SystemDef`] into slot-addressed form.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::automata::{
    validate_system, CmpOp, Expr, Ident, Index, IntRange, ModelError, Shape, Sync, SystemDef, UpdateStep, VarRef,
    VariableDecl,
};

#[derive(Debug, Clone, Error)]
#[error("invalid model: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
pub struct InvalidModel(pub Vec<ModelError>);

#[derive(Debug, Clone)]
pub(crate) enum IntE {
    Lit(i64),
    Slot(usize),
    /// Array element addressed by the edge's select value.
    Dyn {
        base: usize,
        stride: usize,
    },
    Clock(usize),
    Select,
    Add(Box<IntE>, Box<IntE>),
    Sub(Box<IntE>, Box<IntE>),
}

#[derive(Debug, Clone)]
pub(crate) enum BoolE {
    Lit(bool),
    Cmp(CmpOp, IntE, IntE),
    Not(Box<BoolE>),
    And(Box<BoolE>, Box<BoolE>),
    Or(Box<BoolE>, Box<BoolE>),
    Imply(Box<BoolE>, Box<BoolE>),
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Target {
    Slot(usize),
    Dyn { base: usize, stride: usize },
}

#[derive(Debug, Clone)]
pub(crate) enum Step {
    Assign(Target, IntE),
    Reset(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum CSync {
    None,
    Send(usize),
    Receive(usize),
}

#[derive(Debug, Clone)]
pub(crate) struct CEdge {
    pub source: usize,
    pub target: usize,
    pub select: Option<IntRange>,
    pub guard: BoolE,
    pub sync: CSync,
    pub steps: Vec<Step>,
}

impl CEdge {
    /// Select values to try; a single dummy value when the edge has no select.
    pub fn select_values(&self) -> impl Iterator<Item = Option<i64>> {
        let (lo, hi, some) = match self.select {
            Some(r) => (r.lo, r.hi, true),
            None => (0, 0, false),
        };
        (lo..=hi).map(move |v| some.then_some(v))
    }
}

#[derive(Debug, Clone)]
pub(crate) struct CLocation {
    pub name: Ident,
    pub committed: bool,
    pub invariant: BoolE,
}

#[derive(Debug, Clone)]
pub(crate) struct Process {
    pub name: String,
    pub template: usize,
    pub locations: Vec<CLocation>,
    pub initial: usize,
    pub edges: Vec<CEdge>,
    /// Edge indices leaving each location, in declaration order.
    pub outgoing: Vec<Vec<usize>>,
    pub clock_range: std::ops::Range<usize>,
}

/// Where the elements of one declared variable live in the state vector.
#[derive(Debug, Clone)]
pub(crate) struct DeclLayout {
    pub name: Ident,
    pub base: usize,
    pub len: Option<usize>,
    pub fields: Option<Vec<Ident>>,
}

impl DeclLayout {
    fn stride(&self) -> usize {
        self.fields.as_ref().map_or(1, Vec::len)
    }

    fn field_offset(&self, field: Option<&str>) -> Option<usize> {
        match (&self.fields, field) {
            (None, None) => Some(0),
            (Some(fs), Some(f)) => fs.iter().position(|x| x.as_str() == f),
            _ => None,
        }
    }

    pub fn slot(&self, index: Option<i64>, field: Option<&str>) -> Option<usize> {
        let off = self.field_offset(field)?;
        match (self.len, index) {
            (None, None) => Some(self.base + off),
            (Some(n), Some(i)) if i >= 0 && (i as usize) < n => Some(self.base + i as usize * self.stride() + off),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct VarSlot {
    pub name: String,
    pub range: IntRange,
    pub initial: i64,
}

#[derive(Debug, Clone)]
pub(crate) struct ClockSlot {
    pub name: String,
    pub ceiling: i64,
}

/// A validated system compiled for exploration.
///
/// Variables of all scopes live in one flat vector (globals first, then each
/// process's locals); clocks likewise. Expressions are pre-resolved to slot
/// indices.
#[derive(Debug, Clone)]
pub struct Network {
    pub(crate) def: SystemDef,
    pub(crate) processes: Vec<Process>,
    pub(crate) channels: Vec<Ident>,
    pub(crate) var_slots: Vec<VarSlot>,
    pub(crate) clock_slots: Vec<ClockSlot>,
    pub(crate) global_decls: Vec<DeclLayout>,
    pub(crate) local_decls: Vec<Vec<DeclLayout>>,
}

fn layout_decls(decls: &[VariableDecl], prefix: &str, slots: &mut Vec<VarSlot>) -> Vec<DeclLayout> {
    decls
        .iter()
        .map(|d| {
            let base = slots.len();
            for (i, f, spec) in d.slots() {
                let name = crate::automata::slot_name(d.name.as_str(), i, f.map(Ident::as_str));
                slots.push(VarSlot { name: format!("{prefix}{name}"), range: spec.range, initial: spec.initial });
            }
            DeclLayout {
                name: d.name.clone(),
                base,
                len: d.len,
                fields: match &d.shape {
                    Shape::Int(_) => None,
                    Shape::Record(fs) => Some(fs.iter().map(|(n, _)| n.clone()).collect()),
                },
            }
        })
        .collect()
}

struct Scope<'a> {
    def: &'a SystemDef,
    params: BTreeMap<&'a Ident, i64>,
    select: Option<&'a Ident>,
    locals: &'a [DeclLayout],
    globals: &'a [DeclLayout],
    clocks: BTreeMap<&'a Ident, usize>,
}

/// Compilation failures that validation should have excluded.
fn internal(msg: String) -> ModelError {
    ModelError { element: "compiler".into(), rule: crate::automata::Rule::Unresolved(msg) }
}

impl<'a> Scope<'a> {
    fn decl(&self, name: &Ident) -> Option<&'a DeclLayout> {
        self.locals.iter().chain(self.globals.iter()).find(|d| &d.name == name)
    }

    fn target(&self, r: &VarRef) -> Result<Target, ModelError> {
        let d = self.decl(&r.name).ok_or_else(|| internal(r.to_string()))?;
        let field = r.field.as_ref().map(Ident::as_str);
        match &r.index {
            Some(Index::Param(p)) if Some(p) == self.select => {
                let off = d.field_offset(field).ok_or_else(|| internal(r.to_string()))?;
                Ok(Target::Dyn { base: d.base + off, stride: d.stride() })
            }
            idx => {
                let i = match idx {
                    None => None,
                    Some(Index::Lit(v)) => Some(*v),
                    Some(Index::Param(p)) => Some(*self.params.get(p).ok_or_else(|| internal(p.to_string()))?),
                    Some(Index::Const(c)) => Some(*self.def.constants.get(c).ok_or_else(|| internal(c.to_string()))?),
                };
                d.slot(i, field).map(Target::Slot).ok_or_else(|| internal(r.to_string()))
            }
        }
    }

    fn int(&self, e: &Expr) -> Result<IntE, ModelError> {
        Ok(match e {
            Expr::Int(v) => IntE::Lit(*v),
            Expr::Var(r) => match self.target(r)? {
                Target::Slot(s) => IntE::Slot(s),
                Target::Dyn { base, stride } => IntE::Dyn { base, stride },
            },
            Expr::Clock(c) => IntE::Clock(*self.clocks.get(c).ok_or_else(|| internal(c.to_string()))?),
            Expr::Param(p) if Some(p) == self.select => IntE::Select,
            Expr::Param(p) => IntE::Lit(*self.params.get(p).ok_or_else(|| internal(p.to_string()))?),
            Expr::Const(c) => IntE::Lit(*self.def.constants.get(c).ok_or_else(|| internal(c.to_string()))?),
            Expr::Add(a, b) => IntE::Add(Box::new(self.int(a)?), Box::new(self.int(b)?)),
            Expr::Sub(a, b) => IntE::Sub(Box::new(self.int(a)?), Box::new(self.int(b)?)),
            other => return Err(internal(format!("expected integer: {other}"))),
        })
    }

    fn boolean(&self, e: &Expr) -> Result<BoolE, ModelError> {
        let b = |x: &Expr| self.boolean(x).map(Box::new);
        Ok(match e {
            Expr::Bool(v) => BoolE::Lit(*v),
            Expr::Cmp(op, l, r) => BoolE::Cmp(*op, self.int(l)?, self.int(r)?),
            Expr::Not(a) => BoolE::Not(b(a)?),
            Expr::And(x, y) => BoolE::And(b(x)?, b(y)?),
            Expr::Or(x, y) => BoolE::Or(b(x)?, b(y)?),
            Expr::Imply(x, y) => BoolE::Imply(b(x)?, b(y)?),
            other => return Err(internal(format!("expected boolean: {other}"))),
        })
    }
}

impl Network {
    /// Validates `def` and compiles it.
    pub fn new(def: &SystemDef) -> Result<Network, InvalidModel> {
        let errors = validate_system(def);
        if !errors.is_empty() {
            return Err(InvalidModel(errors));
        }
        Self::compile(def).map_err(|e| InvalidModel(vec![e]))
    }

    fn compile(def: &SystemDef) -> Result<Network, ModelError> {
        let channels: Vec<Ident> = def.channels.iter().map(|c| c.name.clone()).collect();
        let mut var_slots = Vec::new();
        let global_decls = layout_decls(&def.globals, "", &mut var_slots);
        let mut clock_slots = Vec::new();
        let mut local_decls = Vec::new();
        let mut processes = Vec::new();

        for pid in 0..def.processes.len() {
            let inst = &def.processes[pid];
            let tidx = def.templates.iter().position(|t| t.name == inst.template).expect("validated");
            let t = &def.templates[tidx];
            let name = def.process_name(pid);
            let locals = layout_decls(&t.locals, &format!("{name}."), &mut var_slots);
            let clock_start = clock_slots.len();
            let mut clocks = BTreeMap::new();
            for c in &t.clocks {
                clocks.insert(&c.name, clock_slots.len());
                clock_slots.push(ClockSlot { name: format!("{name}.{}", c.name), ceiling: c.ceiling });
            }
            let params = t.parameters.iter().map(|p| &p.name).zip(inst.args.iter().copied()).collect();
            let mut scope = Scope { def, params, select: None, locals: &locals, globals: &global_decls, clocks };

            let locations = t
                .locations
                .iter()
                .map(|l| {
                    Ok(CLocation {
                        name: l.name.clone(),
                        committed: l.is_committed(),
                        invariant: scope.boolean(&l.invariant)?,
                    })
                })
                .collect::<Result<Vec<_>, ModelError>>()?;

            let mut edges = Vec::new();
            let mut outgoing = vec![Vec::new(); t.locations.len()];
            for (eid, e) in t.edges.iter().enumerate() {
                scope.select = e.select.as_ref().map(|s| &s.name);
                let source = t.location_index(&e.source).expect("validated");
                let target = t.location_index(&e.target).expect("validated");
                let chan = |c: &Ident| channels.iter().position(|x| x == c).expect("validated");
                let sync = match &e.sync {
                    Sync::None => CSync::None,
                    Sync::Send(c) => CSync::Send(chan(c)),
                    Sync::Receive(c) => CSync::Receive(chan(c)),
                };
                let steps = e
                    .update
                    .iter()
                    .map(|s| match s {
                        UpdateStep::Assign(r, v) => Ok(Step::Assign(scope.target(r)?, scope.int(v)?)),
                        UpdateStep::ResetClock(c) => {
                            Ok(Step::Reset(*scope.clocks.get(c).ok_or_else(|| internal(c.to_string()))?))
                        }
                    })
                    .collect::<Result<Vec<_>, ModelError>>()?;
                edges.push(CEdge {
                    source,
                    target,
                    select: e.select.as_ref().map(|s| s.range),
                    guard: scope.boolean(&e.guard)?,
                    sync,
                    steps,
                });
                outgoing[source].push(eid);
            }

            processes.push(Process {
                name,
                template: tidx,
                locations,
                initial: t.initial_location().expect("validated"),
                edges,
                outgoing,
                clock_range: clock_start..clock_slots.len(),
            });
            local_decls.push(locals);
        }

        Ok(Network { def: def.clone(), processes, channels, var_slots, clock_slots, global_decls, local_decls })
    }

    pub fn def(&self) -> &SystemDef {
        &self.def
    }

    pub fn process_count(&self) -> usize {
        self.processes.len()
    }

    pub fn process_name(&self, pid: usize) -> &str {
        &self.processes[pid].name
    }

    pub fn channel_name(&self, ch: usize) -> &str {
        self.channels[ch].as_str()
    }

    pub fn location_name(&self, pid: usize, loc: usize) -> &str {
        self.processes[pid].locations[loc].name.as_str()
    }

    pub fn location_index(&self, pid: usize, name: &str) -> Option<usize> {
        self.processes[pid].locations.iter().position(|l| l.name.as_str() == name)
    }

    pub fn location_count(&self, pid: usize) -> usize {
        self.processes[pid].locations.len()
    }

    pub fn is_committed_location(&self, pid: usize, loc: usize) -> bool {
        self.processes[pid].locations[loc].committed
    }

    pub fn edge_count(&self, pid: usize) -> usize {
        self.processes[pid].edges.len()
    }

    /// Number of variable slots (globals and all locals).
    pub fn var_count(&self) -> usize {
        self.var_slots.len()
    }

    pub fn clock_count(&self) -> usize {
        self.clock_slots.len()
    }

    pub fn var_name(&self, slot: usize) -> &str {
        &self.var_slots[slot].name
    }

    pub fn var_range(&self, slot: usize) -> IntRange {
        self.var_slots[slot].range
    }

    pub fn clock_name(&self, clock: usize) -> &str {
        &self.clock_slots[clock].name
    }

    pub fn clock_ceiling(&self, clock: usize) -> i64 {
        self.clock_slots[clock].ceiling
    }

    /// Finds the process instantiated from `template`. With `arg`, the
    /// instance whose single parameter equals `arg`; without, the instance of
    /// an unparameterised template.
    pub fn find_process(&self, template: &str, arg: Option<i64>) -> Option<usize> {
        self.def.processes.iter().position(|p| {
            p.template.as_str() == template
                && match arg {
                    Some(a) => p.args.len() == 1 && p.args[0] == a,
                    None => p.args.is_empty(),
                }
        })
    }

    /// Resolves a variable element to its slot. Process-local declarations
    /// shadow globals; a `process` of `None` looks at globals only.
    pub fn find_var(
        &self,
        process: Option<usize>,
        name: &str,
        index: Option<i64>,
        field: Option<&str>,
    ) -> Option<usize> {
        let locals = process.map(|p| self.local_decls[p].as_slice()).unwrap_or(&[]);
        let d = locals.iter().chain(self.global_decls.iter()).find(|d| d.name.as_str() == name)?;
        d.slot(index, field)
    }

    /// Whether `name` is a clock of `process`.
    pub fn find_clock(&self, process: usize, name: &str) -> Option<usize> {
        let prefix = format!("{}.{}", self.processes[process].name, name);
        self.processes[process].clock_range.clone().find(|&c| self.clock_slots[c].name == prefix)
    }

    pub fn constant(&self, name: &str) -> Option<i64> {
        self.def.constant(name)
    }

    pub fn typedef(&self, name: &str) -> Option<IntRange> {
        self.def.typedefs.iter().find(|(k, _)| k.as_str() == name).map(|(_, v)| *v)
    }
}
