//! Static well-formedness checks for templates and systems.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::{
    ClockDecl, Expr, Ident, Index, IntRange, ProcessTemplate, Shape, SystemDef, UpdateStep, VarRef, VariableDecl,
};

/// A violated well-formedness rule together with the element it concerns.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{element}: {rule}")]
pub struct ModelError {
    pub element: String,
    pub rule: Rule,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Rule {
    #[error("duplicate {namespace} name `{name}`")]
    Duplicate { namespace: &'static str, name: String },
    #[error("undeclared location `{0}`")]
    UndeclaredLocation(String),
    #[error("undeclared channel `{0}`")]
    UndeclaredChannel(String),
    #[error("undeclared {kind} `{name}`")]
    Undeclared { kind: &'static str, name: String },
    #[error("unknown template `{0}`")]
    UnknownTemplate(String),
    #[error("expected {expected} expression, found `{found}`")]
    Type { expected: &'static str, found: String },
    #[error("clock compared to non-constant `{0}`")]
    ClockComparedToNonConstant(String),
    #[error("clock `{0}` used outside a comparison against a constant")]
    ClockOutsideComparison(String),
    #[error("invariant comparison `{0}` does not constrain a clock")]
    NonClockInvariant(String),
    #[error("expected exactly one initial location, found {0}")]
    InitialLocations(usize),
    #[error("initial value {initial} outside [{lo}, {hi}]")]
    InitialOutOfRange { initial: i64, lo: i64, hi: i64 },
    #[error("empty range [{lo}, {hi}]")]
    EmptyRange { lo: i64, hi: i64 },
    #[error("array length must be positive")]
    EmptyArray,
    #[error("clock ceiling {ceiling} must exceed the largest compared constant {max}")]
    ClockCeiling { ceiling: i64, max: i64 },
    #[error("index values [{lo}, {hi}] out of bounds for `{name}` of length {len}")]
    IndexOutOfBounds { name: String, lo: i64, hi: i64, len: usize },
    #[error("array `{0}` needs an index")]
    MissingIndex(String),
    #[error("`{0}` is not an array")]
    UnexpectedIndex(String),
    #[error("record `{0}` needs a field selector")]
    MissingField(String),
    #[error("`{name}` has no field `{field}`")]
    UnknownField { name: String, field: String },
    #[error("instance binds {found} arguments but the template declares {expected}")]
    Arity { expected: usize, found: usize },
    #[error("argument {value} outside parameter range [{lo}, {hi}]")]
    ArgumentOutOfRange { value: i64, lo: i64, hi: i64 },
    #[error("unresolved `{0}` during compilation")]
    Unresolved(String),
}

fn err(element: impl Into<String>, rule: Rule) -> ModelError {
    ModelError { element: element.into(), rule }
}

/// Checks every template invariant of `template` against the declarations of
/// `system` (channels, globals, constants). Returns all violations found.
pub fn validate_template(template: &ProcessTemplate, system: &SystemDef) -> Vec<ModelError> {
    let mut errors = Vec::new();
    let tname = format!("template {}", template.name);

    let mut seen = BTreeSet::new();
    for l in &template.locations {
        if !seen.insert(&l.name) {
            errors.push(err(&tname, Rule::Duplicate { namespace: "location", name: l.name.to_string() }));
        }
    }
    let initials = template.locations.iter().filter(|l| l.initial).count();
    if initials != 1 {
        errors.push(err(&tname, Rule::InitialLocations(initials)));
    }

    let mut names = BTreeSet::new();
    let global_names: BTreeSet<&Ident> = system.globals.iter().map(|g| &g.name).collect();
    for p in &template.parameters {
        if !names.insert(&p.name) {
            errors.push(err(&tname, Rule::Duplicate { namespace: "parameter", name: p.name.to_string() }));
        }
        if p.range.is_empty() {
            errors.push(err(
                format!("{tname}, parameter {}", p.name),
                Rule::EmptyRange { lo: p.range.lo, hi: p.range.hi },
            ));
        }
    }
    for v in &template.locals {
        if !names.insert(&v.name) || global_names.contains(&v.name) {
            errors.push(err(&tname, Rule::Duplicate { namespace: "variable", name: v.name.to_string() }));
        }
        errors.extend(validate_decl(v, &format!("{tname}, variable {}", v.name)));
    }
    for c in &template.clocks {
        if !names.insert(&c.name) || global_names.contains(&c.name) {
            errors.push(err(&tname, Rule::Duplicate { namespace: "clock", name: c.name.to_string() }));
        }
    }

    let mut checker = ExprChecker {
        system,
        template,
        select: None,
        clock_max: BTreeMap::new(),
        errors: Vec::new(),
        element: String::new(),
    };

    for l in &template.locations {
        checker.element = format!("{tname}, location {} invariant", l.name);
        checker.check_bool(&l.invariant);
        checker.check_invariant_shape(&l.invariant);
    }

    for (i, e) in template.edges.iter().enumerate() {
        let element = format!("{tname}, edge {i} ({} -> {})", e.source, e.target);
        for end in [&e.source, &e.target] {
            if template.location_index(end).is_none() {
                errors.push(err(&element, Rule::UndeclaredLocation(end.to_string())));
            }
        }
        if let Some(c) = e.sync.channel() {
            if !system.channels.iter().any(|ch| &ch.name == c) {
                errors.push(err(&element, Rule::UndeclaredChannel(c.to_string())));
            }
        }
        if let Some(sel) = &e.select {
            if sel.range.is_empty() {
                errors.push(err(&element, Rule::EmptyRange { lo: sel.range.lo, hi: sel.range.hi }));
            }
            if names.contains(&sel.name) || global_names.contains(&sel.name) {
                errors.push(err(&element, Rule::Duplicate { namespace: "select", name: sel.name.to_string() }));
            }
        }
        checker.select = e.select.as_ref().map(|s| (&s.name, s.range));
        checker.element = format!("{element} guard");
        checker.check_bool(&e.guard);
        checker.element = format!("{element} update");
        for step in &e.update {
            match step {
                UpdateStep::Assign(target, value) => {
                    checker.check_var(target);
                    checker.check_int(value);
                }
                UpdateStep::ResetClock(c) => {
                    if !template.clocks.iter().any(|k| &k.name == c) {
                        checker.push(Rule::Undeclared { kind: "clock", name: c.to_string() });
                    }
                }
            }
        }
        checker.select = None;
    }

    for c in &template.clocks {
        let max = checker.clock_max.get(&c.name).copied().unwrap_or(0);
        let element = format!("{tname}, clock {}", c.name);
        if c.ceiling < 1 || c.ceiling <= max {
            errors.push(err(element, Rule::ClockCeiling { ceiling: c.ceiling, max }));
        }
    }

    errors.extend(checker.errors);
    errors
}

/// Validates the whole system: global declarations, channels, every
/// template, and every process instantiation.
pub fn validate_system(system: &SystemDef) -> Vec<ModelError> {
    let mut errors = Vec::new();
    let mut seen = BTreeSet::new();
    for c in &system.channels {
        if !seen.insert(&c.name) {
            errors.push(err("system", Rule::Duplicate { namespace: "channel", name: c.name.to_string() }));
        }
    }
    let mut seen = BTreeSet::new();
    for g in &system.globals {
        if !seen.insert(&g.name) {
            errors.push(err("system", Rule::Duplicate { namespace: "variable", name: g.name.to_string() }));
        }
        errors.extend(validate_decl(g, &format!("global {}", g.name)));
    }
    let mut seen = BTreeSet::new();
    for t in &system.templates {
        if !seen.insert(&t.name) {
            errors.push(err("system", Rule::Duplicate { namespace: "template", name: t.name.to_string() }));
        }
        errors.extend(validate_template(t, system));
    }
    for (pid, p) in system.processes.iter().enumerate() {
        let element = format!("process {pid} ({})", p.template);
        let Some(t) = system.template(&p.template) else {
            errors.push(err(element, Rule::UnknownTemplate(p.template.to_string())));
            continue;
        };
        if t.parameters.len() != p.args.len() {
            errors.push(err(&element, Rule::Arity { expected: t.parameters.len(), found: p.args.len() }));
            continue;
        }
        for (param, &value) in t.parameters.iter().zip(&p.args) {
            if !param.range.contains(value) {
                errors.push(err(&element, Rule::ArgumentOutOfRange { value, lo: param.range.lo, hi: param.range.hi }));
            }
        }
    }
    errors
}

fn validate_decl(decl: &VariableDecl, element: &str) -> Vec<ModelError> {
    let mut errors = Vec::new();
    if decl.len == Some(0) {
        errors.push(err(element, Rule::EmptyArray));
    }
    let specs: Vec<_> = match &decl.shape {
        Shape::Int(s) => vec![*s],
        Shape::Record(fields) => {
            let mut seen = BTreeSet::new();
            for (f, _) in fields {
                if !seen.insert(f) {
                    errors.push(err(element, Rule::Duplicate { namespace: "field", name: f.to_string() }));
                }
            }
            fields.iter().map(|(_, s)| *s).collect()
        }
    };
    for s in specs {
        if s.range.is_empty() {
            errors.push(err(element, Rule::EmptyRange { lo: s.range.lo, hi: s.range.hi }));
        } else if !s.range.contains(s.initial) {
            errors.push(err(element, Rule::InitialOutOfRange { initial: s.initial, lo: s.range.lo, hi: s.range.hi }));
        }
    }
    errors
}

struct ExprChecker<'a> {
    system: &'a SystemDef,
    template: &'a ProcessTemplate,
    select: Option<(&'a Ident, IntRange)>,
    clock_max: BTreeMap<Ident, i64>,
    errors: Vec<ModelError>,
    element: String,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ty {
    Int,
    Bool,
}

impl<'a> ExprChecker<'a> {
    fn push(&mut self, rule: Rule) {
        self.errors.push(err(self.element.clone(), rule));
    }

    fn param_range(&self, name: &Ident) -> Option<IntRange> {
        if let Some((sel, range)) = self.select {
            if sel == name {
                return Some(range);
            }
        }
        self.template.parameters.iter().find(|p| &p.name == name).map(|p| p.range)
    }

    fn find_decl(&self, name: &Ident) -> Option<&'a VariableDecl> {
        self.template.locals.iter().chain(self.system.globals.iter()).find(|d| &d.name == name)
    }

    fn find_clock(&self, name: &Ident) -> Option<&'a ClockDecl> {
        self.template.clocks.iter().find(|c| &c.name == name)
    }

    /// Interval of values a constant-valued term can take, or `None` when the
    /// term depends on state.
    fn const_interval(&self, e: &Expr) -> Option<(i64, i64)> {
        match e {
            Expr::Int(v) => Some((*v, *v)),
            Expr::Const(c) => self.system.constants.get(c).map(|v| (*v, *v)),
            Expr::Param(p) => self.param_range(p).map(|r| (r.lo, r.hi)),
            Expr::Add(a, b) => {
                let (a, b) = (self.const_interval(a)?, self.const_interval(b)?);
                Some((a.0 + b.0, a.1 + b.1))
            }
            Expr::Sub(a, b) => {
                let (a, b) = (self.const_interval(a)?, self.const_interval(b)?);
                Some((a.0 - b.1, a.1 - b.0))
            }
            _ => None,
        }
    }

    fn check_bool(&mut self, e: &Expr) {
        if let Some(Ty::Int) = self.ty(e) {
            self.push(Rule::Type { expected: "boolean", found: e.to_string() });
        }
    }

    fn check_int(&mut self, e: &Expr) {
        if let Some(Ty::Bool) = self.ty(e) {
            self.push(Rule::Type { expected: "integer", found: e.to_string() });
        }
    }

    fn check_invariant_shape(&mut self, e: &Expr) {
        match e {
            Expr::Bool(_) => {}
            Expr::Cmp(_, a, b) => {
                if !matches!(**a, Expr::Clock(_)) && !matches!(**b, Expr::Clock(_)) {
                    self.push(Rule::NonClockInvariant(e.to_string()));
                }
            }
            Expr::Not(a) => self.check_invariant_shape(a),
            Expr::And(a, b) | Expr::Or(a, b) | Expr::Imply(a, b) => {
                self.check_invariant_shape(a);
                self.check_invariant_shape(b);
            }
            _ => {}
        }
    }

    fn check_index(&mut self, decl: &VariableDecl, index: &Index) {
        let Some(len) = decl.len else { return };
        let range = match index {
            Index::Lit(v) => Some((*v, *v)),
            Index::Const(c) => match self.system.constants.get(c) {
                Some(v) => Some((*v, *v)),
                None => {
                    self.push(Rule::Undeclared { kind: "constant", name: c.to_string() });
                    None
                }
            },
            Index::Param(p) => match self.param_range(p) {
                Some(r) => Some((r.lo, r.hi)),
                None => {
                    self.push(Rule::Undeclared { kind: "parameter", name: p.to_string() });
                    None
                }
            },
        };
        if let Some((lo, hi)) = range {
            if lo < 0 || hi >= len as i64 {
                self.push(Rule::IndexOutOfBounds { name: decl.name.to_string(), lo, hi, len });
            }
        }
    }

    fn check_var(&mut self, r: &VarRef) {
        let Some(decl) = self.find_decl(&r.name) else {
            let kind = if self.find_clock(&r.name).is_some() { "variable (found a clock)" } else { "variable" };
            self.push(Rule::Undeclared { kind, name: r.name.to_string() });
            return;
        };
        match (&r.index, decl.len) {
            (None, Some(_)) => self.push(Rule::MissingIndex(r.name.to_string())),
            (Some(_), None) => self.push(Rule::UnexpectedIndex(r.name.to_string())),
            (Some(i), Some(_)) => self.check_index(decl, i),
            (None, None) => {}
        }
        match (&decl.shape, &r.field) {
            (Shape::Int(_), Some(f)) => {
                self.push(Rule::UnknownField { name: r.name.to_string(), field: f.to_string() })
            }
            (Shape::Record(_), None) => self.push(Rule::MissingField(r.name.to_string())),
            (Shape::Record(fields), Some(f)) => {
                if !fields.iter().any(|(n, _)| n == f) {
                    self.push(Rule::UnknownField { name: r.name.to_string(), field: f.to_string() });
                }
            }
            (Shape::Int(_), None) => {}
        }
    }

    fn ty(&mut self, e: &Expr) -> Option<Ty> {
        match e {
            Expr::Int(_) => Some(Ty::Int),
            Expr::Bool(_) => Some(Ty::Bool),
            Expr::Var(r) => {
                self.check_var(r);
                Some(Ty::Int)
            }
            Expr::Clock(c) => {
                // Reached only when a clock is not a direct comparison operand.
                if self.find_clock(c).is_none() {
                    self.push(Rule::Undeclared { kind: "clock", name: c.to_string() });
                } else {
                    self.push(Rule::ClockOutsideComparison(c.to_string()));
                }
                Some(Ty::Int)
            }
            Expr::Param(p) => {
                if self.param_range(p).is_none() {
                    self.push(Rule::Undeclared { kind: "parameter", name: p.to_string() });
                }
                Some(Ty::Int)
            }
            Expr::Const(c) => {
                if !self.system.constants.contains_key(c) {
                    self.push(Rule::Undeclared { kind: "constant", name: c.to_string() });
                }
                Some(Ty::Int)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                self.check_int(a);
                self.check_int(b);
                Some(Ty::Int)
            }
            Expr::Cmp(_, a, b) => {
                match (&**a, &**b) {
                    (Expr::Clock(c), other) | (other, Expr::Clock(c)) => self.check_clock_cmp(c, other),
                    _ => {
                        self.check_int(a);
                        self.check_int(b);
                    }
                }
                Some(Ty::Bool)
            }
            Expr::Not(a) => {
                self.check_bool(a);
                Some(Ty::Bool)
            }
            Expr::And(a, b) | Expr::Or(a, b) | Expr::Imply(a, b) => {
                self.check_bool(a);
                self.check_bool(b);
                Some(Ty::Bool)
            }
        }
    }

    fn check_clock_cmp(&mut self, clock: &Ident, other: &Expr) {
        if self.find_clock(clock).is_none() {
            self.push(Rule::Undeclared { kind: "clock", name: clock.to_string() });
            return;
        }
        if let Expr::Clock(_) = other {
            self.push(Rule::ClockComparedToNonConstant(other.to_string()));
            return;
        }
        match self.const_interval(other) {
            Some((_, hi)) => {
                let slot = self.clock_max.entry(clock.clone()).or_insert(0);
                *slot = (*slot).max(hi);
            }
            None => {
                // Still surface undeclared names inside the offending operand.
                self.check_int(other);
                self.push(Rule::ClockComparedToNonConstant(other.to_string()));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{Channel, Edge, Location, Parameter};

    fn system_with(template: ProcessTemplate) -> SystemDef {
        let mut sys = SystemDef::default();
        sys.channels.push(Channel::broadcast("syn"));
        sys.constants.insert(Ident::lit("T"), 2);
        sys.templates.push(template);
        sys
    }

    fn client() -> ProcessTemplate {
        let mut t = ProcessTemplate::new("Client");
        t.locals.push(VariableDecl::int("counter", 0, 2, 0));
        t.clocks.push(ClockDecl { name: Ident::lit("timer"), ceiling: 3 });
        t.locations.push(Location::normal("LC0").initial());
        t.locations.push(Location::normal("LC1").with_invariant(Expr::clock("timer").le(Expr::konst("T"))));
        t.edges.push(Edge::new("LC0", "LC1").send("syn").reset("timer"));
        t
    }

    #[test]
    fn well_formed_template_is_clean() {
        let sys = system_with(client());
        assert!(validate_template(&sys.templates[0], &sys).is_empty());
        assert!(validate_system(&sys).is_empty());
    }

    #[test]
    fn dangling_edge_target_is_named() {
        let mut t = client();
        t.edges.push(Edge::new("LC1", "LC9"));
        let sys = system_with(t);
        let errors = validate_template(&sys.templates[0], &sys);
        assert_eq!(errors.len(), 1, "{errors:?}");
        assert_eq!(errors[0].rule, Rule::UndeclaredLocation("LC9".into()));
        assert!(errors[0].to_string().contains("LC9"));
    }

    #[test]
    fn clock_against_variable_is_rejected() {
        let mut t = client();
        t.edges.push(Edge::new("LC1", "LC0").guard(Expr::clock("timer").eq(Expr::var("counter"))));
        let sys = system_with(t);
        let errors = validate_template(&sys.templates[0], &sys);
        assert_eq!(errors.len(), 1, "{errors:?}");
        assert!(errors[0].to_string().contains("clock compared to non-constant"));
    }

    #[test]
    fn clock_ceiling_must_exceed_compared_constants() {
        let mut t = client();
        t.clocks[0].ceiling = 2;
        let sys = system_with(t);
        let errors = validate_template(&sys.templates[0], &sys);
        assert_eq!(errors[0].rule, Rule::ClockCeiling { ceiling: 2, max: 2 });
    }

    #[test]
    fn initial_location_count_is_enforced() {
        let mut t = client();
        t.locations[1].initial = true;
        let sys = system_with(t);
        let errors = validate_template(&sys.templates[0], &sys);
        assert!(errors.iter().any(|e| e.rule == Rule::InitialLocations(2)));
    }

    #[test]
    fn undeclared_channel_and_names() {
        let mut t = client();
        t.edges.push(Edge::new("LC1", "LC0").receive("nope").guard(Expr::var("ghost").eq(Expr::konst("MISSING"))));
        let sys = system_with(t);
        let errors = validate_template(&sys.templates[0], &sys);
        let rules: Vec<_> = errors.iter().map(|e| e.rule.clone()).collect();
        assert!(rules.contains(&Rule::UndeclaredChannel("nope".into())));
        assert!(rules.contains(&Rule::Undeclared { kind: "variable", name: "ghost".into() }));
        assert!(rules.contains(&Rule::Undeclared { kind: "constant", name: "MISSING".into() }));
    }

    #[test]
    fn type_errors_and_index_bounds() {
        let mut t = client();
        t.locals.push(VariableDecl::record_array(
            "tab",
            2,
            vec![("a", super::super::IntSpec { range: IntRange::new(0, 1), initial: 0 })],
        ));
        t.edges.push(Edge::new("LC1", "LC0").guard(Expr::Int(3)));
        t.edges.push(Edge::new("LC1", "LC0").guard(Expr::elem("tab", Index::Lit(2), "a").eq(Expr::Int(0))));
        t.edges.push(
            Edge::new("LC1", "LC0")
                .select("j", 0, 2)
                .guard(Expr::elem("tab", Index::Param(Ident::lit("j")), "a").eq(Expr::Int(0))),
        );
        let sys = system_with(t);
        let errors = validate_template(&sys.templates[0], &sys);
        assert!(errors.iter().any(|e| matches!(e.rule, Rule::Type { expected: "boolean", .. })));
        assert_eq!(errors.iter().filter(|e| matches!(e.rule, Rule::IndexOutOfBounds { .. })).count(), 2);
    }

    #[test]
    fn instance_arguments_are_checked() {
        let mut t = client();
        t.parameters.push(Parameter { name: Ident::lit("id"), range: IntRange::new(0, 1) });
        let mut sys = system_with(t);
        sys.processes.push(crate::automata::ProcessInstance { template: Ident::lit("Client"), args: vec![5] });
        sys.processes.push(crate::automata::ProcessInstance { template: Ident::lit("Client"), args: vec![] });
        sys.processes.push(crate::automata::ProcessInstance { template: Ident::lit("Other"), args: vec![] });
        let rules: Vec<_> = validate_system(&sys).into_iter().map(|e| e.rule).collect();
        assert!(rules.contains(&Rule::ArgumentOutOfRange { value: 5, lo: 0, hi: 1 }));
        assert!(rules.contains(&Rule::Arity { expected: 1, found: 0 }));
        assert!(rules.contains(&Rule::UnknownTemplate("Other".into())));
    }

    #[test]
    fn invariant_must_constrain_clocks() {
        let mut t = client();
        t.locations[0].invariant = Expr::var("counter").le(Expr::Int(1));
        let sys = system_with(t);
        let errors = validate_template(&sys.templates[0], &sys);
        assert!(errors.iter().any(|e| matches!(e.rule, Rule::NonClockInvariant(_))));
    }
}
