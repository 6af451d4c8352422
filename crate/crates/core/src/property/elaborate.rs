//! Quantifier expansion and name resolution against a compiled network.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automata::{slot_name, CmpOp};
use crate::semantics::{Network, SystemState};

use super::ast::{Access, PathQuantifier, Pred, ProcRef, PropertyAst, Quantifier, RangeSpec, Term};

/// Which client ids the built-in range `ids` denotes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdsScope {
    /// Legitimate and illegitimate clients (typedef `ids`).
    #[default]
    All,
    /// Legitimate clients only (typedef `legit_ids`).
    LegitOnly,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ElabError {
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("unknown range `{0}`")]
    UnknownRange(String),
    #[error("no process `{0}`")]
    UnknownProcess(String),
    #[error("no variable `{0}`")]
    UnknownVariable(String),
    #[error("`{0}` is a clock; clock constraints are not supported in queries")]
    ClockInQuery(String),
    #[error("arithmetic overflow in `{0}`")]
    Overflow(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroundTerm {
    Lit(i64),
    /// Variable slot of the target network.
    Slot(usize),
    Add(Box<GroundTerm>, Box<GroundTerm>),
    Sub(Box<GroundTerm>, Box<GroundTerm>),
}

/// Quantifier-free predicate whose leaves read concrete state slots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroundPredicate {
    Bool(bool),
    Cmp(CmpOp, GroundTerm, GroundTerm),
    At { process: usize, location: usize },
    Not(Box<GroundPredicate>),
    All(Vec<GroundPredicate>),
    Any(Vec<GroundPredicate>),
    Imply(Box<GroundPredicate>, Box<GroundPredicate>),
}

impl GroundTerm {
    pub fn eval(&self, s: &SystemState) -> i64 {
        match self {
            GroundTerm::Lit(v) => *v,
            GroundTerm::Slot(k) => s.vars[*k],
            GroundTerm::Add(a, b) => a.eval(s).wrapping_add(b.eval(s)),
            GroundTerm::Sub(a, b) => a.eval(s).wrapping_sub(b.eval(s)),
        }
    }
}

impl GroundPredicate {
    pub fn eval(&self, s: &SystemState) -> bool {
        match self {
            GroundPredicate::Bool(b) => *b,
            GroundPredicate::Cmp(op, a, b) => op.apply(a.eval(s), b.eval(s)),
            GroundPredicate::At { process, location } => s.locations[*process] == *location,
            GroundPredicate::Not(a) => !a.eval(s),
            GroundPredicate::All(items) => items.iter().all(|p| p.eval(s)),
            GroundPredicate::Any(items) => items.iter().any(|p| p.eval(s)),
            GroundPredicate::Imply(a, b) => !a.eval(s) || b.eval(s),
        }
    }

    /// Number of leaves; a size measure for reports and tests.
    pub fn leaf_count(&self) -> usize {
        match self {
            GroundPredicate::Bool(_) | GroundPredicate::Cmp(..) | GroundPredicate::At { .. } => 1,
            GroundPredicate::Not(a) => a.leaf_count(),
            GroundPredicate::All(v) | GroundPredicate::Any(v) => v.iter().map(Self::leaf_count).sum(),
            GroundPredicate::Imply(a, b) => a.leaf_count() + b.leaf_count(),
        }
    }
}

/// An elaborated property. For `A[]` the checker searches for a state
/// falsifying `predicate`; for `E<>` one satisfying it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElaboratedProperty {
    pub quantifier: PathQuantifier,
    pub predicate: GroundPredicate,
}

impl ElaboratedProperty {
    /// Whether `s` is the state the search is looking for.
    pub fn is_target(&self, s: &SystemState) -> bool {
        match self.quantifier {
            PathQuantifier::Invariant => !self.predicate.eval(s),
            PathQuantifier::Reach => self.predicate.eval(s),
        }
    }
}

struct Elab<'a> {
    net: &'a Network,
    scope: IdsScope,
    bound: HashMap<String, Vec<i64>>,
}

impl Elab<'_> {
    fn lookup_bound(&self, name: &str) -> Option<i64> {
        self.bound.get(name).and_then(|v| v.last().copied())
    }

    /// Value of a term that must not depend on the state.
    fn static_value(&self, t: &Term) -> Result<i64, ElabError> {
        match self.term(t)? {
            GroundTerm::Lit(v) => Ok(v),
            _ => Err(ElabError::UnknownName(format!("{t} (not a constant expression)"))),
        }
    }

    fn range(&self, r: &RangeSpec) -> Result<(i64, i64), ElabError> {
        match r {
            RangeSpec::Int(lo, hi) => Ok((self.static_value(lo)?, self.static_value(hi)?)),
            RangeSpec::Named(n) => {
                let name = match (n.as_str(), self.scope) {
                    ("ids", IdsScope::LegitOnly) => "legit_ids",
                    (other, _) => other,
                };
                let r = self.net.typedef(name).ok_or_else(|| ElabError::UnknownRange(n.to_string()))?;
                Ok((r.lo, r.hi))
            }
        }
    }

    fn process(&self, p: &ProcRef) -> Result<usize, ElabError> {
        let arg = p.arg.as_ref().map(|a| self.static_value(a)).transpose()?;
        self.net.find_process(p.template.as_str(), arg).ok_or_else(|| {
            ElabError::UnknownProcess(match arg {
                Some(a) => format!("{}({a})", p.template),
                None => p.template.to_string(),
            })
        })
    }

    fn access(&self, a: &Access) -> Result<GroundTerm, ElabError> {
        let pid = a.process.as_ref().map(|p| self.process(p)).transpose()?;
        let index = a.index.as_ref().map(|i| self.static_value(i)).transpose()?;
        let field = a.field.as_ref().map(|f| f.as_str());
        if let Some(slot) = self.net.find_var(pid, a.var.as_str(), index, field) {
            return Ok(GroundTerm::Slot(slot));
        }
        let shown = slot_name(a.var.as_str(), index, field);
        let shown = match pid {
            Some(p) => format!("{}.{shown}", self.net.process_name(p)),
            None => shown,
        };
        if let Some(p) = pid {
            if index.is_none() && field.is_none() && self.net.find_clock(p, a.var.as_str()).is_some() {
                return Err(ElabError::ClockInQuery(shown));
            }
        }
        Err(ElabError::UnknownVariable(shown))
    }

    fn term(&self, t: &Term) -> Result<GroundTerm, ElabError> {
        Ok(match t {
            Term::Int(v) => GroundTerm::Lit(*v),
            Term::Name(n) => {
                if let Some(v) = self.lookup_bound(n.as_str()) {
                    GroundTerm::Lit(v)
                } else if let Some(v) = self.net.constant(n.as_str()) {
                    GroundTerm::Lit(v)
                } else if let Some(slot) = self.net.find_var(None, n.as_str(), None, None) {
                    GroundTerm::Slot(slot)
                } else {
                    return Err(ElabError::UnknownName(n.to_string()));
                }
            }
            Term::Access(a) => self.access(a)?,
            Term::Add(a, b) | Term::Sub(a, b) => {
                let add = matches!(t, Term::Add(..));
                match (self.term(a)?, self.term(b)?) {
                    (GroundTerm::Lit(x), GroundTerm::Lit(y)) => {
                        let v = if add { x.checked_add(y) } else { x.checked_sub(y) };
                        GroundTerm::Lit(v.ok_or_else(|| ElabError::Overflow(t.to_string()))?)
                    }
                    (x, y) if add => GroundTerm::Add(Box::new(x), Box::new(y)),
                    (x, y) => GroundTerm::Sub(Box::new(x), Box::new(y)),
                }
            }
        })
    }

    fn pred(&mut self, p: &Pred) -> Result<GroundPredicate, ElabError> {
        Ok(match p {
            Pred::Bool(b) => GroundPredicate::Bool(*b),
            Pred::Cmp(op, a, b) => GroundPredicate::Cmp(*op, self.term(a)?, self.term(b)?),
            Pred::At(proc, loc) => {
                let process = self.process(proc)?;
                let location = self
                    .net
                    .location_index(process, loc.as_str())
                    .ok_or_else(|| ElabError::UnknownName(format!("{}.{loc}", self.net.process_name(process))))?;
                GroundPredicate::At { process, location }
            }
            Pred::Not(a) => GroundPredicate::Not(Box::new(self.pred(a)?)),
            Pred::And(a, b) => GroundPredicate::All(vec![self.pred(a)?, self.pred(b)?]),
            Pred::Or(a, b) => GroundPredicate::Any(vec![self.pred(a)?, self.pred(b)?]),
            Pred::Imply(a, b) => GroundPredicate::Imply(Box::new(self.pred(a)?), Box::new(self.pred(b)?)),
            Pred::Quant { kind, var, range, body } => {
                let (lo, hi) = self.range(range)?;
                let mut items = Vec::new();
                for v in lo..=hi {
                    self.bound.entry(var.to_string()).or_default().push(v);
                    let r = self.pred(body);
                    self.bound.get_mut(var.as_str()).expect("pushed above").pop();
                    items.push(r?);
                }
                match (kind, items.is_empty()) {
                    (Quantifier::Forall, true) => GroundPredicate::Bool(true),
                    (Quantifier::Exists, true) => GroundPredicate::Bool(false),
                    (Quantifier::Forall, false) => GroundPredicate::All(items),
                    (Quantifier::Exists, false) => GroundPredicate::Any(items),
                }
            }
        })
    }
}

/// Expands quantifiers over concrete ranges and resolves every name
/// against `net`. `scope` selects the meaning of `ids`.
pub fn elaborate(ast: &PropertyAst, net: &Network, scope: IdsScope) -> Result<ElaboratedProperty, ElabError> {
    let mut e = Elab { net, scope, bound: HashMap::new() };
    Ok(ElaboratedProperty { quantifier: ast.quantifier, predicate: e.pred(&ast.pred)? })
}
