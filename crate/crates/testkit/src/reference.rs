//! Slow reference evaluator for query predicates. Walks the AST directly
//! over a [`StateView`], resolving every name by string lookup at each
//! evaluation and expanding quantifiers on the fly.

use handshake_core::automata::{slot_name, CmpOp, SystemDef};
use handshake_core::property::{
    Access, IdsScope, PathQuantifier, Pred, ProcRef, PropertyAst, Quantifier, RangeSpec, Term,
};
use handshake_core::semantics::StateView;

struct Eval<'a> {
    def: &'a SystemDef,
    scope: IdsScope,
    view: &'a StateView,
    bound: Vec<(String, i64)>,
}

impl Eval<'_> {
    fn process(&mut self, p: &ProcRef) -> Result<String, String> {
        let name = match &p.arg {
            Some(a) => format!("{}({})", p.template, self.term(a)?),
            None => p.template.to_string(),
        };
        if self.view.locations.contains_key(&name) {
            Ok(name)
        } else {
            Err(format!("no process {name}"))
        }
    }

    fn access(&mut self, a: &Access) -> Result<i64, String> {
        let index = match &a.index {
            Some(i) => Some(self.term(i)?),
            None => None,
        };
        let flat = slot_name(a.var.as_str(), index, a.field.as_ref().map(|f| f.as_str()));
        let candidates = match &a.process {
            Some(p) => vec![format!("{}.{flat}", self.process(p)?), flat],
            None => vec![flat],
        };
        candidates
            .iter()
            .find_map(|k| self.view.variables.get(k).copied())
            .ok_or_else(|| format!("no variable {}", candidates[0]))
    }

    fn term(&mut self, t: &Term) -> Result<i64, String> {
        Ok(match t {
            Term::Int(v) => *v,
            Term::Name(n) => {
                if let Some((_, v)) = self.bound.iter().rev().find(|(b, _)| b == n.as_str()) {
                    *v
                } else if let Some(v) = self.def.constant(n.as_str()) {
                    v
                } else {
                    *self.view.variables.get(n.as_str()).ok_or_else(|| format!("unknown name {n}"))?
                }
            }
            Term::Access(a) => self.access(a)?,
            Term::Add(a, b) => self.term(a)?.checked_add(self.term(b)?).ok_or("overflow")?,
            Term::Sub(a, b) => self.term(a)?.checked_sub(self.term(b)?).ok_or("overflow")?,
        })
    }

    fn range(&mut self, r: &RangeSpec) -> Result<(i64, i64), String> {
        match r {
            RangeSpec::Int(lo, hi) => Ok((self.term(lo)?, self.term(hi)?)),
            RangeSpec::Named(n) => {
                let name =
                    if n.as_str() == "ids" && self.scope == IdsScope::LegitOnly { "legit_ids" } else { n.as_str() };
                self.def
                    .typedefs
                    .iter()
                    .find(|(k, _)| k.as_str() == name)
                    .map(|(_, r)| (r.lo, r.hi))
                    .ok_or_else(|| format!("unknown range {n}"))
            }
        }
    }

    fn pred(&mut self, p: &Pred) -> Result<bool, String> {
        Ok(match p {
            Pred::Bool(b) => *b,
            Pred::Cmp(op, a, b) => {
                let (x, y) = (self.term(a)?, self.term(b)?);
                match op {
                    CmpOp::Eq => x == y,
                    CmpOp::Ne => x != y,
                    CmpOp::Lt => x < y,
                    CmpOp::Le => x <= y,
                    CmpOp::Gt => x > y,
                    CmpOp::Ge => x >= y,
                }
            }
            Pred::At(proc, loc) => {
                let name = self.process(proc)?;
                self.view.locations[&name] == loc.as_str()
            }
            Pred::Not(a) => !self.pred(a)?,
            Pred::And(a, b) => {
                let x = self.pred(a)?;
                self.pred(b)? && x
            }
            Pred::Or(a, b) => {
                let x = self.pred(a)?;
                self.pred(b)? || x
            }
            Pred::Imply(a, b) => {
                let x = self.pred(a)?;
                self.pred(b)? || !x
            }
            Pred::Quant { kind, var, range, body } => {
                let (lo, hi) = self.range(range)?;
                let mut results = Vec::new();
                for v in lo..=hi {
                    self.bound.push((var.to_string(), v));
                    let r = self.pred(body);
                    self.bound.pop();
                    results.push(r?);
                }
                match kind {
                    Quantifier::Forall => results.iter().all(|&b| b),
                    Quantifier::Exists => results.iter().any(|&b| b),
                }
            }
        })
    }
}

/// Truth of `pred` in `view`.
pub fn eval_predicate(pred: &Pred, def: &SystemDef, scope: IdsScope, view: &StateView) -> Result<bool, String> {
    Eval { def, scope, view, bound: Vec::new() }.pred(pred)
}

/// Whether `view` is a search target: a violation for `A[]`, a witness for
/// `E<>`.
pub fn is_target(ast: &PropertyAst, def: &SystemDef, scope: IdsScope, view: &StateView) -> Result<bool, String> {
    let holds = eval_predicate(&ast.pred, def, scope, view)?;
    Ok(match ast.quantifier {
        PathQuantifier::Invariant => !holds,
        PathQuantifier::Reach => holds,
    })
}
