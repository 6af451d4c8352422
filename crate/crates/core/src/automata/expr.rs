//! Guard, invariant and update expressions.
//!
//! Expressions are a small typed tree: integer terms (literals, bounded
//! variables, discrete clocks, template parameters, system constants, `+`
//! and `-`) and boolean formulas over comparisons of those terms. Operator
//! precedence from loosest to tightest is `imply`, `or`, `and`, `not`,
//! comparisons, `+`/`-`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Ident;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn apply(self, lhs: i64, rhs: i64) -> bool {
        match self {
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ne => lhs != rhs,
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Gt => lhs > rhs,
            CmpOp::Ge => lhs >= rhs,
        }
    }

    pub const ALL: [CmpOp; 6] = [CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge];
}

/// Array subscript. Only static forms are allowed so that bounds can be
/// checked before exploration.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Index {
    Lit(i64),
    /// A template parameter or the binder of the edge's `select`.
    Param(Ident),
    Const(Ident),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VarRef {
    pub name: Ident,
    pub index: Option<Index>,
    pub field: Option<Ident>,
}

impl VarRef {
    pub fn scalar(name: &str) -> Self {
        VarRef { name: Ident::lit(name), index: None, field: None }
    }

    pub fn element(name: &str, index: Index, field: &str) -> Self {
        VarRef { name: Ident::lit(name), index: Some(index), field: Some(Ident::lit(field)) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Expr {
    Int(i64),
    Bool(bool),
    Var(VarRef),
    Clock(Ident),
    Param(Ident),
    Const(Ident),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Cmp(CmpOp, Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Imply(Box<Expr>, Box<Expr>),
}

// Builder helpers. These keep model construction readable without a parser.
impl Expr {
    pub fn var(name: &str) -> Expr {
        Expr::Var(VarRef::scalar(name))
    }

    pub fn elem(name: &str, index: Index, field: &str) -> Expr {
        Expr::Var(VarRef::element(name, index, field))
    }

    pub fn clock(name: &str) -> Expr {
        Expr::Clock(Ident::lit(name))
    }

    pub fn param(name: &str) -> Expr {
        Expr::Param(Ident::lit(name))
    }

    pub fn konst(name: &str) -> Expr {
        Expr::Const(Ident::lit(name))
    }

    pub fn cmp(self, op: CmpOp, rhs: Expr) -> Expr {
        Expr::Cmp(op, Box::new(self), Box::new(rhs))
    }

    pub fn eq(self, rhs: Expr) -> Expr {
        self.cmp(CmpOp::Eq, rhs)
    }

    pub fn ne(self, rhs: Expr) -> Expr {
        self.cmp(CmpOp::Ne, rhs)
    }

    pub fn lt(self, rhs: Expr) -> Expr {
        self.cmp(CmpOp::Lt, rhs)
    }

    pub fn le(self, rhs: Expr) -> Expr {
        self.cmp(CmpOp::Le, rhs)
    }

    pub fn plus(self, rhs: Expr) -> Expr {
        Expr::Add(Box::new(self), Box::new(rhs))
    }

    pub fn minus(self, rhs: Expr) -> Expr {
        Expr::Sub(Box::new(self), Box::new(rhs))
    }

    pub fn and(self, rhs: Expr) -> Expr {
        Expr::And(Box::new(self), Box::new(rhs))
    }

    pub fn or(self, rhs: Expr) -> Expr {
        Expr::Or(Box::new(self), Box::new(rhs))
    }

    pub fn imply(self, rhs: Expr) -> Expr {
        Expr::Imply(Box::new(self), Box::new(rhs))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Expr {
        Expr::Not(Box::new(self))
    }

    /// Folds a list with `or`; an empty list yields `false`.
    pub fn any(items: impl IntoIterator<Item = Expr>) -> Expr {
        items.into_iter().reduce(Expr::or).unwrap_or(Expr::Bool(false))
    }

    pub fn is_true_literal(&self) -> bool {
        matches!(self, Expr::Bool(true))
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Imply(..) => 1,
            Expr::Or(..) => 2,
            Expr::And(..) => 3,
            Expr::Not(..) => 4,
            Expr::Cmp(..) => 5,
            Expr::Add(..) | Expr::Sub(..) => 6,
            _ => 7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Value {
    Int(i64),
    Bool(bool),
}

impl Value {
    pub fn as_int(self) -> Option<i64> {
        match self {
            Value::Int(v) => Some(v),
            Value::Bool(_) => None,
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(b),
            Value::Int(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound {kind} `{name}`")]
    Unbound { kind: &'static str, name: String },
    #[error("type mismatch in `{expr}`: expected {expected}")]
    TypeMismatch { expr: String, expected: &'static str },
    #[error("assignment of {value} to `{target}` leaves its range [{lo}, {hi}]")]
    OutOfRange { target: String, value: i64, lo: i64, hi: i64 },
    #[error("index {index} out of bounds for `{name}`")]
    IndexOutOfBounds { name: String, index: i64 },
}

/// Name lookup used by [`eval_expr`].
pub trait Env {
    fn variable(&self, name: &Ident, index: Option<i64>, field: Option<&Ident>) -> Option<i64>;
    fn clock(&self, name: &Ident) -> Option<i64>;
    fn parameter(&self, name: &Ident) -> Option<i64>;
    fn constant(&self, name: &Ident) -> Option<i64>;
}

/// Renders the flat slot name used for a variable element, e.g. `tcb[1].peer`.
pub fn slot_name(name: &str, index: Option<i64>, field: Option<&str>) -> String {
    let mut s = name.to_string();
    if let Some(i) = index {
        s.push_str(&format!("[{i}]"));
    }
    if let Some(f) = field {
        s.push('.');
        s.push_str(f);
    }
    s
}

/// A map-backed [`Env`]; variables are keyed by [`slot_name`].
#[derive(Debug, Clone, Default)]
pub struct MapEnv {
    pub variables: BTreeMap<String, i64>,
    pub clocks: BTreeMap<String, i64>,
    pub parameters: BTreeMap<String, i64>,
    pub constants: BTreeMap<String, i64>,
}

impl MapEnv {
    pub fn with_var(mut self, slot: &str, value: i64) -> Self {
        self.variables.insert(slot.to_string(), value);
        self
    }

    pub fn with_clock(mut self, name: &str, value: i64) -> Self {
        self.clocks.insert(name.to_string(), value);
        self
    }

    pub fn with_param(mut self, name: &str, value: i64) -> Self {
        self.parameters.insert(name.to_string(), value);
        self
    }

    pub fn with_const(mut self, name: &str, value: i64) -> Self {
        self.constants.insert(name.to_string(), value);
        self
    }
}

impl Env for MapEnv {
    fn variable(&self, name: &Ident, index: Option<i64>, field: Option<&Ident>) -> Option<i64> {
        let key = slot_name(name.as_str(), index, field.map(Ident::as_str));
        self.variables.get(&key).copied()
    }

    fn clock(&self, name: &Ident) -> Option<i64> {
        self.clocks.get(name.as_str()).copied()
    }

    fn parameter(&self, name: &Ident) -> Option<i64> {
        self.parameters.get(name.as_str()).copied()
    }

    fn constant(&self, name: &Ident) -> Option<i64> {
        self.constants.get(name.as_str()).copied()
    }
}

pub fn eval_index(index: &Index, env: &dyn Env) -> Result<i64, EvalError> {
    match index {
        Index::Lit(v) => Ok(*v),
        Index::Param(p) => {
            env.parameter(p).ok_or_else(|| EvalError::Unbound { kind: "parameter", name: p.to_string() })
        }
        Index::Const(c) => env.constant(c).ok_or_else(|| EvalError::Unbound { kind: "constant", name: c.to_string() }),
    }
}

/// Evaluates `expr` in `env`. `imply` is material implication.
pub fn eval_expr(expr: &Expr, env: &dyn Env) -> Result<Value, EvalError> {
    let int = |e: &Expr| -> Result<i64, EvalError> {
        eval_expr(e, env)?.as_int().ok_or_else(|| EvalError::TypeMismatch { expr: e.to_string(), expected: "integer" })
    };
    let boolean = |e: &Expr| -> Result<bool, EvalError> {
        eval_expr(e, env)?.as_bool().ok_or_else(|| EvalError::TypeMismatch { expr: e.to_string(), expected: "boolean" })
    };
    Ok(match expr {
        Expr::Int(v) => Value::Int(*v),
        Expr::Bool(b) => Value::Bool(*b),
        Expr::Var(r) => {
            let index = r.index.as_ref().map(|i| eval_index(i, env)).transpose()?;
            let v = env.variable(&r.name, index, r.field.as_ref()).ok_or_else(|| EvalError::Unbound {
                kind: "variable",
                name: slot_name(r.name.as_str(), index, r.field.as_ref().map(Ident::as_str)),
            })?;
            Value::Int(v)
        }
        Expr::Clock(c) => {
            Value::Int(env.clock(c).ok_or_else(|| EvalError::Unbound { kind: "clock", name: c.to_string() })?)
        }
        Expr::Param(p) => {
            Value::Int(env.parameter(p).ok_or_else(|| EvalError::Unbound { kind: "parameter", name: p.to_string() })?)
        }
        Expr::Const(c) => {
            Value::Int(env.constant(c).ok_or_else(|| EvalError::Unbound { kind: "constant", name: c.to_string() })?)
        }
        Expr::Add(a, b) => Value::Int(int(a)? + int(b)?),
        Expr::Sub(a, b) => Value::Int(int(a)? - int(b)?),
        Expr::Cmp(op, a, b) => Value::Bool(op.apply(int(a)?, int(b)?)),
        Expr::Not(a) => Value::Bool(!boolean(a)?),
        Expr::And(a, b) => Value::Bool(boolean(a)? && boolean(b)?),
        Expr::Or(a, b) => Value::Bool(boolean(a)? || boolean(b)?),
        Expr::Imply(a, b) => Value::Bool(!boolean(a)? || boolean(b)?),
    })
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Index::Lit(v) => write!(f, "{v}"),
            Index::Param(p) | Index::Const(p) => write!(f, "{p}"),
        }
    }
}

impl fmt::Display for VarRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        if let Some(i) = &self.index {
            write!(f, "[{i}]")?;
        }
        if let Some(field) = &self.field {
            write!(f, ".{field}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // `right_assoc` marks operators whose left operand needs parentheses at
        // equal precedence.
        let child = |f: &mut fmt::Formatter<'_>, e: &Expr, min: u8| -> fmt::Result {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        let binary = |f: &mut fmt::Formatter<'_>, a: &Expr, op: &str, b: &Expr, right_assoc: bool| {
            let p = self.precedence();
            let (lmin, rmin) = if right_assoc { (p + 1, p) } else { (p, p + 1) };
            child(f, a, lmin)?;
            write!(f, " {op} ")?;
            child(f, b, rmin)
        };
        match self {
            Expr::Int(v) => write!(f, "{v}"),
            Expr::Bool(b) => write!(f, "{b}"),
            Expr::Var(r) => write!(f, "{r}"),
            Expr::Clock(n) | Expr::Param(n) | Expr::Const(n) => write!(f, "{n}"),
            Expr::Add(a, b) => binary(f, a, "+", b, false),
            Expr::Sub(a, b) => binary(f, a, "-", b, false),
            Expr::Cmp(op, a, b) => {
                child(f, a, 6)?;
                write!(f, " {} ", op.symbol())?;
                child(f, b, 6)
            }
            Expr::Not(a) => {
                f.write_str("not ")?;
                child(f, a, 4)
            }
            Expr::And(a, b) => binary(f, a, "and", b, false),
            Expr::Or(a, b) => binary(f, a, "or", b, false),
            Expr::Imply(a, b) => binary(f, a, "imply", b, true),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counter_below_max_retransmits() {
        let env = MapEnv::default().with_var("counter", 0).with_const("MAX_RETRANS", 2);
        let e = Expr::var("counter").lt(Expr::konst("MAX_RETRANS"));
        assert_eq!(eval_expr(&e, &env), Ok(Value::Bool(true)));
    }

    #[test]
    fn vacuous_implication() {
        let env = MapEnv::default().with_var("cur_state", 0).with_const("CLOSED", 0).with_const("ESTABLISHED", 4);
        let e = Expr::var("cur_state").eq(Expr::konst("ESTABLISHED")).imply(Expr::Bool(false));
        assert_eq!(eval_expr(&e, &env), Ok(Value::Bool(true)));
    }

    #[test]
    fn hogging_inner_conjunct() {
        let env = MapEnv::default()
            .with_var("tcb[0].peer", 1)
            .with_var("tcb[0].cur_state", 3)
            .with_const("CLOSED", 0)
            .with_const("SYN_RECEIVED", 3);
        let e = Expr::elem("tcb", Index::Lit(0), "peer")
            .eq(Expr::Int(1))
            .and(Expr::elem("tcb", Index::Lit(0), "cur_state").ne(Expr::konst("CLOSED")));
        assert_eq!(eval_expr(&e, &env), Ok(Value::Bool(true)));
    }

    #[test]
    fn unbound_name_is_an_error() {
        let e = Expr::var("missing").eq(Expr::Int(0));
        let err = eval_expr(&e, &MapEnv::default()).unwrap_err();
        assert!(matches!(err, EvalError::Unbound { kind: "variable", .. }));
        let e = Expr::elem("tcb", Index::Param(Ident::lit("j")), "peer");
        let err = eval_expr(&e, &MapEnv::default()).unwrap_err();
        assert_eq!(err, EvalError::Unbound { kind: "parameter", name: "j".into() });
    }

    #[test]
    fn type_mismatch_is_reported() {
        let e = Expr::Int(1).and(Expr::Bool(true));
        assert!(matches!(eval_expr(&e, &MapEnv::default()), Err(EvalError::TypeMismatch { expected: "boolean", .. })));
    }

    #[test]
    fn display_respects_precedence() {
        let e = Expr::var("a").eq(Expr::Int(1)).or(Expr::var("b").eq(Expr::Int(2))).and(Expr::Bool(true));
        assert_eq!(e.to_string(), "(a == 1 or b == 2) and true");
        let e = Expr::var("x").minus(Expr::var("y").minus(Expr::Int(-1)));
        assert_eq!(e.to_string(), "x - (y - -1)");
        let e = Expr::Bool(true).imply(Expr::Bool(false)).imply(Expr::Bool(true));
        assert_eq!(e.to_string(), "(true imply false) imply true");
        let e = Expr::var("a").eq(Expr::Int(0)).not();
        assert_eq!(e.to_string(), "not a == 0");
    }

    #[test]
    fn evaluation_is_pure() {
        let env = MapEnv::default().with_var("x", 3).with_clock("t", 1);
        let e = Expr::var("x").plus(Expr::Int(2)).le(Expr::clock("t").plus(Expr::Int(4)));
        let first = eval_expr(&e, &env);
        for _ in 0..10 {
            assert_eq!(eval_expr(&e, &env), first);
        }
    }
}
