use serde::{Deserialize, Serialize};

use crate::automata::{CmpOp, Ident};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PathQuantifier {
    /// `A[] p`: `p` holds in every reachable state.
    Invariant,
    /// `E<> p`: some reachable state satisfies `p`.
    Reach,
}

impl PathQuantifier {
    pub fn symbol(self) -> &'static str {
        match self {
            PathQuantifier::Invariant => "A[]",
            PathQuantifier::Reach => "E<>",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PropertyAst {
    pub quantifier: PathQuantifier,
    pub pred: Pred,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quantifier {
    Forall,
    Exists,
}

impl Quantifier {
    pub fn keyword(self) -> &'static str {
        match self {
            Quantifier::Forall => "forall",
            Quantifier::Exists => "exists",
        }
    }
}

/// Binder domain: a named range (`ids` or another typedef) or `int[a,b]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RangeSpec {
    Named(Ident),
    Int(Term, Term),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pred {
    Bool(bool),
    Cmp(CmpOp, Term, Term),
    /// `Proc.Loc`: the process is at location `Loc`.
    At(ProcRef, Ident),
    Not(Box<Pred>),
    And(Box<Pred>, Box<Pred>),
    Or(Box<Pred>, Box<Pred>),
    Imply(Box<Pred>, Box<Pred>),
    Quant {
        kind: Quantifier,
        var: Ident,
        range: RangeSpec,
        body: Box<Pred>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProcRef {
    pub template: Ident,
    pub arg: Option<Box<Term>>,
}

/// `[Proc[(arg)].]var[[index]][.field]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Access {
    pub process: Option<ProcRef>,
    pub var: Ident,
    pub index: Option<Box<Term>>,
    pub field: Option<Ident>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Term {
    Int(i64),
    /// A bound variable, a constant, or a global scalar.
    Name(Ident),
    Access(Access),
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
}

// Builders used by tests and generators.
impl Pred {
    pub fn and(self, rhs: Pred) -> Pred {
        Pred::And(Box::new(self), Box::new(rhs))
    }

    pub fn or(self, rhs: Pred) -> Pred {
        Pred::Or(Box::new(self), Box::new(rhs))
    }

    pub fn imply(self, rhs: Pred) -> Pred {
        Pred::Imply(Box::new(self), Box::new(rhs))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Pred {
        Pred::Not(Box::new(self))
    }

    pub fn quant(kind: Quantifier, var: &str, range: RangeSpec, body: Pred) -> Pred {
        Pred::Quant { kind, var: Ident::lit(var), range, body: Box::new(body) }
    }
}

impl Term {
    pub fn name(n: &str) -> Term {
        Term::Name(Ident::lit(n))
    }

    pub fn plus(self, rhs: Term) -> Term {
        Term::Add(Box::new(self), Box::new(rhs))
    }

    pub fn minus(self, rhs: Term) -> Term {
        Term::Sub(Box::new(self), Box::new(rhs))
    }
}
