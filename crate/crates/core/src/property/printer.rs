use std::fmt::{self, Write};

use super::ast::{Access, Pred, ProcRef, PropertyAst, RangeSpec, Term};

/// Canonical text of a property. Parsing the output yields an equal AST.
pub fn print_property(ast: &PropertyAst) -> String {
    format!("{} {}", ast.quantifier.symbol(), ast.pred)
}

// Quantifiers bind to everything on their right, so as operands they are
// always parenthesised.
fn prec(p: &Pred) -> u8 {
    match p {
        Pred::Quant { .. } => 0,
        Pred::Imply(..) => 1,
        Pred::Or(..) => 2,
        Pred::And(..) => 3,
        Pred::Not(..) => 4,
        Pred::Bool(_) | Pred::Cmp(..) | Pred::At(..) => 5,
    }
}

fn operand(f: &mut fmt::Formatter<'_>, p: &Pred, wrap: bool) -> fmt::Result {
    if wrap {
        write!(f, "({p})")
    } else {
        write!(f, "{p}")
    }
}

impl fmt::Display for Pred {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pred::Bool(b) => write!(f, "{b}"),
            Pred::Cmp(op, a, b) => write!(f, "{a} {} {b}", op.symbol()),
            Pred::At(proc, loc) => write!(f, "{proc}.{loc}"),
            Pred::Not(a) => {
                f.write_str("not ")?;
                operand(f, a, prec(a) < 4)
            }
            Pred::And(a, b) | Pred::Or(a, b) | Pred::Imply(a, b) => {
                let (me, kw) = match self {
                    Pred::And(..) => (3, "and"),
                    Pred::Or(..) => (2, "or"),
                    _ => (1, "imply"),
                };
                // `imply` associates to the right, `and`/`or` to the left.
                let (wrap_l, wrap_r) =
                    if me == 1 { (prec(a) <= me, prec(b) < me) } else { (prec(a) < me, prec(b) <= me) };
                operand(f, a, wrap_l || prec(a) == 0)?;
                write!(f, " {kw} ")?;
                operand(f, b, wrap_r || prec(b) == 0)
            }
            Pred::Quant { kind, var, range, body } => {
                write!(f, "{} ({var}: {range}) ({body})", kind.keyword())
            }
        }
    }
}

impl fmt::Display for RangeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RangeSpec::Named(n) => write!(f, "{n}"),
            RangeSpec::Int(lo, hi) => write!(f, "int[{lo},{hi}]"),
        }
    }
}

impl fmt::Display for ProcRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.template)?;
        if let Some(arg) = &self.arg {
            write!(f, "({arg})")?;
        }
        Ok(())
    }
}

impl fmt::Display for Access {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = &self.process {
            write!(f, "{p}.")?;
        }
        write!(f, "{}", self.var)?;
        if let Some(i) = &self.index {
            write!(f, "[{i}]")?;
        }
        if let Some(field) = &self.field {
            write!(f, ".{field}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Int(v) => write!(f, "{v}"),
            Term::Name(n) => write!(f, "{n}"),
            Term::Access(a) => write!(f, "{a}"),
            Term::Add(a, b) | Term::Sub(a, b) => {
                let op = if matches!(self, Term::Add(..)) { '+' } else { '-' };
                write!(f, "{a} {op} ")?;
                if matches!(**b, Term::Add(..) | Term::Sub(..)) {
                    f.write_char('(')?;
                    write!(f, "{b}")?;
                    f.write_char(')')
                } else {
                    write!(f, "{b}")
                }
            }
        }
    }
}
