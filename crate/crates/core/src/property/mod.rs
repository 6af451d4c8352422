//! The `A[] p` / `E<> p` query fragment: parsing, printing and elaboration
//! into ground predicates.

mod ast;
mod elaborate;
mod lexer;
mod parser;
mod printer;
mod query_file;

pub use ast::{Access, PathQuantifier, Pred, ProcRef, PropertyAst, Quantifier, RangeSpec, Term};
pub use elaborate::{elaborate, ElabError, ElaboratedProperty, GroundPredicate, GroundTerm, IdsScope};
pub use parser::{parse_predicate, parse_property, ParseError, KEYWORDS};
pub use printer::print_property;
pub use query_file::{parse_query_file, NamedQuery, QueryFileError};

#[cfg(test)]
mod tests;
