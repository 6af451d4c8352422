//! Modelling vocabulary for networks of discrete-time automata.
//!
//! A [`SystemDef`] declares global bounded variables, broadcast channels,
//! constants and a set of [`ProcessTemplate`]s instantiated with concrete
//! parameter values. Templates are built programmatically; [`validate_system`]
//! checks them before they are compiled for exploration.

mod expr;
mod ident;
mod model;
mod validate;

pub use expr::{eval_expr, eval_index, slot_name, CmpOp, Env, EvalError, Expr, Index, MapEnv, Value, VarRef};
pub use ident::{Ident, IdentError};
pub use model::{
    Channel, ChannelKind, ClockDecl, Edge, IntRange, IntSpec, Location, LocationKind, Parameter, ProcessInstance,
    ProcessTemplate, Select, Shape, Sync, SystemDef, Update, UpdateStep, VariableDecl,
};
pub use validate::{validate_system, validate_template, ModelError, Rule};
