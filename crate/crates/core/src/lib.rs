//! Explicit-state model checking of discrete-time networked protocol automata.
//!
//! The crate is organised bottom-up:
//!
//! * [`automata`] holds the modelling vocabulary (templates, locations, edges,
//!   expressions, broadcast channels, bounded variables, discrete clocks) and
//!   the well-formedness validator.
//! * [`semantics`] compiles a [`automata::SystemDef`] into a [`semantics::Network`]
//!   and generates successor states under unit delays, broadcast
//!   synchronisation with message drop, and committed-location priority.
//! * [`models`] builds the TCP three-way and SCTP four-way handshake systems,
//!   including a flooding attacker, together with their standard queries.
//! * [`property`] parses the `A[]` / `E<>` query fragment and elaborates it into
//!   ground predicates over concrete state slots.
//! * [`checker`] runs breadth-first exploration, computes verdicts and
//!   reconstructs replayable traces.

pub mod automata;
pub mod checker;
pub mod models;
pub mod property;
pub mod semantics;

/// Version string reported by front ends.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

pub use automata::{Expr, Ident, ModelError, ProcessTemplate, SystemDef};
pub use checker::{check, explore, replay, Limits, Trace, Verdict};
pub use models::{build_system, standard_properties, Protocol, ScenarioConfig};
pub use property::{elaborate, parse_property, print_property, ElaboratedProperty, IdsScope};
pub use semantics::{Network, StateKey, SystemState, TransitionLabel};
