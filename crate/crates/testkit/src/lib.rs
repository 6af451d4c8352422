//! Independent oracles and random generators for testing `handshake-core`.
//!
//! Nothing here reuses the engine's compiled representation: the successor
//! oracle interprets [`handshake_core::SystemDef`] over name-keyed states and
//! the reference evaluator walks query ASTs by string lookup.

mod gen_ast;
mod gen_system;
mod oracle;
mod reference;

pub use gen_ast::{random_ast, random_model_property, Vocabulary};
pub use gen_system::random_system;
pub use oracle::{canonical, NaiveState, Oracle};
pub use reference::{eval_predicate, is_target};

use rand::Rng;

use handshake_core::semantics::{Network, SystemState};

/// A uniformly random state within the declared ranges of `net`. It need not
/// be reachable.
pub fn random_state<R: Rng>(net: &Network, rng: &mut R) -> SystemState {
    SystemState {
        locations: (0..net.process_count()).map(|p| rng.gen_range(0..net.location_count(p))).collect(),
        vars: (0..net.var_count()).map(|k| rng.gen_range(net.var_range(k).lo..=net.var_range(k).hi)).collect(),
        clocks: (0..net.clock_count()).map(|c| rng.gen_range(0..=net.clock_ceiling(c))).collect(),
    }
}
