//! Operational semantics of composed networks: initial state, unit delays,
//! broadcast synchronisation with message drop, committed-location priority,
//! and canonical state keys.

mod network;
mod state;
mod step;

pub use network::{InvalidModel, Network};
pub use state::{DecodeError, StateKey, StateView, SystemState};
pub use step::{EdgeRef, StepError, TransitionLabel};

#[cfg(test)]
mod tests;
