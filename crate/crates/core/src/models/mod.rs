//! Builders for the TCP and SCTP handshake systems and their standard
//! properties.
//!
//! Process order is fixed: the server first, then legitimate clients by id,
//! then illegitimate clients by id. Legitimate clients take ids
//! `0..n_legit`, illegitimate clients the ids after them.

mod config;
mod properties;
mod sctp;
mod tcp;

pub use config::{ConfigError, ConfigOverrides, Protocol, ScenarioConfig};
pub use properties::{standard_properties, standard_property, PropertyText, STANDARD_NAMES};
pub use sctp::{build_sctp_system, CHANNELS as SCTP_CHANNELS, STATES as SCTP_STATES};
pub use tcp::{build_tcp_system, CHANNELS as TCP_CHANNELS, STATES as TCP_STATES};

use crate::automata::{
    Channel, ClockDecl, Expr, Ident, Index, IntRange, IntSpec, Parameter, ProcessInstance, ProcessTemplate, SystemDef,
    UpdateStep, VarRef, VariableDecl,
};

/// Builds the system for `cfg.protocol`.
pub fn build_system(cfg: &ScenarioConfig) -> Result<SystemDef, ConfigError> {
    match cfg.protocol {
        Protocol::Tcp => build_tcp_system(cfg),
        Protocol::Sctp => build_sctp_system(cfg),
    }
}

pub(crate) const NONE: i64 = -1;

pub const SERVER: &str = "Server";
pub const LEGIT_CLIENT: &str = "Legit_Client";
pub const ILLEGIT_CLIENT: &str = "Illegit_Client";

pub(crate) fn check_protocol(cfg: &ScenarioConfig, expected: Protocol) -> Result<(), ConfigError> {
    if cfg.protocol != expected {
        return Err(ConfigError::WrongProtocol { expected, found: cfg.protocol });
    }
    cfg.validate()
}

/// Declarations shared by both protocols. `states` lists the state
/// constants in code order; the tcb array starts with every entry at
/// `initial_state` and no peer.
pub(crate) fn skeleton(cfg: &ScenarioConfig, states: &[&str], channels: &[&str], initial_state: &str) -> SystemDef {
    let n_clients = cfg.n_clients() as i64;
    let mut def = SystemDef::default();
    for (code, name) in states.iter().enumerate() {
        def.constants.insert(Ident::lit(name), code as i64);
    }
    def.constants.insert(Ident::lit("NONE"), NONE);
    def.constants.insert(Ident::lit("RESOURCES"), cfg.resources() as i64);
    def.constants.insert(Ident::lit("T"), cfg.t);
    def.constants.insert(Ident::lit("MAX_RETRANS"), cfg.max_retrans);
    def.typedefs.insert(Ident::lit("ids"), IntRange::new(0, n_clients - 1));
    def.typedefs.insert(Ident::lit("legit_ids"), IntRange::new(0, cfg.n_legit as i64 - 1));
    def.channels = channels.iter().map(|c| Channel::broadcast(c)).collect();

    let state_range = IntRange::new(0, states.len() as i64 - 1);
    let initial = def.constant(initial_state).expect("initial state is a declared constant");
    def.globals.push(VariableDecl::record_array(
        "tcb",
        cfg.resources(),
        vec![
            ("peer", IntSpec { range: IntRange::new(NONE, n_clients - 1), initial: NONE }),
            ("cur_state", IntSpec { range: state_range, initial }),
        ],
    ));
    def.globals.push(VariableDecl::int("last_sender", NONE, n_clients - 1, NONE));
    def
}

/// Adds the three templates and instantiates them in the fixed order.
pub(crate) fn instantiate(
    def: &mut SystemDef,
    cfg: &ScenarioConfig,
    server: ProcessTemplate,
    legit: ProcessTemplate,
    illegit: ProcessTemplate,
) {
    def.templates = vec![server, legit, illegit];
    def.processes.push(ProcessInstance { template: Ident::lit(SERVER), args: vec![] });
    for i in 0..cfg.n_legit {
        def.processes.push(ProcessInstance { template: Ident::lit(LEGIT_CLIENT), args: vec![i as i64] });
    }
    for k in 0..cfg.n_illegit {
        def.processes
            .push(ProcessInstance { template: Ident::lit(ILLEGIT_CLIENT), args: vec![(cfg.n_legit + k) as i64] });
    }
}

/// A client template with the `id` parameter and, for legitimate clients,
/// the `cur_state`/`counter` locals and the `timer` clock.
pub(crate) fn client_template(name: &str, cfg: &ScenarioConfig, n_states: usize, with_locals: bool) -> ProcessTemplate {
    let mut t = ProcessTemplate::new(name);
    let hi = cfg.n_clients().max(1) as i64 - 1;
    t.parameters.push(Parameter { name: Ident::lit("id"), range: IntRange::new(0, hi) });
    if with_locals {
        t.locals.push(VariableDecl::int("cur_state", 0, n_states as i64 - 1, 0));
        t.locals.push(VariableDecl::int("counter", 0, cfg.max_retrans, 0));
        t.clocks.push(ClockDecl { name: Ident::lit("timer"), ceiling: cfg.t + 1 });
    }
    t
}

pub(crate) fn tcb(index: Index, field: &str) -> Expr {
    Expr::elem("tcb", index, field)
}

pub(crate) fn tcb_ref(index: Index, field: &str) -> VarRef {
    VarRef::element("tcb", index, field)
}

pub(crate) fn sel(name: &str) -> Index {
    Index::Param(Ident::lit(name))
}

/// `tcb[i]` is available: LISTEN with no peer.
pub(crate) fn free(i: Index) -> Expr {
    tcb(i.clone(), "cur_state").eq(Expr::konst("LISTEN")).and(tcb(i, "peer").eq(Expr::konst("NONE")))
}

/// `tcb[i]` belongs to the last sender and is in `state`.
pub(crate) fn matches_sender(i: Index, state: &str) -> Expr {
    tcb(i.clone(), "peer").eq(Expr::var("last_sender")).and(tcb(i, "cur_state").eq(Expr::konst(state)))
}

/// Some tcb entry is free, written out over constant indices.
pub(crate) fn any_free(cfg: &ScenarioConfig) -> Expr {
    Expr::any((0..cfg.resources() as i64).map(|j| free(Index::Lit(j))))
}

pub(crate) fn release(i: Index) -> Vec<UpdateStep> {
    vec![
        UpdateStep::Assign(tcb_ref(i.clone(), "cur_state"), Expr::konst("LISTEN")),
        UpdateStep::Assign(tcb_ref(i, "peer"), Expr::konst("NONE")),
    ]
}

/// Restores a legitimate client's `cur_state`, `counter` and `timer`.
pub(crate) fn full_reset() -> Vec<UpdateStep> {
    vec![
        UpdateStep::Assign(VarRef::scalar("cur_state"), Expr::konst("CLOSED")),
        UpdateStep::Assign(VarRef::scalar("counter"), Expr::Int(0)),
        UpdateStep::ResetClock(Ident::lit("timer")),
    ]
}

pub(crate) fn mark_sender() -> UpdateStep {
    UpdateStep::Assign(VarRef::scalar("last_sender"), Expr::param("id"))
}

/// Server replies name their addressee in `last_sender`, so the scratch
/// always holds the client end of the most recent message.
pub(crate) fn reply_to_requester() -> Vec<UpdateStep> {
    vec![
        UpdateStep::Assign(VarRef::scalar("last_sender"), Expr::var("requester")),
        UpdateStep::Assign(VarRef::scalar("requester"), Expr::konst("NONE")),
    ]
}

pub(crate) fn drop_requester() -> Vec<UpdateStep> {
    vec![UpdateStep::Assign(VarRef::scalar("requester"), Expr::konst("NONE"))]
}

/// The last message concerns this client.
pub(crate) fn addressed() -> Expr {
    Expr::var("last_sender").eq(Expr::param("id"))
}

pub(crate) fn set_state(state: &str) -> UpdateStep {
    UpdateStep::Assign(VarRef::scalar("cur_state"), Expr::konst(state))
}

pub(crate) fn timer_le_t() -> Expr {
    Expr::clock("timer").le(Expr::konst("T"))
}

/// Guard of acknowledgment receipt while waiting.
pub(crate) fn in_time() -> Expr {
    addressed().and(Expr::var("counter").le(Expr::konst("MAX_RETRANS"))).and(timer_le_t())
}

/// Guard of a retransmission.
pub(crate) fn retransmit_due() -> Expr {
    Expr::clock("timer").eq(Expr::konst("T")).and(Expr::var("counter").lt(Expr::konst("MAX_RETRANS")))
}

pub(crate) fn retransmit_update() -> Vec<UpdateStep> {
    vec![
        mark_sender(),
        UpdateStep::Assign(VarRef::scalar("counter"), Expr::var("counter").plus(Expr::Int(1))),
        UpdateStep::ResetClock(Ident::lit("timer")),
    ]
}

#[cfg(test)]
mod tests;
