use crate::automata::{Edge, Expr, Location, ProcessTemplate, SystemDef, UpdateStep, VarRef, VariableDecl};

use super::*;

pub const STATES: [&str; 5] = ["CLOSED", "LISTEN", "COOKIE_WAIT", "COOKIE_ECHOED", "ESTABLISHED"];
pub const CHANNELS: [&str; 6] = ["initiation", "init_ack", "cookie_echo", "cookie_ack", "abort_init", "end_assoc"];

/// Four-way handshake: the server answers `initiation` without keeping
/// state and allocates a tcb entry only on `cookie_ack`.
pub fn build_sctp_system(cfg: &ScenarioConfig) -> Result<SystemDef, ConfigError> {
    check_protocol(cfg, Protocol::Sctp)?;
    let mut def = skeleton(cfg, &STATES, &CHANNELS, "LISTEN");
    instantiate(&mut def, cfg, server(cfg), legit_client(cfg), illegit_client(cfg));
    Ok(def)
}

fn legit_client(cfg: &ScenarioConfig) -> ProcessTemplate {
    let mut t = client_template(LEGIT_CLIENT, cfg, STATES.len(), true);
    t.locations = vec![
        Location::normal("LC0").initial(),
        Location::normal("LC1").with_invariant(timer_le_t()),
        Location::committed("LC2"),
        Location::normal("LC3").with_invariant(timer_le_t()),
    ];
    let restart = |state: &str| {
        vec![
            mark_sender(),
            UpdateStep::Assign(VarRef::scalar("counter"), Expr::Int(0)),
            UpdateStep::ResetClock(crate::automata::Ident::lit("timer")),
            set_state(state),
        ]
    };
    t.edges = vec![
        Edge::new("LC0", "LC1")
            .tag("open")
            .guard(Expr::var("cur_state").eq(Expr::konst("CLOSED")))
            .send("initiation")
            .updates(restart("COOKIE_WAIT")),
        Edge::new("LC1", "LC2").guard(in_time()).receive("init_ack"),
        Edge::new("LC1", "LC0").guard(addressed()).receive("abort_init").updates(full_reset()),
        Edge::new("LC1", "LC1")
            .tag("retransmit")
            .guard(retransmit_due())
            .send("initiation")
            .updates(retransmit_update()),
        Edge::new("LC1", "LC0").tag("discard").updates(full_reset()),
        Edge::new("LC2", "LC3").send("cookie_echo").updates(restart("COOKIE_ECHOED")),
        Edge::new("LC2", "LC0").tag("discard").updates(full_reset()),
        Edge::new("LC3", "LC0").guard(in_time()).receive("cookie_ack").updates([set_state("ESTABLISHED")]),
        Edge::new("LC3", "LC0").guard(addressed()).receive("abort_init").updates(full_reset()),
        Edge::new("LC3", "LC3")
            .tag("retransmit")
            .guard(retransmit_due())
            .send("cookie_echo")
            .updates(retransmit_update()),
        Edge::new("LC3", "LC0").tag("discard").updates(full_reset()),
        Edge::new("LC0", "LC0")
            .tag("close")
            .guard(Expr::var("cur_state").eq(Expr::konst("ESTABLISHED")))
            .send("end_assoc")
            .updates([mark_sender()])
            .updates(full_reset()),
    ];
    t
}

fn illegit_client(cfg: &ScenarioConfig) -> ProcessTemplate {
    let mut t = client_template(ILLEGIT_CLIENT, cfg, STATES.len(), false);
    t.locations = vec![Location::normal("IC0").initial()];
    t.edges = vec![Edge::new("IC0", "IC0").tag("flood").send("initiation").updates([mark_sender()])];
    t
}

fn server(cfg: &ScenarioConfig) -> ProcessTemplate {
    let last = cfg.resources() as i64 - 1;
    let n_clients = cfg.n_clients() as i64;
    let mut t = ProcessTemplate::new(SERVER);
    t.locals.push(VariableDecl::int("requester", NONE, n_clients - 1, NONE));
    t.locations = vec![Location::normal("S0").initial(), Location::committed("S1"), Location::committed("S2")];
    t.edges = vec![
        Edge::new("S0", "S1").receive("initiation").assign(VarRef::scalar("requester"), Expr::var("last_sender")),
        Edge::new("S1", "S0").tag("stateless").guard(any_free(cfg)).send("init_ack").updates(reply_to_requester()),
        Edge::new("S1", "S0").send("abort_init").updates(reply_to_requester()),
        Edge::new("S1", "S0").tag("discard").updates(drop_requester()),
        Edge::new("S0", "S2").receive("cookie_echo").assign(VarRef::scalar("requester"), Expr::var("last_sender")),
        Edge::new("S2", "S0")
            .select("j", 0, last)
            .guard(free(sel("j")))
            .send("cookie_ack")
            .assign(tcb_ref(sel("j"), "peer"), Expr::var("requester"))
            .assign(tcb_ref(sel("j"), "cur_state"), Expr::konst("ESTABLISHED"))
            .updates(reply_to_requester()),
        Edge::new("S2", "S0").send("abort_init").updates(reply_to_requester()),
        Edge::new("S2", "S0").tag("discard").updates(drop_requester()),
        Edge::new("S0", "S0")
            .select("j", 0, last)
            .guard(matches_sender(sel("j"), "ESTABLISHED"))
            .receive("end_assoc")
            .updates(release(sel("j"))),
    ];
    t
}
