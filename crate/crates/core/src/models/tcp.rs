use crate::automata::{Edge, Expr, Location, ProcessTemplate, SystemDef, UpdateStep, VarRef};

use super::*;

pub const STATES: [&str; 5] = ["CLOSED", "LISTEN", "SYN_SENT", "SYN_RECEIVED", "ESTABLISHED"];
pub const CHANNELS: [&str; 6] = ["syn", "syn_ack", "ack", "reset_syn", "reset_syn_ack", "end_conn"];

/// Three-way handshake: the server allocates a tcb entry on its `syn_ack`.
pub fn build_tcp_system(cfg: &ScenarioConfig) -> Result<SystemDef, ConfigError> {
    check_protocol(cfg, Protocol::Tcp)?;
    let mut def = skeleton(cfg, &STATES, &CHANNELS, "CLOSED");
    instantiate(&mut def, cfg, server(cfg), legit_client(cfg), illegit_client(cfg));
    Ok(def)
}

fn legit_client(cfg: &ScenarioConfig) -> ProcessTemplate {
    let mut t = client_template(LEGIT_CLIENT, cfg, STATES.len(), true);
    t.locations = vec![
        Location::normal("LC0").initial(),
        Location::normal("LC1").with_invariant(timer_le_t()),
        Location::normal("LC2"),
    ];
    t.edges = vec![
        Edge::new("LC0", "LC1")
            .tag("open")
            .guard(Expr::var("cur_state").eq(Expr::konst("CLOSED")))
            .send("syn")
            .updates([mark_sender()])
            .assign(VarRef::scalar("counter"), Expr::Int(0))
            .reset("timer")
            .updates([set_state("SYN_SENT")]),
        Edge::new("LC1", "LC2").guard(in_time()).receive("syn_ack").updates([set_state("SYN_RECEIVED")]),
        Edge::new("LC1", "LC0").guard(addressed()).receive("reset_syn").updates(full_reset()),
        Edge::new("LC1", "LC1").tag("retransmit").guard(retransmit_due()).send("syn").updates(retransmit_update()),
        Edge::new("LC1", "LC0").tag("discard").updates(full_reset()),
        Edge::new("LC2", "LC0").send("ack").updates([mark_sender(), set_state("ESTABLISHED")]),
        Edge::new("LC2", "LC0").send("reset_syn_ack").updates([mark_sender()]).updates(full_reset()),
        Edge::new("LC2", "LC0").tag("discard").updates(full_reset()),
        Edge::new("LC0", "LC0")
            .tag("close")
            .guard(Expr::var("cur_state").eq(Expr::konst("ESTABLISHED")))
            .send("end_conn")
            .updates([mark_sender()])
            .updates(full_reset()),
    ];
    t
}

fn illegit_client(cfg: &ScenarioConfig) -> ProcessTemplate {
    let mut t = client_template(ILLEGIT_CLIENT, cfg, STATES.len(), false);
    t.locations = vec![Location::normal("IC0").initial()];
    t.edges = vec![Edge::new("IC0", "IC0").tag("flood").send("syn").updates([mark_sender()])];
    t
}

fn server(cfg: &ScenarioConfig) -> ProcessTemplate {
    let last = cfg.resources() as i64 - 1;
    let n_clients = cfg.n_clients() as i64;
    let mut t = ProcessTemplate::new(SERVER);
    t.locals.push(crate::automata::VariableDecl::int("requester", NONE, n_clients - 1, NONE));
    t.locations = vec![Location::committed("S0").initial(), Location::normal("S1"), Location::committed("S2")];
    let open: Vec<UpdateStep> = (0..=last).flat_map(|j| release(crate::automata::Index::Lit(j))).collect();
    t.edges = vec![
        Edge::new("S0", "S1").tag("passive-open").updates(open),
        Edge::new("S1", "S2").receive("syn").assign(VarRef::scalar("requester"), Expr::var("last_sender")),
        Edge::new("S2", "S1")
            .select("j", 0, last)
            .guard(free(sel("j")))
            .send("syn_ack")
            .assign(tcb_ref(sel("j"), "peer"), Expr::var("requester"))
            .assign(tcb_ref(sel("j"), "cur_state"), Expr::konst("SYN_RECEIVED"))
            .updates(reply_to_requester()),
        Edge::new("S2", "S1").send("reset_syn").updates(reply_to_requester()),
        Edge::new("S2", "S1").tag("discard").updates(drop_requester()),
        Edge::new("S1", "S1")
            .select("j", 0, last)
            .guard(matches_sender(sel("j"), "SYN_RECEIVED"))
            .receive("ack")
            .assign(tcb_ref(sel("j"), "cur_state"), Expr::konst("ESTABLISHED")),
        Edge::new("S1", "S1")
            .select("j", 0, last)
            .guard(matches_sender(sel("j"), "SYN_RECEIVED"))
            .receive("reset_syn_ack")
            .updates(release(sel("j"))),
        Edge::new("S1", "S1")
            .tag("time-out")
            .select("j", 0, last)
            .guard(tcb(sel("j"), "cur_state").eq(Expr::konst("SYN_RECEIVED")))
            .updates(release(sel("j"))),
        Edge::new("S1", "S1")
            .select("j", 0, last)
            .guard(matches_sender(sel("j"), "ESTABLISHED"))
            .receive("end_conn")
            .updates(release(sel("j"))),
    ];
    t
}
