use proptest::prelude::*;

use super::*;
use crate::models::{build_system, Protocol, ScenarioConfig};

fn desk(protocol: Protocol) -> Network {
    Network::new(&build_system(&ScenarioConfig::desk(protocol)).unwrap()).unwrap()
}

fn loc(net: &Network, s: &SystemState, process: &str) -> String {
    let pid = (0..net.process_count()).find(|&p| net.process_name(p) == process).unwrap();
    net.location_name(pid, s.locations[pid]).to_string()
}

fn var(net: &Network, s: &SystemState, name: &str) -> i64 {
    let slot = (0..net.var_count()).find(|&k| net.var_name(k) == name).unwrap_or_else(|| panic!("{name}"));
    s.vars[slot]
}

fn clock(net: &Network, s: &SystemState, name: &str) -> i64 {
    s.clocks[(0..net.clock_count()).find(|&c| net.clock_name(c) == name).unwrap()]
}

/// Follows the unique successor whose rendering starts with `needle`.
fn step(net: &Network, s: &SystemState, needle: &str) -> (TransitionLabel, SystemState) {
    let matches: Vec<_> =
        net.successors(s).unwrap().into_iter().filter(|(l, _)| net.describe_label(l).starts_with(needle)).collect();
    assert_eq!(
        matches.len(),
        1,
        "{needle}: {:?}",
        matches.iter().map(|(l, _)| net.describe_label(l)).collect::<Vec<_>>()
    );
    matches.into_iter().next().unwrap()
}

fn all_reachable(net: &Network) -> Vec<SystemState> {
    crate::checker::reachable_states(net, &crate::checker::Limits::default()).unwrap().unwrap()
}

#[test]
fn tcp_initial_state() {
    let net = desk(Protocol::Tcp);
    let s = net.initial_state();
    assert_eq!(loc(&net, &s, "Server"), "S0");
    assert_eq!(loc(&net, &s, "Legit_Client(0)"), "LC0");
    assert_eq!(loc(&net, &s, "Illegit_Client(1)"), "IC0");
    assert_eq!(var(&net, &s, "Legit_Client(0).cur_state"), 0);
    for j in 0..2 {
        assert_eq!(var(&net, &s, &format!("tcb[{j}].cur_state")), 0);
        assert_eq!(var(&net, &s, &format!("tcb[{j}].peer")), -1);
    }
    assert!(s.clocks.iter().all(|&c| c == 0));
    assert!(net.is_committed_active(&s));
    assert_eq!(net.apply_delay(&s), None);
}

#[test]
fn sctp_initial_state() {
    let net = desk(Protocol::Sctp);
    let s = net.initial_state();
    assert_eq!(loc(&net, &s, "Server"), "S0");
    assert_eq!(loc(&net, &s, "Legit_Client(0)"), "LC0");
    assert!(!net.is_committed_active(&s));
}

#[test]
fn empty_system() {
    let net = Network::new(&crate::SystemDef::default()).unwrap();
    let s = net.initial_state();
    assert!(s.locations.is_empty());
    assert!(!net.is_committed_active(&s));
    assert_eq!(net.successors(&s).unwrap(), vec![(TransitionLabel::Delay, s.clone())]);
    assert_eq!(net.decode(&net.encode(&s)).unwrap(), s);
}

#[test]
fn tcp_initial_successor_is_passive_open() {
    let net = desk(Protocol::Tcp);
    let succ = net.successors(&net.initial_state()).unwrap();
    assert_eq!(succ.len(), 1);
    let (label, s) = &succ[0];
    assert!(matches!(label, TransitionLabel::Internal(e) if e.process == 0 && e.edge == 0));
    assert_eq!(loc(&net, s, "Server"), "S1");
    assert_eq!(var(&net, s, "tcb[1].cur_state"), 1);
}

#[test]
fn delay_respects_invariants() {
    let net = desk(Protocol::Tcp);
    let (_, s) = step(&net, &net.initial_state(), "internal Server: S0 -> S1 [passive-open]");
    let (_, s) = step(&net, &s, "syn! Legit_Client(0): LC0 -> LC1");
    // The server sits in committed S2 after receiving the syn.
    assert_eq!(loc(&net, &s, "Server"), "S2");
    assert_eq!(net.apply_delay(&s), None);
    let (_, s) = step(&net, &s, "internal Server: S2 -> S1 [discard]");
    assert_eq!(clock(&net, &s, "Legit_Client(0).timer"), 0);
    let s1 = net.apply_delay(&s).unwrap();
    assert_eq!(clock(&net, &s1, "Legit_Client(0).timer"), 1);
    let s2 = net.apply_delay(&s1).unwrap();
    assert_eq!(clock(&net, &s2, "Legit_Client(0).timer"), 2);
    // timer == T at LC1: time cannot pass.
    assert_eq!(net.apply_delay(&s2), None);
}

#[test]
fn broadcast_from_attacker_reaches_server_only() {
    let net = desk(Protocol::Tcp);
    let (_, s) = step(&net, &net.initial_state(), "internal Server: S0 -> S1 [passive-open]");
    let attacker = EdgeRef { process: 2, edge: 0, select: None };
    let out = net.fire_broadcast(&s, attacker).unwrap();
    assert_eq!(out.len(), 1);
    let (TransitionLabel::Broadcast { receivers, .. }, next) = &out[0] else { panic!() };
    assert_eq!(receivers.len(), 1);
    assert_eq!(receivers[0].process, 0);
    assert_eq!(loc(&net, next, "Server"), "S2");
    assert_eq!(loc(&net, next, "Legit_Client(0)"), "LC0");
    assert_eq!(var(&net, next, "Server.requester"), 1);
}

#[test]
fn unmatched_ack_is_dropped() {
    let net = desk(Protocol::Tcp);
    let mut s = net.initial_state();
    for needle in [
        "internal Server: S0 -> S1 [passive-open]",
        "syn! Legit_Client(0)",
        "syn_ack! Server: S2 -> S1 (j = 0)",
        "internal Server: S1 -> S1 [time-out]",
    ] {
        s = step(&net, &s, needle).1;
    }
    let before = s.clone();
    let (label, after) = step(&net, &s, "ack! Legit_Client(0)");
    let TransitionLabel::Broadcast { receivers, .. } = label else { panic!() };
    assert!(receivers.is_empty());
    assert_eq!(loc(&net, &after, "Legit_Client(0)"), "LC0");
    assert_eq!(var(&net, &after, "Legit_Client(0).cur_state"), 4);
    for j in 0..2 {
        let k = format!("tcb[{j}].cur_state");
        assert_eq!(var(&net, &after, &k), var(&net, &before, &k));
    }
}

#[test]
fn end_conn_frees_matching_entry() {
    let net = desk(Protocol::Tcp);
    let mut s = net.initial_state();
    for needle in [
        "internal Server: S0 -> S1 [passive-open]",
        "syn! Legit_Client(0)",
        "syn_ack! Server: S2 -> S1 (j = 0)",
        "ack! Legit_Client(0)",
    ] {
        s = step(&net, &s, needle).1;
    }
    assert_eq!(var(&net, &s, "tcb[0].cur_state"), 4);
    let (_, s) = step(&net, &s, "end_conn!");
    assert_eq!(var(&net, &s, "tcb[0].cur_state"), 1);
    assert_eq!(var(&net, &s, "tcb[0].peer"), -1);
    assert_eq!(var(&net, &s, "Legit_Client(0).cur_state"), 0);
}

#[test]
fn fire_broadcast_checks_preconditions() {
    let net = desk(Protocol::Tcp);
    let s = net.initial_state();
    // Server edge 0 is internal, not a send.
    assert!(matches!(
        net.fire_broadcast(&s, EdgeRef { process: 0, edge: 0, select: None }),
        Err(StepError::Precondition(_))
    ));
    // Client not at LC1.
    assert!(net.fire_broadcast(&s, EdgeRef { process: 1, edge: 3, select: None }).is_err());
    assert!(net.fire_broadcast(&s, EdgeRef { process: 9, edge: 0, select: None }).is_err());
    // syn_ack needs a select value.
    assert!(net.fire_broadcast(&s, EdgeRef { process: 0, edge: 2, select: None }).is_err());
}

#[test]
fn sctp_server_in_s1_is_committed() {
    let net = desk(Protocol::Sctp);
    let (_, s) = step(&net, &net.initial_state(), "initiation! Illegit_Client(1)");
    assert_eq!(loc(&net, &s, "Server"), "S1");
    assert!(net.is_committed_active(&s));
    let (_, after) = step(&net, &s, "init_ack!");
    for j in 0..2 {
        for f in ["peer", "cur_state"] {
            let k = format!("tcb[{j}].{f}");
            assert_eq!(var(&net, &after, &k), var(&net, &s, &k));
        }
    }
}

#[test]
fn semantic_invariants_hold_on_reachable_states() {
    for protocol in [Protocol::Tcp, Protocol::Sctp] {
        let net = desk(protocol);
        for s in all_reachable(&net) {
            assert!(net.is_valid_state(&s));
            let succ = net.successors(&s).unwrap();
            assert_eq!(succ, net.successors(&s).unwrap(), "determinism");
            let committed = net.is_committed_active(&s);
            for (label, next) in &succ {
                match label {
                    TransitionLabel::Delay => {
                        assert!(!committed);
                        assert_eq!((&next.locations, &next.vars), (&s.locations, &s.vars));
                        for (c, (&a, &b)) in s.clocks.iter().zip(&next.clocks).enumerate() {
                            assert!(b == a + 1 || (a == b && a == net.clock_ceiling(c)));
                        }
                    }
                    TransitionLabel::Internal(e) => {
                        assert!(!committed || net.is_committed_location(e.process, s.locations[e.process]));
                    }
                    TransitionLabel::Broadcast { sender, receivers, .. } => {
                        assert!(!committed || net.is_committed_location(sender.process, s.locations[sender.process]));
                        let mut ids: Vec<usize> = receivers.iter().map(|r| r.process).collect();
                        assert!(!ids.contains(&sender.process));
                        ids.dedup();
                        assert_eq!(ids.len(), receivers.len());
                        assert!(ids.windows(2).all(|w| w[0] < w[1]));
                    }
                }
            }
            // No duplicates.
            for (i, a) in succ.iter().enumerate() {
                assert!(!succ[i + 1..].contains(a));
            }
        }
    }
}

#[test]
fn reachable_keys_are_collision_free() {
    let net = desk(Protocol::Tcp);
    let states = all_reachable(&net);
    let keys: std::collections::HashSet<StateKey> = states.iter().map(|s| net.encode(s)).collect();
    assert_eq!(keys.len(), states.len());
    for s in &states {
        let k = net.encode(s);
        assert_eq!(k.as_bytes().len(), net.key_width());
        assert_eq!(&net.decode(&k).unwrap(), s);
    }
}

#[test]
fn decode_rejects_malformed_keys() {
    let net = desk(Protocol::Tcp);
    let k = net.encode(&net.initial_state());
    let short = StateKey(k.as_bytes()[1..].into());
    assert!(matches!(net.decode(&short), Err(DecodeError::Length { .. })));
    let mut bytes = k.as_bytes().to_vec();
    bytes[0] = 200;
    assert!(matches!(net.decode(&StateKey(bytes.into())), Err(DecodeError::OutOfRange { .. })));
}

#[test]
fn clock_difference_changes_key() {
    let net = desk(Protocol::Tcp);
    let a = net.initial_state();
    let mut b = a.clone();
    b.clocks[0] = 1;
    assert_ne!(net.encode(&a), net.encode(&b));
}

fn arb_state(net: &Network) -> impl Strategy<Value = SystemState> {
    let locs: Vec<_> = (0..net.process_count()).map(|p| 0..net.location_count(p)).collect();
    let vars: Vec<_> = (0..net.var_count()).map(|k| net.var_range(k).lo..=net.var_range(k).hi).collect();
    let clocks: Vec<_> = (0..net.clock_count()).map(|c| 0..=net.clock_ceiling(c)).collect();
    (locs, vars, clocks).prop_map(|(locations, vars, clocks)| SystemState { locations, vars, clocks })
}

proptest! {
    #[test]
    fn encode_decode_round_trips(s in arb_state(&desk(Protocol::Sctp))) {
        let net = desk(Protocol::Sctp);
        prop_assert_eq!(net.decode(&net.encode(&s)).unwrap(), s);
    }
}
