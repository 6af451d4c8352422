use super::*;
use crate::automata::{validate_system, validate_template, Edge, Shape, Sync};
use crate::property::parse_property;

fn tcp(legit: usize, illegit: usize, resources: usize, max_retrans: i64) -> SystemDef {
    build_tcp_system(&ScenarioConfig::new(Protocol::Tcp, legit, illegit, resources, 2, max_retrans)).unwrap()
}

fn sctp(legit: usize, illegit: usize, resources: usize) -> SystemDef {
    build_sctp_system(&ScenarioConfig::new(Protocol::Sctp, legit, illegit, resources, 2, 1)).unwrap()
}

fn writes_tcb(e: &Edge) -> bool {
    e.update.iter().any(|u| matches!(u, UpdateStep::Assign(r, _) if r.name.as_str() == "tcb"))
}

fn tcb_state_writes(e: &Edge, state: &str) -> bool {
    e.update.iter().any(|u| {
        matches!(u, UpdateStep::Assign(r, v)
            if r.name.as_str() == "tcb"
                && r.field.as_ref().is_some_and(|f| f.as_str() == "cur_state")
                && *v == Expr::konst(state))
    })
}

fn channel(e: &Edge) -> Option<&str> {
    e.sync.channel().map(|c| c.as_str())
}

#[test]
fn tcp_system_shape() {
    let def = tcp(1, 1, 2, 2);
    assert_eq!(def.processes.len(), 3);
    assert_eq!(def.channels.len(), 6);
    let tcb = def.globals.iter().find(|g| g.name.as_str() == "tcb").unwrap();
    assert_eq!(tcb.len, Some(2));
    assert!(matches!(tcb.shape, Shape::Record(ref f) if f.len() == 2));
    assert_eq!(def.process_name(0), "Server");
    assert_eq!(def.process_name(1), "Legit_Client(0)");
    assert_eq!(def.process_name(2), "Illegit_Client(1)");
}

#[test]
fn sctp_system_shape() {
    let def = sctp(2, 1, 3);
    assert_eq!(def.processes.len(), 4);
    assert_eq!(def.channels.len(), 6);
    assert_eq!(def.process_name(3), "Illegit_Client(2)");
}

#[test]
fn built_templates_validate() {
    for def in [tcp(1, 1, 2, 1), tcp(2, 3, 1, 0), tcp(0, 0, 1, 1), sctp(1, 1, 2), sctp(3, 0, 2), sctp(0, 2, 1)] {
        for t in &def.templates {
            assert_eq!(validate_template(t, &def), vec![], "{}", t.name);
        }
        assert_eq!(validate_system(&def), vec![]);
    }
}

#[test]
fn builders_are_deterministic() {
    assert_eq!(tcp(2, 1, 3, 1), tcp(2, 1, 3, 1));
    assert_eq!(sctp(2, 1, 3), sctp(2, 1, 3));
}

#[test]
fn channel_completeness() {
    for (def, names) in [(tcp(1, 1, 2, 1), tcp::CHANNELS), (sctp(1, 1, 2), sctp::CHANNELS)] {
        let declared: Vec<&str> = def.channels.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(declared, names);
        for t in &def.templates {
            for e in &t.edges {
                if let Some(c) = channel(e) {
                    assert!(names.contains(&c), "{c}");
                }
            }
        }
    }
}

#[test]
fn full_reset_restores_client_variables() {
    let reset = full_reset();
    for def in [tcp(1, 1, 2, 1), sctp(1, 1, 2)] {
        let client = def.templates.iter().find(|t| t.name.as_str() == LEGIT_CLIENT).unwrap();
        let to_lc0: Vec<&Edge> = client
            .edges
            .iter()
            .filter(|e| e.target.as_str() == "LC0" && !e.update.iter().any(|u| *u == set_state("ESTABLISHED")))
            .collect();
        assert!(to_lc0.len() >= 4);
        for e in to_lc0 {
            for step in &reset {
                assert!(e.update.contains(step), "{:?} -> {:?}", e.source, e.target);
            }
        }
    }
}

#[test]
fn tcp_allocation_happens_only_on_syn_ack() {
    let def = tcp(1, 1, 2, 1);
    let allocating: Vec<&Edge> =
        def.templates.iter().flat_map(|t| &t.edges).filter(|e| tcb_state_writes(e, "SYN_RECEIVED")).collect();
    assert_eq!(allocating.len(), 1);
    assert_eq!(allocating[0].sync, Sync::Send(Ident::lit("syn_ack")));
}

#[test]
fn sctp_keeps_no_tcb_state_before_cookie_ack() {
    let def = sctp(2, 2, 2);
    let writers: Vec<(Option<&str>, bool)> = def
        .templates
        .iter()
        .flat_map(|t| &t.edges)
        .filter(|e| writes_tcb(e))
        .map(|e| (channel(e), matches!(e.sync, Sync::Send(_))))
        .collect();
    // cookie_ack allocates; end_assoc only releases entries cookie_ack set up.
    assert_eq!(writers, vec![(Some("cookie_ack"), true), (Some("end_assoc"), false)]);
    let end = def.templates[0].edges.iter().find(|e| channel(e) == Some("end_assoc")).unwrap();
    assert!(format!("{}", end.guard).contains("ESTABLISHED"));
}

#[test]
fn wrong_protocol_is_a_config_error() {
    let cfg = ScenarioConfig::desk(Protocol::Sctp);
    assert_eq!(
        build_tcp_system(&cfg),
        Err(ConfigError::WrongProtocol { expected: Protocol::Tcp, found: Protocol::Sctp })
    );
    let bad = ScenarioConfig { resources: Some(0), ..ScenarioConfig::desk(Protocol::Tcp) };
    assert!(matches!(build_system(&bad), Err(ConfigError::Invalid(_))));
}

#[test]
fn standard_property_texts() {
    let cfg = ScenarioConfig::desk(Protocol::Tcp);
    let props = standard_properties(Protocol::Tcp, &cfg);
    let names: Vec<&str> = props.iter().map(|p| p.name.as_str()).collect();
    assert_eq!(names, STANDARD_NAMES);
    let half = &props[0];
    assert!(half.text.starts_with("A[] forall (i: int[0,0])"), "{}", half.text);
    assert!(half.text.contains("exists (j: int[0,1])"));
    assert!(props[1].text.contains("cur_state != CLOSED"));
    assert!(props[2].text.contains("cur_state == SYN_RECEIVED"));
    let sctp_strict =
        standard_property(Protocol::Sctp, &ScenarioConfig::desk(Protocol::Sctp), "hogging-strict").unwrap();
    assert!(sctp_strict.text.contains("cur_state == ESTABLISHED"));
    for p in &props {
        parse_property(&p.text).unwrap();
    }
    let none = ScenarioConfig { n_legit: 0, ..cfg };
    assert_eq!(standard_property(Protocol::Tcp, &none, "happy-path").unwrap().text, "E<> false");
}
