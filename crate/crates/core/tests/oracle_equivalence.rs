//! The compiled successor relation agrees with the naive interpreter on
//! every reachable state of random small systems and of the handshake
//! models.

use handshake_core::checker::{reachable_states, Limits};
use handshake_core::models::{build_system, Protocol, ScenarioConfig};
use handshake_core::semantics::Network;
use handshake_core::SystemDef;
use handshake_testkit::{canonical, random_system, NaiveState, Oracle};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const STATE_CAP: usize = 100_000;

/// Returns the number of reachable states compared.
fn assert_equivalent(def: &SystemDef) -> usize {
    let net = Network::new(def).unwrap_or_else(|e| panic!("generated system is invalid: {e:?}\n{def:#?}"));
    let oracle = Oracle::new(def);
    assert_eq!(NaiveState::from_view(&net.view(&net.initial_state())), oracle.initial());
    let states = reachable_states(&net, &Limits::with_max_states(STATE_CAP)).unwrap().expect("within cap");
    for s in &states {
        let engine = net.successors(s).unwrap().into_iter().map(|(l, n)| (l, net.view(&n)));
        let naive =
            oracle.successors(&NaiveState::from_view(&net.view(s))).unwrap().into_iter().map(|(l, n)| (l, n.to_view()));
        assert_eq!(canonical(engine), canonical(naive), "state {:?}", net.view(s));
    }
    assert_eq!(oracle.count_reachable(STATE_CAP).unwrap(), Some(states.len()));
    states.len()
}

#[test]
fn random_systems_match_the_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut total = 0;
    for _ in 0..150 {
        total += assert_equivalent(&random_system(&mut rng));
    }
    // Guards against a generator that only yields trivial systems.
    assert!(total > 2000, "{total}");
}

#[test]
fn handshake_models_match_the_oracle() {
    for protocol in [Protocol::Tcp, Protocol::Sctp] {
        for cfg in [ScenarioConfig::desk(protocol), ScenarioConfig::new(protocol, 2, 0, 1, 1, 0)] {
            assert_equivalent(&build_system(&cfg).unwrap());
        }
    }
}

#[test]
fn oracle_detects_a_changed_guard() {
    let def = build_system(&ScenarioConfig::desk(Protocol::Tcp)).unwrap();
    let net = Network::new(&def).unwrap();
    let mut altered = def.clone();
    // Drop the guard of the client's open edge.
    let client = altered.templates.iter_mut().find(|t| t.name.as_str() == "Legit_Client").unwrap();
    client.edges[0].guard = handshake_core::Expr::Bool(true);
    let oracle = Oracle::new(&altered);
    let states = reachable_states(&net, &Limits::default()).unwrap().unwrap();
    let differs = states.iter().any(|s| {
        let engine = net.successors(s).unwrap().into_iter().map(|(l, n)| (l, net.view(&n)));
        let naive = oracle.successors(&NaiveState::from_view(&net.view(s))).unwrap();
        canonical(engine) != canonical(naive.into_iter().map(|(l, n)| (l, n.to_view())))
    });
    assert!(differs);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn successor_relation_matches_oracle(seed in any::<u64>()) {
        assert_equivalent(&random_system(&mut ChaCha8Rng::seed_from_u64(seed)));
    }
}
