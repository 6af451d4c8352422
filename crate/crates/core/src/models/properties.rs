use serde::{Deserialize, Serialize};

use crate::property::IdsScope;

use super::{Protocol, ScenarioConfig};

/// Names of the built-in properties, in report order.
pub const STANDARD_NAMES: [&str; 4] = ["half-open", "hogging", "hogging-strict", "happy-path"];

/// A named query text together with the reading of `ids` it expects.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyText {
    pub name: String,
    pub text: String,
    pub scope: IdsScope,
}

fn range(n: usize) -> String {
    format!("int[0,{}]", n as i64 - 1)
}

/// The built-in queries with quantifier ranges instantiated from `cfg`.
///
/// `half-open` and `happy-path` range over legitimate client ids,
/// `hogging` and `hogging-strict` over every client id.
pub fn standard_properties(protocol: Protocol, cfg: &ScenarioConfig) -> Vec<PropertyText> {
    let legit = range(cfg.n_legit);
    let all = range(cfg.n_clients());
    let res = range(cfg.resources());
    let strict_state = match protocol {
        Protocol::Tcp => "SYN_RECEIVED",
        Protocol::Sctp => "ESTABLISHED",
    };
    let matched = "Server.tcb[j].peer == i and Server.tcb[j].cur_state == ESTABLISHED";
    let hog = |cond: &str| {
        format!(
            "E<> exists (i: {all}) (forall (j: {res}) (Server.tcb[j].peer == i and Server.tcb[j].cur_state {cond}))"
        )
    };
    let happy = if cfg.n_legit == 0 {
        "E<> false".to_string()
    } else {
        format!("E<> exists (i: {legit}) (Legit_Client(i).cur_state == ESTABLISHED and exists (j: {res}) ({matched}))")
    };
    let entries = [
        (
            "half-open",
            format!(
                "A[] forall (i: {legit}) (Legit_Client(i).cur_state == ESTABLISHED imply exists (j: {res}) ({matched}))"
            ),
            IdsScope::LegitOnly,
        ),
        ("hogging", hog("!= CLOSED"), IdsScope::All),
        ("hogging-strict", hog(&format!("== {strict_state}")), IdsScope::All),
        ("happy-path", happy, IdsScope::LegitOnly),
    ];
    entries.into_iter().map(|(name, text, scope)| PropertyText { name: name.to_string(), text, scope }).collect()
}

/// Looks up one built-in property by name.
pub fn standard_property(protocol: Protocol, cfg: &ScenarioConfig, name: &str) -> Option<PropertyText> {
    standard_properties(protocol, cfg).into_iter().find(|p| p.name == name)
}
