//! Run reports and their text and JSON renderings.
//!
//! Both renderings carry the same fields in the same order. Map-valued
//! fields are `BTreeMap`s, so the JSON output is deterministic apart from
//! `elapsed_ms`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use handshake_core::checker::{CheckOutcome, LimitHit, StateSpaceStats, Verdict};
use handshake_core::semantics::{Network, StateView};
use handshake_core::{IdsScope, Protocol, ScenarioConfig, Trace};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineInfo {
    pub name: String,
    pub version: String,
}

impl Default for EngineInfo {
    fn default() -> Self {
        EngineInfo { name: "handshake".into(), version: handshake_core::ENGINE_VERSION.into() }
    }
}

/// The resolved scenario, with `resources` made explicit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioEcho {
    pub protocol: Protocol,
    pub n_legit: usize,
    pub n_illegit: usize,
    pub resources: usize,
    #[serde(rename = "T")]
    pub t: i64,
    pub max_retrans: i64,
}

impl From<&ScenarioConfig> for ScenarioEcho {
    fn from(c: &ScenarioConfig) -> Self {
        ScenarioEcho {
            protocol: c.protocol,
            n_legit: c.n_legit,
            n_illegit: c.n_illegit,
            resources: c.resources(),
            t: c.t,
            max_retrans: c.max_retrans,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitsEcho {
    pub max_states: usize,
    pub parallel: bool,
}

/// Where a property's text came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    BuiltIn,
    QueryFile,
}

/// How a verdict compares with `--expect`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    /// No expectation was given.
    Unchecked,
    Met,
    Mismatch,
    /// The search hit a limit while an expectation was set.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub states: usize,
    pub transitions: usize,
    pub max_depth: usize,
    pub peak_frontier: usize,
    pub complete: bool,
}

impl From<&StateSpaceStats> for Stats {
    fn from(s: &StateSpaceStats) -> Self {
        Stats {
            states: s.states,
            transitions: s.transitions,
            max_depth: s.max_depth,
            peak_frontier: s.peak_frontier,
            complete: s.complete,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    /// 1-based; step `k` leads from state `k - 1` to state `k`.
    pub index: usize,
    pub label: String,
    /// Changed locations, variables and clocks, in key order.
    pub changes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceReport {
    pub length: usize,
    pub initial_state: StateView,
    pub steps: Vec<TraceStep>,
    pub final_state: StateView,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub name: String,
    pub origin: Origin,
    pub scope: IdsScope,
    /// Query source text.
    pub text: String,
    pub verdict: String,
    pub expected: Option<String>,
    pub outcome: Outcome,
    /// Set when the verdict is `inconclusive`.
    pub limit: Option<LimitHit>,
    pub stats: Stats,
    /// Wall-clock time in milliseconds. Excluded from determinism checks.
    pub elapsed_ms: Option<f64>,
    pub trace: Option<TraceReport>,
    /// The engine trace, kept for replay by library callers.
    #[serde(skip)]
    pub raw_trace: Option<Trace>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub engine: EngineInfo,
    pub scenario: ScenarioEcho,
    pub limits: LimitsEcho,
    pub properties: Vec<PropertyReport>,
    pub exit_code: i32,
}

/// Renders a state value, naming protocol states for `cur_state` slots.
fn value(key: &str, v: i64, state_names: &[String]) -> String {
    match usize::try_from(v).ok().and_then(|i| state_names.get(i)) {
        Some(name) if key.ends_with("cur_state") => format!("{v} ({name})"),
        _ => v.to_string(),
    }
}

fn diff(before: &StateView, after: &StateView, state_names: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    for (p, loc) in &after.locations {
        if before.locations.get(p) != Some(loc) {
            out.push(format!("{p}: {} -> {loc}", before.locations.get(p).map_or("?", String::as_str)));
        }
    }
    for (old, new) in [(&before.variables, &after.variables), (&before.clocks, &after.clocks)] {
        for (k, v) in new {
            if old.get(k) != Some(v) {
                let was = old.get(k).map_or("?".to_string(), |o| value(k, *o, state_names));
                out.push(format!("{k}: {was} -> {}", value(k, *v, state_names)));
            }
        }
    }
    out
}

pub fn trace_report(net: &Network, trace: &Trace, names: &[String]) -> TraceReport {
    let views: Vec<StateView> = trace.states.iter().map(|s| net.view(s)).collect();
    let steps = trace
        .labels
        .iter()
        .enumerate()
        .map(|(k, l)| TraceStep {
            index: k + 1,
            label: net.describe_label(l),
            changes: diff(&views[k], &views[k + 1], names),
        })
        .collect();
    TraceReport {
        length: trace.len(),
        initial_state: views[0].clone(),
        steps,
        final_state: views.last().unwrap().clone(),
    }
}

impl PropertyReport {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        net: &Network,
        names: &[String],
        name: &str,
        origin: Origin,
        scope: IdsScope,
        text: &str,
        expected: Option<&str>,
        out: CheckOutcome,
    ) -> Self {
        let verdict = out.verdict.keyword().to_string();
        let outcome = match (expected, &out.verdict) {
            (None, _) => Outcome::Unchecked,
            (Some(_), Verdict::Inconclusive { .. }) => Outcome::Inconclusive,
            (Some(e), _) if e == verdict => Outcome::Met,
            (Some(_), _) => Outcome::Mismatch,
        };
        let limit = match &out.verdict {
            Verdict::Inconclusive { limit, .. } => Some(*limit),
            _ => None,
        };
        PropertyReport {
            name: name.to_string(),
            origin,
            scope,
            text: text.to_string(),
            verdict,
            expected: expected.map(str::to_string),
            outcome,
            limit,
            stats: Stats::from(&out.stats),
            elapsed_ms: Some(out.stats.elapsed.as_secs_f64() * 1000.0),
            trace: out.verdict.trace().map(|t| trace_report(net, t, names)),
            raw_trace: out.verdict.trace().cloned(),
        }
    }
}

/// Exit status: 1 on any mismatch, else 3 if an expected property was
/// inconclusive, else 0.
pub fn exit_code(props: &[PropertyReport]) -> i32 {
    if props.iter().any(|p| p.outcome == Outcome::Mismatch) {
        1
    } else if props.iter().any(|p| p.outcome == Outcome::Inconclusive) {
        3
    } else {
        0
    }
}

fn kebab<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

fn write_state(out: &mut String, view: &StateView, names: &[String]) {
    let locs: Vec<String> = view.locations.iter().map(|(p, l)| format!("{p}={l}")).collect();
    let _ = writeln!(out, "      locations: {}", locs.join(" "));
    let vars: Vec<String> = view.variables.iter().map(|(k, v)| format!("{k}={}", value(k, *v, names))).collect();
    let _ = writeln!(out, "      variables: {}", vars.join(" "));
    if !view.clocks.is_empty() {
        let clocks: Vec<String> = view.clocks.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(out, "      clocks: {}", clocks.join(" "));
    }
}

/// Step listing shared by `check` text output and the `trace` command.
pub fn render_trace(trace: &TraceReport, names: &[String]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "    trace ({} steps):", trace.length);
    let _ = writeln!(out, "    step 0: initial state");
    write_state(&mut out, &trace.initial_state, names);
    if trace.steps.is_empty() {
        let _ = writeln!(out, "    initial state satisfies predicate");
    }
    for s in &trace.steps {
        let _ = writeln!(out, "    step {}: {}", s.index, s.label);
        for c in &s.changes {
            let _ = writeln!(out, "      {c}");
        }
    }
    if !trace.steps.is_empty() {
        let _ = writeln!(out, "    final state:");
        write_state(&mut out, &trace.final_state, names);
    }
    out
}

/// State names as rendered in reports, recovered from the scenario echo.
pub fn names_for(protocol: Protocol) -> Vec<String> {
    let names: [&str; 5] = match protocol {
        Protocol::Tcp => handshake_core::models::TCP_STATES,
        Protocol::Sctp => handshake_core::models::SCTP_STATES,
    };
    names.iter().map(|s| s.to_string()).collect()
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    pub fn from_json(text: &str) -> Result<RunReport, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// A copy with every `elapsed_ms` cleared, for determinism checks.
    pub fn without_timing(&self) -> RunReport {
        let mut r = self.clone();
        for p in &mut r.properties {
            p.elapsed_ms = None;
        }
        r
    }

    pub fn to_text(&self) -> String {
        let names = names_for(self.scenario.protocol);
        let sc = &self.scenario;
        let mut out = String::new();
        let _ = writeln!(out, "engine: {} {}", self.engine.name, self.engine.version);
        let _ = writeln!(
            out,
            "scenario: protocol={} n_legit={} n_illegit={} resources={} T={} max_retrans={}",
            sc.protocol, sc.n_legit, sc.n_illegit, sc.resources, sc.t, sc.max_retrans
        );
        let _ = writeln!(out, "limits: max_states={} parallel={}", self.limits.max_states, self.limits.parallel);
        for p in &self.properties {
            let _ = writeln!(out, "property {}", p.name);
            let _ = writeln!(out, "    origin: {}", kebab(&p.origin));
            let _ = writeln!(out, "    scope: {}", kebab(&p.scope));
            let _ = writeln!(out, "    text: {}", p.text);
            let _ = writeln!(out, "    verdict: {}", p.verdict);
            let _ = writeln!(out, "    expected: {}", p.expected.as_deref().unwrap_or("-"));
            let _ = writeln!(out, "    outcome: {}", kebab(&p.outcome));
            if let Some(l) = &p.limit {
                let _ = writeln!(out, "    limit: {}", kebab(l));
            }
            let s = &p.stats;
            let _ = writeln!(
                out,
                "    stats: states={} transitions={} max_depth={} peak_frontier={} complete={}",
                s.states, s.transitions, s.max_depth, s.peak_frontier, s.complete
            );
            if let Some(ms) = p.elapsed_ms {
                let _ = writeln!(out, "    elapsed_ms: {ms:.3}");
            }
            match &p.trace {
                Some(t) => out.push_str(&render_trace(t, &names)),
                None => {
                    let _ = writeln!(out, "    trace: none");
                }
            }
        }
        let _ = writeln!(out, "exit_code: {}", self.exit_code);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with_outcome(outcome: Outcome) -> PropertyReport {
        PropertyReport {
            name: "p".into(),
            origin: Origin::BuiltIn,
            scope: IdsScope::All,
            text: "E<> true".into(),
            verdict: "reachable".into(),
            expected: None,
            outcome,
            limit: None,
            stats: Stats { states: 1, transitions: 0, max_depth: 0, peak_frontier: 1, complete: false },
            elapsed_ms: None,
            trace: None,
            raw_trace: None,
        }
    }

    #[test]
    fn mismatch_outranks_inconclusive() {
        use Outcome::*;
        let code = |os: &[Outcome]| exit_code(&os.iter().map(|o| with_outcome(*o)).collect::<Vec<_>>());
        assert_eq!(code(&[]), 0);
        assert_eq!(code(&[Unchecked, Met]), 0);
        assert_eq!(code(&[Met, Inconclusive]), 3);
        assert_eq!(code(&[Inconclusive, Mismatch, Met]), 1);
    }

    #[test]
    fn cur_state_values_are_named() {
        let names = names_for(Protocol::Tcp);
        assert_eq!(value("tcb[0].cur_state", 3, &names), "3 (SYN_RECEIVED)");
        assert_eq!(value("tcb[0].peer", 3, &names), "3");
        assert_eq!(value("tcb[0].cur_state", 99, &names), "99");
    }
}
