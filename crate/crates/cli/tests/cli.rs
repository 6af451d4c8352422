use std::path::Path;
use std::process::Command;

use handshake_cli::{run, RunReport, EXIT_INCONCLUSIVE, EXIT_MISMATCH, EXIT_OK, EXIT_USAGE};

const DESK: [&str; 10] = ["--legit", "1", "--illegit", "1", "--resources", "2", "--T", "2", "--max-retrans", "1"];

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut full = vec!["handshake"];
    full.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn desk(head: &[&str], tail: &[&str]) -> Vec<String> {
    head.iter().chain(DESK.iter()).chain(tail.iter()).map(|s| s.to_string()).collect()
}

fn cli_owned(args: &[String]) -> (i32, String, String) {
    cli(&args.iter().map(String::as_str).collect::<Vec<_>>())
}

#[test]
fn tcp_hogging_expect_reachable_exits_zero() {
    let (code, out, _) =
        cli_owned(&desk(&["check", "--protocol", "tcp"], &["--prop", "hogging", "--expect", "reachable"]));
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.contains("verdict: reachable"));
}

#[test]
fn sctp_hogging_expect_unreachable_exits_zero() {
    let (code, out, _) =
        cli_owned(&desk(&["check", "--protocol", "sctp"], &["--prop", "hogging", "--expect", "unreachable"]));
    assert_eq!(code, EXIT_OK, "{out}");
}

#[test]
fn tcp_half_open_expect_holds_is_a_mismatch() {
    let (code, out, _) = cli_owned(&desk(&["check", "tcp"], &["--prop", "half-open", "--expect", "holds"]));
    assert_eq!(code, EXIT_MISMATCH);
    assert!(out.contains("outcome: mismatch"));
}

#[test]
fn expectations_pair_with_props_by_position() {
    let (code, out, _) = cli_owned(&desk(
        &["check", "tcp"],
        &["--prop", "half-open", "--prop", "happy-path", "--expect", "violated", "--expect", "reachable"],
    ));
    assert_eq!(code, EXIT_OK, "{out}");
    let (code, _, _) = cli_owned(&desk(
        &["check", "tcp"],
        &["--prop", "half-open", "--prop", "happy-path", "--expect", "reachable", "--expect", "violated"],
    ));
    assert_eq!(code, EXIT_MISMATCH);
}

#[test]
fn limit_hit_under_expectation_is_inconclusive() {
    let (code, out, _) =
        cli_owned(&desk(&["check", "sctp"], &["--prop", "half-open", "--expect", "holds", "--max-states", "5"]));
    assert_eq!(code, EXIT_INCONCLUSIVE, "{out}");
    assert!(out.contains("verdict: inconclusive"));
    let (code, _, _) = cli_owned(&desk(&["check", "sctp"], &["--prop", "half-open", "--max-states", "5"]));
    assert_eq!(code, EXIT_OK, "no expectation, nothing to contradict");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["check", "tcp", "--prop", "nope"],
        vec!["check", "tcp", "--expect", "holds"],
        vec!["check", "--protocol", "udp"],
        vec!["check", "tcp", "--protocol", "sctp"],
        vec!["check", "tcp", "--legit", "0", "--illegit", "0"],
        vec!["check", "tcp", "--format", "xml"],
        vec!["check", "tcp", "--query-file", "/nonexistent/q.txt"],
        vec!["export", "tcp", "--format", "svg"],
        vec!["frobnicate"],
    ] {
        let (code, _, err) = cli(&args);
        assert_eq!(code, EXIT_USAGE, "{args:?}: {err}");
        assert!(!err.is_empty(), "{args:?}");
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("desk.cfg");
    std::fs::write(
        &cfg,
        "# desk\nprotocol = sctp\nn_legit = 1\nn_illegit = 1\nresources = 2\nT = 2\nmax_retrans = 1\n",
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let (code, out, _) = cli(&["check", "--config", cfg, "--prop", "hogging", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let r = RunReport::from_json(&out).unwrap();
    assert_eq!(r.scenario.protocol.to_string(), "sctp");
    assert_eq!(r.properties[0].verdict, "unreachable");

    let (_, out, _) =
        cli(&["check", "--config", cfg, "--protocol", "tcp", "--T", "3", "--prop", "hogging", "--format", "json"]);
    let r = RunReport::from_json(&out).unwrap();
    assert_eq!(r.scenario.protocol.to_string(), "tcp");
    assert_eq!((r.scenario.t, r.scenario.resources, r.scenario.max_retrans), (3, 2, 1));
    assert_eq!(r.properties[0].verdict, "reachable");

    std::fs::write(dir.path().join("bad.cfg"), "speed = 9\n").unwrap();
    let bad = dir.path().join("bad.cfg");
    let (code, _, _) = cli(&["check", "--config", bad.to_str().unwrap()]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn query_file_properties_run_and_shadow_builtins() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("q.txt");
    std::fs::write(&q, "-- overrides a built-in\nname: hogging\nA[] true\n\nname: server-listens\nE<> Server.S1\n")
        .unwrap();
    let q = q.to_str().unwrap();
    let (code, out, err) = cli_owned(&desk(&["check", "tcp"], &["--query-file", q, "--format", "json"]));
    assert_eq!(code, EXIT_OK, "{err}");
    let r = RunReport::from_json(&out).unwrap();
    let names: Vec<&str> = r.properties.iter().map(|p| p.name.as_str()).collect();
    assert_eq!(names, ["hogging", "server-listens"]);
    assert_eq!(r.properties[0].verdict, "holds", "file definition wins over the built-in");
    assert_eq!(r.properties[1].verdict, "reachable");

    let (code, out, _) =
        cli_owned(&desk(&["check", "tcp"], &["--query-file", q, "--prop", "half-open", "--expect", "violated"]));
    assert_eq!(code, EXIT_OK, "built-ins stay available: {out}");

    std::fs::write(dir.path().join("bad.txt"), "name: p\nE<> (\n").unwrap();
    let bad = dir.path().join("bad.txt");
    let (code, _, err) = cli_owned(&desk(&["check", "tcp"], &["--query-file", bad.to_str().unwrap()]));
    assert_eq!(code, EXIT_USAGE, "{err}");
}

#[test]
fn text_and_json_carry_the_same_content() {
    let (_, json, _) = cli_owned(&desk(&["check", "tcp"], &["--format", "json"]));
    let (_, text, _) = cli_owned(&desk(&["check", "tcp"], &[]));
    let r = RunReport::from_json(&json).unwrap();
    let t = r.to_text();
    // Only wall-clock time differs between the two runs.
    let strip =
        |s: &str| s.lines().filter(|l| !l.trim_start().starts_with("elapsed_ms")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(&t), strip(&text));
    assert_eq!(r.properties.len(), 4);
    for p in &r.properties {
        assert!(text.contains(&format!("property {}\n", p.name)));
        assert!(text.contains(&format!("    text: {}\n", p.text)));
        assert!(text.contains(&format!("states={} ", p.stats.states)));
    }
    assert!(text.contains(&format!("engine: handshake {}", r.engine.version)));
}

#[test]
fn json_is_deterministic_apart_from_timing() {
    let args = desk(&["check", "tcp"], &["--format", "json"]);
    let a = RunReport::from_json(&cli_owned(&args).1).unwrap().without_timing();
    let b = RunReport::from_json(&cli_owned(&args).1).unwrap().without_timing();
    assert_eq!(a.to_json(), b.to_json());
    let mut par = args.clone();
    par.push("--parallel".into());
    let c = RunReport::from_json(&cli_owned(&par).1).unwrap().without_timing();
    assert_eq!(a.properties, c.properties, "parallel exploration gives the same results");
}

#[test]
fn trace_command_reads_back_reports() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let path = report.to_str().unwrap();
    let (code, _, _) = cli_owned(&desk(&["check", "tcp"], &["--format", "json", "--output", path]));
    assert_eq!(code, EXIT_OK);

    let (code, out, _) = cli(&["trace", path, "half-open"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("property half-open (violated)"));
    assert!(out.contains("Legit_Client(0).cur_state=4 (ESTABLISHED)"));

    let (code, _, err) = cli(&["trace", path, "no-such-property"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("no-such-property"));
    let (code, _, _) = cli(&["trace", "/nonexistent/r.json", "half-open"]);
    assert_eq!(code, EXIT_USAGE);

    let (_, out, _) = cli_owned(&desk(&["check", "sctp"], &["--format", "json", "--prop", "half-open"]));
    std::fs::write(&report, out).unwrap();
    let (code, _, err) = cli(&["trace", path, "half-open"]);
    assert_eq!(code, EXIT_USAGE, "a property that holds has no trace");
    assert!(err.contains("no trace"));
}

#[test]
fn trace_of_an_initially_satisfied_predicate_is_empty() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("q.txt");
    std::fs::write(&q, "name: start\nE<> Server.S0\n").unwrap();
    let report = dir.path().join("r.json");
    let (code, _, _) = cli_owned(&desk(
        &["check", "tcp"],
        &["--query-file", q.to_str().unwrap(), "--format", "json", "--output", report.to_str().unwrap()],
    ));
    assert_eq!(code, EXIT_OK);
    let (code, out, _) = cli(&["trace", report.to_str().unwrap(), "start"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("trace (0 steps)"));
    assert!(out.contains("initial state satisfies predicate"));
}

fn digraphs(dot: &str) -> Vec<(String, String)> {
    dot.split("digraph ")
        .skip(1)
        .map(|g| {
            let name = g.split_whitespace().next().unwrap().trim_matches('"').to_string();
            (name, g.to_string())
        })
        .collect()
}

#[test]
fn export_emits_one_graph_per_template() {
    let (code, out, _) = cli_owned(&desk(&["export", "tcp"], &[]));
    assert_eq!(code, EXIT_OK);
    let graphs = digraphs(&out);
    let names: Vec<&str> = graphs.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, ["Server", "Legit_Client", "Illegit_Client"]);

    let server = &graphs[0].1;
    assert!(server.contains("\"S0\" [label=\"S0\", shape=doubleoctagon"), "committed locations are marked");
    assert!(server.contains("syn?"));
    assert!(server.contains("tcb[j].cur_state == LISTEN and tcb[j].peer == NONE\\nsyn_ack!"));

    let illegit = &graphs[2].1;
    let nodes = illegit.lines().filter(|l| l.trim_start().starts_with("\"IC") && !l.contains(" -> ")).count();
    let edges: Vec<&str> = illegit.lines().filter(|l| l.contains(" -> ") && !l.contains("__start")).collect();
    assert_eq!(nodes, 1);
    assert_eq!(edges.len(), 1);
    assert!(edges[0].contains("\"IC0\" -> \"IC0\""));
    assert!(edges[0].contains("syn!"));

    let (code, out, _) = cli_owned(&desk(&["export", "--protocol", "sctp", "--format", "dot"], &[]));
    assert_eq!(code, EXIT_OK);
    assert_eq!(digraphs(&out).len(), 3);
    assert!(out.contains("init!"));
}

#[test]
fn binary_reports_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_handshake");
    let status = |args: &[String]| Command::new(bin).args(args).output().unwrap();
    let out = status(&desk(&["check", "tcp"], &["--prop", "hogging", "--expect", "reachable"]));
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let out = status(&desk(&["check", "tcp"], &["--prop", "half-open", "--expect", "holds"]));
    assert_eq!(out.status.code(), Some(EXIT_MISMATCH));
    let out = status(&["check".into(), "--bogus".into()]);
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
    let out = status(&["--help".into()]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    assert!(Path::new(bin).exists());
}

#[test]
fn trace_listings_show_the_attack_mechanisms() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let path = report.to_str().unwrap();
    cli_owned(&desk(&["check", "tcp"], &["--format", "json", "--output", path]));

    let (_, out, _) = cli(&["trace", path, "half-open"]);
    let steps: Vec<&str> = out.lines().filter(|l| l.trim_start().starts_with("step ")).collect();
    let timeout = steps.iter().position(|l| l.contains("[time-out]")).expect("server time-out step");
    let ack = steps.iter().position(|l| l.contains("ack! Legit_Client(0)")).expect("client ack step");
    assert!(timeout < ack, "{out}");
    assert!(steps[ack].contains("dropped (no receiver)"));

    let (_, out, _) = cli(&["trace", path, "hogging"]);
    let last = out.lines().rev().find(|l| l.trim_start().starts_with("variables:")).unwrap();
    for j in 0..2 {
        assert!(last.contains(&format!("tcb[{j}].cur_state=3 (SYN_RECEIVED) tcb[{j}].peer=1")), "{last}");
    }
}

#[test]
fn shipped_scenario_and_queries_reproduce_the_verdicts() {
    let root = concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios");
    let (cfg, q) = (format!("{root}/desk.cfg"), format!("{root}/queries.q"));
    for (protocol, half_open, hogging) in [("tcp", "violated", "reachable"), ("sctp", "holds", "unreachable")] {
        let (code, out, err) = cli(&[
            "check",
            protocol,
            "--config",
            &cfg,
            "--query-file",
            &q,
            "--prop",
            "query-half-open",
            "--expect",
            half_open,
            "--prop",
            "query-hogging",
            "--expect",
            hogging,
            "--prop",
            "requester-set",
            "--expect",
            "holds",
        ]);
        assert_eq!(code, EXIT_OK, "{protocol}: {out}{err}");
    }
}
