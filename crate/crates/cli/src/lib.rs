//! Command-line front end: `check`, `trace` and `export`.
//!
//! Exit codes: 0 when every expectation is met, 1 on an expectation
//! mismatch, 2 on a usage or input error, 3 when an expected property is
//! inconclusive and nothing mismatched.

pub mod dot;
pub mod report;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use handshake_core::checker::{check_with, Limits, Mode};
use handshake_core::models::{standard_properties, ConfigError, ConfigOverrides};
use handshake_core::property::{parse_query_file, ElabError, ParseError, QueryFileError};
use handshake_core::semantics::Network;
use handshake_core::{build_system, elaborate, parse_property, IdsScope, Protocol, ScenarioConfig};

pub use report::{exit_code, names_for, Origin, Outcome, PropertyReport, RunReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("query file: {0}")]
    QueryFile(#[from] QueryFileError),
    #[error("property `{name}`: {error}")]
    Parse { name: String, error: ParseError },
    #[error("property `{name}`: {error}")]
    Elab { name: String, error: ElabError },
    #[error("invalid model: {0}")]
    Model(String),
    #[error("checker: {0}")]
    Check(String),
    #[error("report: {0}")]
    Report(String),
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

#[derive(Debug, Parser)]
#[command(name = "handshake", version, about = "Model checker for TCP and SCTP handshakes under SYN flooding")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check built-in or query-file properties against a scenario.
    Check(CheckArgs),
    /// Print the trace of one property from a JSON report.
    Trace(TraceArgs),
    /// Export the scenario's templates as diagrams.
    Export(ExportArgs),
}

#[derive(Debug, Clone, Args, Default)]
pub struct ScenarioArgs {
    /// Protocol, as an alternative to `--protocol`.
    #[arg(value_name = "PROTOCOL")]
    pub protocol_arg: Option<Protocol>,
    /// `tcp` or `sctp`.
    #[arg(long)]
    pub protocol: Option<Protocol>,
    /// File of `key = value` lines using the scenario field names
    /// (protocol, n_legit, n_illegit, resources, T, max_retrans).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of legitimate clients.
    #[arg(long)]
    pub legit: Option<usize>,
    /// Number of illegitimate (flooding) clients.
    #[arg(long)]
    pub illegit: Option<usize>,
    /// Number of server TCB slots; defaults to one per client.
    #[arg(long)]
    pub resources: Option<usize>,
    /// Retransmission period.
    #[arg(long = "T", value_name = "T")]
    pub t: Option<i64>,
    /// Retransmissions a legitimate client may send.
    #[arg(long = "max-retrans")]
    pub max_retrans: Option<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Expectation {
    Holds,
    Violated,
    Reachable,
    Unreachable,
}

impl Expectation {
    pub fn keyword(self) -> &'static str {
        match self {
            Expectation::Holds => "holds",
            Expectation::Violated => "violated",
            Expectation::Reachable => "reachable",
            Expectation::Unreachable => "unreachable",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Property to check; repeatable. Built-in names and query-file names.
    #[arg(long = "prop")]
    pub props: Vec<String>,
    /// File of named queries, one `name:` block each.
    #[arg(long = "query-file")]
    pub query_file: Option<PathBuf>,
    /// Expected verdict for the `--prop` at the same position; repeatable.
    #[arg(long = "expect")]
    pub expect: Vec<Expectation>,
    /// Report format; both carry the same content.
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    pub format: ReportFormat,
    /// Stop with an inconclusive verdict after this many states.
    #[arg(long = "max-states", default_value_t = Limits::default().max_states)]
    pub max_states: usize,
    /// Expand each BFS level in parallel. Results are identical.
    #[arg(long)]
    pub parallel: bool,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TraceArgs {
    /// JSON report written by `check --format json`.
    pub report: PathBuf,
    /// Property name within the report.
    pub property: String,
}

#[derive(Debug, Clone, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Output format; only `dot` is supported.
    #[arg(long, default_value = "dot")]
    pub format: String,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl ScenarioArgs {
    /// Defaults, then the config file, then flags.
    pub fn resolve(&self) -> Result<ScenarioConfig, CliError> {
        let protocol = match (self.protocol_arg, self.protocol) {
            (Some(a), Some(b)) if a != b => {
                return Err(CliError::Usage(format!("conflicting protocols `{a}` and `{b}`")));
            }
            (a, b) => a.or(b),
        };
        let file = match &self.config {
            Some(p) => ConfigOverrides::parse(&read(p)?)?,
            None => ConfigOverrides::default(),
        };
        let flags = ConfigOverrides {
            protocol,
            n_legit: self.legit,
            n_illegit: self.illegit,
            resources: self.resources,
            t: self.t,
            max_retrans: self.max_retrans,
        };
        Ok(file.merge(flags).resolve()?)
    }
}

/// A property selected for checking.
#[derive(Debug, Clone)]
pub struct Selected {
    pub name: String,
    pub origin: Origin,
    pub scope: IdsScope,
    pub text: String,
    pub expected: Option<Expectation>,
}

/// Resolves `--prop`, `--query-file` and `--expect` into the list of
/// properties to check. Query-file names shadow built-in names.
pub fn select(args: &CheckArgs, cfg: &ScenarioConfig) -> Result<Vec<Selected>, CliError> {
    if args.expect.len() > args.props.len() {
        return Err(CliError::Usage(format!(
            "{} --expect value(s) but only {} --prop value(s); expectations pair with --prop by position",
            args.expect.len(),
            args.props.len()
        )));
    }
    let queries = match &args.query_file {
        Some(p) => parse_query_file(&read(p)?)?,
        None => Vec::new(),
    };
    let builtin = standard_properties(cfg.protocol, cfg);
    let from_file = |q: &handshake_core::property::NamedQuery| Selected {
        name: q.name.clone(),
        origin: Origin::QueryFile,
        scope: q.scope,
        text: q.text.clone(),
        expected: None,
    };
    let from_builtin = |p: &handshake_core::models::PropertyText| Selected {
        name: p.name.clone(),
        origin: Origin::BuiltIn,
        scope: p.scope,
        text: p.text.clone(),
        expected: None,
    };
    if args.props.is_empty() {
        return Ok(if queries.is_empty() {
            builtin.iter().map(from_builtin).collect()
        } else {
            queries.iter().map(from_file).collect()
        });
    }
    args.props
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let mut s = if let Some(q) = queries.iter().find(|q| &q.name == name) {
                from_file(q)
            } else if let Some(p) = builtin.iter().find(|p| &p.name == name) {
                from_builtin(p)
            } else {
                let mut known: Vec<&str> = builtin.iter().map(|p| p.name.as_str()).collect();
                known.extend(queries.iter().map(|q| q.name.as_str()));
                return Err(CliError::Usage(format!("unknown property `{name}` (known: {})", known.join(", "))));
            };
            s.expected = args.expect.get(k).copied();
            Ok(s)
        })
        .collect()
}

/// Checks every selected property in order and assembles the report.
pub fn run_check(cfg: &ScenarioConfig, props: &[Selected], limits: &Limits, mode: Mode) -> Result<RunReport, CliError> {
    let def = build_system(cfg)?;
    let net = Network::new(&def).map_err(|e| CliError::Model(format!("{e:?}")))?;
    let names = names_for(cfg.protocol);
    let mut reports = Vec::new();
    for p in props {
        let ast = parse_property(&p.text).map_err(|error| CliError::Parse { name: p.name.clone(), error })?;
        let prop = elaborate(&ast, &net, p.scope).map_err(|error| CliError::Elab { name: p.name.clone(), error })?;
        let out = check_with(&net, &prop, limits, mode).map_err(|e| CliError::Check(e.to_string()))?;
        let expected = p.expected.map(Expectation::keyword);
        reports.push(PropertyReport::new(&net, &names, &p.name, p.origin, p.scope, &p.text, expected, out));
    }
    Ok(RunReport {
        engine: report::EngineInfo::default(),
        scenario: cfg.into(),
        limits: report::LimitsEcho { max_states: limits.max_states, parallel: mode == Mode::Parallel },
        exit_code: exit_code(&reports),
        properties: reports,
    })
}

fn emit(text: &str, output: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    match output {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io { path: p.to_path_buf(), source }),
        None => out.write_all(text.as_bytes()).map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    }
}

fn cmd_check(args: &CheckArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = args.scenario.resolve()?;
    let props = select(args, &cfg)?;
    let mode = if args.parallel { Mode::Parallel } else { Mode::Sequential };
    let report = run_check(&cfg, &props, &Limits::with_max_states(args.max_states), mode)?;
    let text = match args.format {
        ReportFormat::Text => report.to_text(),
        ReportFormat::Json => report.to_json(),
    };
    emit(&text, args.output.as_deref(), out)?;
    Ok(report.exit_code)
}

/// Formats the trace of `property` from a report.
pub fn trace_listing(report: &RunReport, property: &str) -> Result<String, CliError> {
    let p = report
        .properties
        .iter()
        .find(|p| p.name == property)
        .ok_or_else(|| CliError::Usage(format!("report has no property `{property}`")))?;
    let t = p
        .trace
        .as_ref()
        .ok_or_else(|| CliError::Usage(format!("property `{property}` has no trace (verdict: {})", p.verdict)))?;
    Ok(format!(
        "property {} ({})\n{}",
        p.name,
        p.verdict,
        report::render_trace(t, &names_for(report.scenario.protocol))
    ))
}

fn cmd_trace(args: &TraceArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let report = RunReport::from_json(&read(&args.report)?).map_err(|e| CliError::Report(e.to_string()))?;
    emit(&trace_listing(&report, &args.property)?, None, out)?;
    Ok(EXIT_OK)
}

fn cmd_export(args: &ExportArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if args.format != "dot" {
        return Err(CliError::Usage(format!("unknown export format `{}` (supported: dot)", args.format)));
    }
    let cfg = args.scenario.resolve()?;
    let def = build_system(&cfg)?;
    emit(&dot::system_dot(&def), args.output.as_deref(), out)?;
    Ok(EXIT_OK)
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = out.write_all(rendered.as_bytes());
            } else {
                let _ = err.write_all(rendered.as_bytes());
            }
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };
    let result = match &cli.command {
        Command::Check(a) => cmd_check(a, out),
        Command::Trace(a) => cmd_trace(a, out),
        Command::Export(a) => cmd_export(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}
