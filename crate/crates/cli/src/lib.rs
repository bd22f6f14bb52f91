//! Command-line front end: scenario replay, property checks and synthesis.

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use otconv::simulator::{
    builtin_scenario, builtin_scenarios, expected_outcome, parse_scenario, run_all_orders, run_scenario,
    scenario_to_json, RunOutcome, Scenario,
};
use otconv::synth::SynthesisReport;
use otconv::verify::{check_tp1, check_tp2, OperationDomain, Tp1Report, Tp2Report};
use otconv::{select_it, Operation, TransformError};
use serde::{Deserialize, Serialize};

pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILS: i32 = 1;
    pub const USAGE: i32 = 2;
}

#[derive(Parser, Debug)]
#[command(name = "otconv", version, about = "Operational transformation workbench for replicated strings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct DomainArgs {
    /// Largest operation position.
    #[arg(long, default_value_t = 3)]
    pub max_pos: i64,
    /// Insert alphabet.
    #[arg(long, default_value = "abc")]
    pub alphabet: String,
    /// How many operations a domain operation may have been transformed against.
    #[arg(long, default_value_t = 0)]
    pub depth: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a scenario (built-in name or JSON file).
    Simulate {
        /// Scenario name or path.
        name: Option<String>,
        #[arg(long)]
        scenario: Option<String>,
        /// IT function; defaults to the scenario's own.
        #[arg(long)]
        it: Option<String>,
        /// Enumerate every causally admissible delivery order.
        #[arg(long)]
        all_orders: bool,
    },
    /// Exhaustively check TP1.
    CheckTp1 {
        #[arg(long)]
        it: String,
        #[command(flatten)]
        domain: DomainArgs,
    },
    /// Exhaustively check TP2.
    CheckTp2 {
        #[arg(long)]
        it: String,
        #[command(flatten)]
        domain: DomainArgs,
    },
    /// Search shift strategies for TP1, filter the coherent ones, check TP2.
    Synthesize {
        #[command(flatten)]
        domain: DomainArgs,
    },
    /// List the built-in scenarios or export one as JSON.
    Scenarios {
        #[arg(long)]
        export: Option<String>,
    },
    /// Run every built-in scenario and compare with its reference outcome.
    ReplayAll,
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type CmdResult = Result<i32, Failure>;

/// Parses `args` and runs the command; returns the exit code.
pub fn run(args: impl IntoIterator<Item = impl Into<OsString> + Clone>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            exit::USAGE
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> CmdResult {
    match &cli.command {
        Command::Simulate { name, scenario, it, all_orders } => {
            let which = match (name, scenario) {
                (Some(_), Some(_)) => return Err(Failure("give the scenario once, positionally or with --scenario".into())),
                (Some(s), None) | (None, Some(s)) => s,
                (None, None) => return Err(Failure("simulate needs a scenario name or path".into())),
            };
            let sc = load_scenario(which)?;
            simulate(&sc, it.as_deref(), *all_orders, cli.format, out)
        }
        Command::CheckTp1 { it, domain } => {
            let f = select_it(it)?;
            let report = check_tp1(&f, &domain_from(domain)?);
            emit(out, cli.format, &Tp1Json::from(&report), || tp1_text(&report))?;
            Ok(if report.holds() { exit::OK } else { exit::FAILS })
        }
        Command::CheckTp2 { it, domain } => {
            let f = select_it(it)?;
            let report = check_tp2(&f, &domain_from(domain)?);
            emit(out, cli.format, &Tp2Json::from(&report), || tp2_text(&report))?;
            Ok(if report.holds() { exit::OK } else { exit::FAILS })
        }
        Command::Synthesize { domain } => {
            let report = SynthesisReport::run(&domain_from(domain)?);
            emit(out, cli.format, &report.to_json(), || report.to_string())?;
            Ok(if report.satisfiable() { exit::OK } else { exit::FAILS })
        }
        Command::Scenarios { export } => {
            if let Some(name) = export {
                let sc = builtin_scenario(name).ok_or_else(|| Failure(format!("no built-in scenario `{name}`")))?;
                writeln!(out, "{}", scenario_to_json(&sc))?;
                return Ok(exit::OK);
            }
            let list: Vec<ScenarioSummary> = builtin_scenarios()
                .iter()
                .map(|s| ScenarioSummary {
                    name: s.name.clone(),
                    sites: s.sites,
                    initial: s.initial.to_string(),
                    it: s.it.clone(),
                    operations: s.operation_count(),
                })
                .collect();
            emit(out, cli.format, &list, || {
                list.iter()
                    .map(|s| format!("{:<18} sites={} initial=\"{}\" it={} ops={}", s.name, s.sites, s.initial, s.it, s.operations))
                    .collect::<Vec<_>>()
                    .join("\n")
            })?;
            Ok(exit::OK)
        }
        Command::ReplayAll => replay_all(cli.format, out),
    }
}

fn domain_from(d: &DomainArgs) -> Result<OperationDomain, Failure> {
    Ok(OperationDomain::new(d.max_pos, &d.alphabet, d.depth)?)
}

fn emit<T: Serialize>(out: &mut dyn Write, format: Format, value: &T, text: impl FnOnce() -> String) -> Result<(), Failure> {
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(value)?)?,
        Format::Text => writeln!(out, "{}", text())?,
    }
    Ok(())
}

/// A built-in scenario name, or else a path to a scenario file.
pub fn load_scenario(which: &str) -> Result<Scenario, String> {
    if let Some(sc) = builtin_scenario(which) {
        return Ok(sc);
    }
    let path = Path::new(which);
    if !path.exists() {
        return Err(format!("no built-in scenario or file named `{which}`"));
    }
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_scenario(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn simulate(sc: &Scenario, it: Option<&str>, all_orders: bool, format: Format, out: &mut dyn Write) -> CmdResult {
    let f = select_it(it.unwrap_or(&sc.it))?;
    if all_orders {
        let outcomes = run_all_orders(sc, &f)?;
        let report = AllOrdersJson {
            scenario: sc.name.clone(),
            it: f.name(),
            diverging: outcomes.iter().filter(|o| !o.converged).count(),
            outcomes: outcomes.iter().map(OrderJson::from).collect(),
        };
        emit(out, format, &report, || {
            let mut lines = vec![format!("scenario {} under {}: {} orders", report.scenario, report.it, report.outcomes.len())];
            for o in &report.outcomes {
                let docs: Vec<String> = o.docs.iter().map(|d| format!("\"{d}\"")).collect();
                lines.push(format!("  {:?} {} converged={}", o.order, docs.join(" "), o.converged));
            }
            lines.push(format!("diverging orders: {}", report.diverging));
            lines.push(format!("converged={}", report.diverging == 0));
            lines.join("\n")
        })?;
        return Ok(if report.diverging == 0 { exit::OK } else { exit::FAILS });
    }
    let outcome = run_scenario(sc, &f)?;
    emit(out, format, &RunJson::from(&outcome), || outcome.to_string())?;
    Ok(if outcome.converged { exit::OK } else { exit::FAILS })
}

fn replay_all(format: Format, out: &mut dyn Write) -> CmdResult {
    let mut entries = Vec::new();
    for sc in builtin_scenarios() {
        let f = select_it(&sc.it)?;
        let outcome = run_scenario(&sc, &f)?;
        let expected = expected_outcome(&sc.name).ok_or_else(|| Failure(format!("no reference for {}", sc.name)))?;
        entries.push(ReplayJson {
            scenario: sc.name.clone(),
            it: sc.it.clone(),
            converged: outcome.converged,
            expected_converged: expected.converged,
            docs: expected
                .docs
                .iter()
                .map(|(site, want)| SiteDocJson {
                    site: *site,
                    expected: want.to_string(),
                    actual: outcome.doc(*site).map(|d| d.to_string()).unwrap_or_default(),
                })
                .collect(),
            matches: expected.matches(&outcome),
        });
    }
    let all = entries.iter().all(|e| e.matches);
    emit(out, format, &entries, || {
        let mut lines: Vec<String> = entries
            .iter()
            .map(|e| {
                let docs: Vec<String> = e.docs.iter().map(|d| format!("site{}=\"{}\"", d.site, d.actual)).collect();
                format!(
                    "{} {:<18} it={:<9} converged={} {}",
                    if e.matches { "ok  " } else { "FAIL" },
                    e.scenario,
                    e.it,
                    e.converged,
                    docs.join(" ")
                )
            })
            .collect();
        lines.push(format!("reproduced {}/{}", entries.iter().filter(|e| e.matches).count(), entries.len()));
        lines.join("\n")
    })?;
    Ok(if all { exit::OK } else { exit::FAILS })
}

fn result_string(r: &Result<Operation, TransformError>) -> String {
    match r {
        Ok(op) => op.to_string(),
        Err(e) => format!("error: {e}"),
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct BoundsJson {
    pub max_pos: i64,
    pub alphabet: String,
    pub probe: String,
    pub depth: usize,
}

impl From<&OperationDomain> for BoundsJson {
    fn from(d: &OperationDomain) -> Self {
        BoundsJson { max_pos: d.max_pos, alphabet: d.alphabet_string(), probe: d.probe.to_string(), depth: d.depth }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct Tp1WitnessJson {
    pub o1: String,
    pub o2: String,
    pub o12: String,
    pub o21: String,
    pub left: String,
    pub right: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct Tp1Json {
    pub function: String,
    pub bounds: BoundsJson,
    pub holds: bool,
    pub operations: usize,
    pub instances: usize,
    pub witnesses: Vec<Tp1WitnessJson>,
}

impl From<&Tp1Report> for Tp1Json {
    fn from(r: &Tp1Report) -> Self {
        Tp1Json {
            function: r.function.clone(),
            bounds: (&r.domain).into(),
            holds: r.holds(),
            operations: r.operations,
            instances: r.instances,
            witnesses: r
                .witnesses
                .iter()
                .map(|w| Tp1WitnessJson {
                    o1: w.o1.to_string(),
                    o2: w.o2.to_string(),
                    o12: result_string(&w.o12),
                    o21: result_string(&w.o21),
                    left: w.left.to_string(),
                    right: w.right.to_string(),
                })
                .collect(),
        }
    }
}

fn tp1_text(r: &Tp1Report) -> String {
    let mut lines = vec![
        format!("TP1 for {} on {}: {}", r.function, r.domain, if r.holds() { "holds" } else { "fails" }),
        format!("operations: {}, pairs: {}, witnesses: {}", r.operations, r.instances, r.witnesses.len()),
    ];
    for w in &r.witnesses {
        lines.push(format!(
            "  ({}, {}): IT(o1,o2)={} IT(o2,o1)={}; [o1;o21]={} [o2;o12]={}",
            w.o1,
            w.o2,
            result_string(&w.o12),
            result_string(&w.o21),
            w.left,
            w.right
        ));
    }
    lines.join("\n")
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct Tp2WitnessJson {
    pub o1: String,
    pub o2: String,
    pub o3: String,
    pub o12: String,
    pub o21: String,
    pub via_first: String,
    pub via_second: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct Tp2Json {
    pub function: String,
    pub bounds: BoundsJson,
    pub holds: bool,
    pub operations: usize,
    pub instances: usize,
    pub witnesses: Vec<Tp2WitnessJson>,
}

impl From<&Tp2Report> for Tp2Json {
    fn from(r: &Tp2Report) -> Self {
        Tp2Json {
            function: r.function.clone(),
            bounds: (&r.domain).into(),
            holds: r.holds(),
            operations: r.operations,
            instances: r.instances,
            witnesses: r
                .witnesses
                .iter()
                .map(|w| Tp2WitnessJson {
                    o1: w.o1.to_string(),
                    o2: w.o2.to_string(),
                    o3: w.o3.to_string(),
                    o12: result_string(&w.o12),
                    o21: result_string(&w.o21),
                    via_first: result_string(&w.via_first),
                    via_second: result_string(&w.via_second),
                })
                .collect(),
        }
    }
}

fn tp2_text(r: &Tp2Report) -> String {
    let mut lines = vec![
        format!("TP2 for {} on {}: {}", r.function, r.domain, if r.holds() { "holds" } else { "fails" }),
        format!("operations: {}, triples: {}, witnesses: {}", r.operations, r.instances, r.witnesses.len()),
    ];
    for w in &r.witnesses {
        lines.push(format!(
            "  ({}, {}, {}): IT*(o3,[o1;o21])={} IT*(o3,[o2;o12])={}",
            w.o1,
            w.o2,
            w.o3,
            result_string(&w.via_first),
            result_string(&w.via_second)
        ));
    }
    lines.join("\n")
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct SiteJson {
    pub site: usize,
    pub doc: String,
    pub clock: String,
    pub history: Vec<String>,
    pub pending: Vec<String>,
    pub fault: Option<String>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct DivergenceJson {
    pub first: usize,
    pub second: usize,
    pub first_doc: String,
    pub second_doc: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct RunJson {
    pub scenario: String,
    pub it: String,
    pub converged: bool,
    pub divergence: Option<DivergenceJson>,
    pub sites: Vec<SiteJson>,
}

impl From<&RunOutcome> for RunJson {
    fn from(o: &RunOutcome) -> Self {
        RunJson {
            scenario: o.scenario.clone(),
            it: o.it.clone(),
            converged: o.converged,
            divergence: o.divergence.as_ref().map(|d| DivergenceJson {
                first: d.first,
                second: d.second,
                first_doc: d.first_doc.to_string(),
                second_doc: d.second_doc.to_string(),
            }),
            sites: o
                .sites
                .iter()
                .map(|s| SiteJson {
                    site: s.site,
                    doc: s.doc.to_string(),
                    clock: s.clock.to_string(),
                    history: s.history.iter().map(|h| h.to_string()).collect(),
                    pending: s.pending.iter().map(|h| h.to_string()).collect(),
                    fault: s.fault.as_ref().map(|f| f.to_string()),
                })
                .collect(),
        }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct OrderJson {
    pub order: Vec<Vec<usize>>,
    pub docs: Vec<String>,
    pub converged: bool,
}

impl From<&RunOutcome> for OrderJson {
    fn from(o: &RunOutcome) -> Self {
        OrderJson {
            order: o.order.clone().unwrap_or_default(),
            docs: o.sites.iter().map(|s| s.doc.to_string()).collect(),
            converged: o.converged,
        }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct AllOrdersJson {
    pub scenario: String,
    pub it: String,
    pub diverging: usize,
    pub outcomes: Vec<OrderJson>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct ScenarioSummary {
    pub name: String,
    pub sites: usize,
    pub initial: String,
    pub it: String,
    pub operations: usize,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct SiteDocJson {
    pub site: usize,
    pub expected: String,
    pub actual: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct ReplayJson {
    pub scenario: String,
    pub it: String,
    pub converged: bool,
    pub expected_converged: bool,
    pub docs: Vec<SiteDocJson>,
    pub matches: bool,
}
