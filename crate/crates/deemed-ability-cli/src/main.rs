//! `dabl`: command line front end for the deemed-ability toolkit.
//!
//! One subcommand per capability; `--json` switches every subcommand to a
//! single machine-readable object on stdout. Exit codes: 0 success, 1 a
//! check failed or a counterexample was found, 2 usage or parse errors.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use deemed_ability::canonical::canonical_key;
use deemed_ability::engine::{self, DerivedTrace, Event, EventKind, EventLog, Provenance};
use deemed_ability::harness::{self, SuiteReport, DEFAULT_SEED};
use deemed_ability::static_model::{validate_sc_model, SCModel};
use deemed_ability::temporal_model::{validate_da_model, TraceModel};
use deemed_ability::{parse_static, parse_temporal, Group, StaticFormula, TemporalFormula};

#[derive(Parser)]
#[command(
    name = "dabl",
    version,
    about = "Parse, evaluate, validate and derive deemed-ability facts"
)]
struct Cli {
    /// Emit one machine-readable JSON object instead of human output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula and print its syntax tree.
    Parse {
        /// The formula text.
        #[arg(short = 'f', long)]
        formula: String,
        /// Parse with the temporal grammar instead of the static one.
        #[arg(long)]
        temporal: bool,
    },
    /// Evaluate a static formula at a world of a model.
    Eval {
        /// Model file (JSON).
        #[arg(short = 'm', long)]
        model: PathBuf,
        /// World id to evaluate at.
        #[arg(short = 'w', long)]
        world: String,
        /// The static formula.
        #[arg(short = 'f', long)]
        formula: String,
        /// Evaluate even when the model violates the frame conditions.
        #[arg(long)]
        allow_invalid: bool,
    },
    /// Check a model against the frame conditions.
    CheckModel {
        /// Model file (JSON).
        #[arg(short = 'm', long)]
        model: PathBuf,
    },
    /// Validate a trace against the ability persistence conditions.
    ValidateDa {
        /// Trace file (JSON).
        #[arg(short = 't', long)]
        trace: PathBuf,
    },
    /// Derive the instant-by-instant facts of an event log.
    Simulate {
        /// Event log file (JSONL).
        #[arg(short = 'l', long)]
        log: PathBuf,
        /// Also write the derived trace as a model file.
        #[arg(long, value_name = "FILE")]
        export_trace: Option<PathBuf>,
    },
    /// Evaluate a temporal formula at an instant of a derived trace.
    Query {
        /// Event log file (JSONL).
        #[arg(short = 'l', long)]
        log: PathBuf,
        /// The temporal formula.
        #[arg(short = 'f', long)]
        formula: String,
        /// Instant to evaluate at.
        #[arg(short = 't', long)]
        instant: usize,
    },
    /// Show how a derived fact came to hold.
    Explain {
        /// Event log file (JSONL).
        #[arg(short = 'l', long)]
        log: PathBuf,
        /// The fact, e.g. "Dabl{s2}phi".
        #[arg(long)]
        fact: String,
        /// Instant the fact should hold at.
        #[arg(short = 't', long)]
        instant: usize,
    },
    /// Re-run a bundled scenario against its golden transcript.
    Replay {
        /// Scenario name: lifecycle or repository.
        name: String,
    },
    /// Run the randomized soundness suites.
    Soundness {
        /// Suite seed; DEEMED_ABILITY_SEED overrides the default.
        #[arg(long)]
        seed: Option<u64>,
        /// Cases per suite.
        #[arg(long, default_value_t = 100)]
        cases: usize,
    },
}

/// A finished subcommand: human lines, the JSON form, and the exit code.
struct Outcome {
    lines: Vec<String>,
    value: Value,
    code: u8,
}

impl Outcome {
    fn ok(lines: Vec<String>, value: Value) -> Self {
        Outcome {
            lines,
            value,
            code: 0,
        }
    }
}

/// An error before any output was produced. `code` is 1 for failed checks
/// and 2 for usage, file or parse problems.
struct Failure {
    message: String,
    code: u8,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            message: message.into(),
            code: 2,
        }
    }

    fn check(message: impl Into<String>) -> Self {
        Failure {
            message: message.into(),
            code: 1,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command_name = command_name(&cli.command);
    match dispatch(cli.command) {
        Ok(outcome) => {
            if cli.json {
                let mut value = outcome.value;
                attach_envelope(&mut value, command_name, outcome.code == 0);
                emit(&serde_json::to_string_pretty(&value).expect("serializable"));
            } else if !outcome.lines.is_empty() {
                emit(&outcome.lines.join("\n"));
            }
            ExitCode::from(outcome.code)
        }
        Err(failure) => {
            if cli.json {
                let value = json!({
                    "command": command_name,
                    "ok": false,
                    "error": failure.message,
                });
                emit(&serde_json::to_string_pretty(&value).expect("serializable"));
            } else {
                eprintln!("error: {}", failure.message);
            }
            ExitCode::from(failure.code)
        }
    }
}

/// Writes to stdout, tolerating a closed pipe (e.g. `dabl replay | head`).
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes());
    let _ = out.write_all(b"\n");
    let _ = out.flush();
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Parse { .. } => "parse",
        Command::Eval { .. } => "eval",
        Command::CheckModel { .. } => "check-model",
        Command::ValidateDa { .. } => "validate-da",
        Command::Simulate { .. } => "simulate",
        Command::Query { .. } => "query",
        Command::Explain { .. } => "explain",
        Command::Replay { .. } => "replay",
        Command::Soundness { .. } => "soundness",
    }
}

fn attach_envelope(value: &mut Value, command: &str, ok: bool) {
    if let Value::Object(map) = value {
        map.insert("command".to_string(), json!(command));
        map.insert("ok".to_string(), json!(ok));
    }
}

fn dispatch(command: Command) -> Result<Outcome, Failure> {
    match command {
        Command::Parse { formula, temporal } => cmd_parse(&formula, temporal),
        Command::Eval {
            model,
            world,
            formula,
            allow_invalid,
        } => cmd_eval(&model, &world, &formula, allow_invalid),
        Command::CheckModel { model } => cmd_check_model(&model),
        Command::ValidateDa { trace } => cmd_validate_da(&trace),
        Command::Simulate { log, export_trace } => cmd_simulate(&log, export_trace.as_deref()),
        Command::Query {
            log,
            formula,
            instant,
        } => cmd_query(&log, &formula, instant),
        Command::Explain { log, fact, instant } => cmd_explain(&log, &fact, instant),
        Command::Replay { name } => cmd_replay(&name),
        Command::Soundness { seed, cases } => cmd_soundness(seed, cases),
    }
}

fn read_file(path: &std::path::Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

// ---- parse ----

fn cmd_parse(formula: &str, temporal: bool) -> Result<Outcome, Failure> {
    let mut lines = Vec::new();
    let (printed, ast) = if temporal {
        let f = parse_temporal(formula).map_err(|e| Failure::usage(e.to_string()))?;
        temporal_tree(&f, 0, &mut lines);
        (f.to_string(), temporal_ast(&f))
    } else {
        let f = parse_static(formula).map_err(|e| Failure::usage(e.to_string()))?;
        static_tree(&f, 0, &mut lines);
        (f.to_string(), static_ast(&f))
    };
    let kind = if temporal { "temporal" } else { "static" };
    let mut out = vec![format!("{kind}: {printed}")];
    out.extend(lines);
    Ok(Outcome::ok(
        out,
        json!({ "kind": kind, "formula": printed, "ast": ast }),
    ))
}

fn indent(depth: usize) -> String {
    "  ".repeat(depth)
}

fn static_tree(f: &StaticFormula, depth: usize, out: &mut Vec<String>) {
    use StaticFormula as S;
    let pad = indent(depth);
    match f {
        S::Prop(p) => out.push(format!("{pad}prop {p}")),
        S::Top => out.push(format!("{pad}top")),
        S::Bottom => out.push(format!("{pad}bottom")),
        S::Not(x) => {
            out.push(format!("{pad}not"));
            static_tree(x, depth + 1, out);
        }
        S::And(l, r) | S::Or(l, r) | S::Implies(l, r) => {
            let op = match f {
                S::And(..) => "and",
                S::Or(..) => "or",
                _ => "implies",
            };
            out.push(format!("{pad}{op}"));
            static_tree(l, depth + 1, out);
            static_tree(r, depth + 1, out);
        }
        S::Dabl(g, x) | S::Conf(g, x) | S::Disc(g, x) | S::Brings(g, x) | S::Attempts(g, x) => {
            let op = match f {
                S::Dabl(..) => "dabl",
                S::Conf(..) => "conf",
                S::Disc(..) => "disc",
                S::Brings(..) => "brings",
                _ => "attempts",
            };
            out.push(format!("{pad}{op} {g}"));
            static_tree(x, depth + 1, out);
        }
        S::Task(g, o, d) | S::Agree(g, o, d) => {
            let op = if matches!(f, S::Task(..)) { "task" } else { "agree" };
            out.push(format!("{pad}{op} {g}"));
            static_tree(o, depth + 1, out);
            static_tree(d, depth + 1, out);
        }
    }
}

fn temporal_tree(f: &TemporalFormula, depth: usize, out: &mut Vec<String>) {
    use TemporalFormula as T;
    let pad = indent(depth);
    match f {
        T::Mono(sf) => {
            out.push(format!("{pad}mono"));
            static_tree(sf, depth + 1, out);
        }
        T::Not(x) => {
            out.push(format!("{pad}not"));
            temporal_tree(x, depth + 1, out);
        }
        T::And(l, r) | T::Until(l, r) | T::Since(l, r) => {
            let op = match f {
                T::And(..) => "and",
                T::Until(..) => "until",
                _ => "since",
            };
            out.push(format!("{pad}{op}"));
            temporal_tree(l, depth + 1, out);
            temporal_tree(r, depth + 1, out);
        }
    }
}

fn group_json(g: &Group) -> Value {
    json!(g.iter().map(|a| a.name().to_string()).collect::<Vec<_>>())
}

fn static_ast(f: &StaticFormula) -> Value {
    use StaticFormula as S;
    match f {
        S::Prop(p) => json!({ "op": "prop", "name": p }),
        S::Top => json!({ "op": "top" }),
        S::Bottom => json!({ "op": "bottom" }),
        S::Not(x) => json!({ "op": "not", "children": [static_ast(x)] }),
        S::And(l, r) => json!({ "op": "and", "children": [static_ast(l), static_ast(r)] }),
        S::Or(l, r) => json!({ "op": "or", "children": [static_ast(l), static_ast(r)] }),
        S::Implies(l, r) => {
            json!({ "op": "implies", "children": [static_ast(l), static_ast(r)] })
        }
        S::Dabl(g, x) => {
            json!({ "op": "dabl", "group": group_json(g), "children": [static_ast(x)] })
        }
        S::Conf(g, x) => {
            json!({ "op": "conf", "group": group_json(g), "children": [static_ast(x)] })
        }
        S::Disc(g, x) => {
            json!({ "op": "disc", "group": group_json(g), "children": [static_ast(x)] })
        }
        S::Brings(g, x) => {
            json!({ "op": "brings", "group": group_json(g), "children": [static_ast(x)] })
        }
        S::Attempts(g, x) => {
            json!({ "op": "attempts", "group": group_json(g), "children": [static_ast(x)] })
        }
        S::Task(g, o, d) => {
            json!({ "op": "task", "group": group_json(g), "children": [static_ast(o), static_ast(d)] })
        }
        S::Agree(g, o, d) => {
            json!({ "op": "agree", "group": group_json(g), "children": [static_ast(o), static_ast(d)] })
        }
    }
}

fn temporal_ast(f: &TemporalFormula) -> Value {
    use TemporalFormula as T;
    match f {
        T::Mono(sf) => json!({ "op": "mono", "children": [static_ast(sf)] }),
        T::Not(x) => json!({ "op": "not", "children": [temporal_ast(x)] }),
        T::And(l, r) => json!({ "op": "and", "children": [temporal_ast(l), temporal_ast(r)] }),
        T::Until(l, r) => {
            json!({ "op": "until", "children": [temporal_ast(l), temporal_ast(r)] })
        }
        T::Since(l, r) => {
            json!({ "op": "since", "children": [temporal_ast(l), temporal_ast(r)] })
        }
    }
}

// ---- eval / check-model ----

fn load_model(path: &std::path::Path) -> Result<SCModel, Failure> {
    SCModel::from_json(&read_file(path)?).map_err(|e| Failure::usage(e.to_string()))
}

fn cmd_eval(
    path: &std::path::Path,
    world: &str,
    formula: &str,
    allow_invalid: bool,
) -> Result<Outcome, Failure> {
    let model = load_model(path)?;
    let f = parse_static(formula).map_err(|e| Failure::usage(e.to_string()))?;
    let report = validate_sc_model(&model);
    if !report.is_valid() && !allow_invalid {
        let mut msg = String::from("the model violates the frame conditions:\n");
        for v in &report.violations {
            msg.push_str(&format!("  {}\n", v.render()));
        }
        msg.push_str("pass --allow-invalid to evaluate anyway");
        return Err(Failure::check(msg));
    }
    let value = model
        .eval_static(world, &f)
        .map_err(|e| Failure::usage(e.to_string()))?;
    Ok(Outcome::ok(
        vec![value.to_string()],
        json!({
            "world": world,
            "formula": f.to_string(),
            "value": value,
            "model_valid": report.is_valid(),
        }),
    ))
}

fn cmd_check_model(path: &std::path::Path) -> Result<Outcome, Failure> {
    let model = load_model(path)?;
    let report = validate_sc_model(&model);
    let valid = report.is_valid();
    let mut lines = Vec::new();
    if valid {
        lines.push("valid".to_string());
    } else {
        for v in &report.violations {
            lines.push(v.render());
        }
    }
    let value = json!({
        "valid": valid,
        "violations": report.violations,
    });
    Ok(Outcome {
        lines,
        value,
        code: if valid { 0 } else { 1 },
    })
}

// ---- validate-da ----

fn cmd_validate_da(path: &std::path::Path) -> Result<Outcome, Failure> {
    let tm =
        TraceModel::from_json(&read_file(path)?).map_err(|e| Failure::usage(e.to_string()))?;
    let report = validate_da_model(&tm).map_err(|e| Failure::usage(e.to_string()))?;
    let valid = report.is_valid();
    let mut lines = Vec::new();
    if valid {
        lines.push("valid".to_string());
    } else {
        for v in &report.violations {
            lines.push(v.render());
        }
        for (t, v) in &report.static_violations {
            lines.push(format!("instant {t}: {}", v.render()));
        }
    }
    let value = json!({
        "valid": valid,
        "conditions": report.violations,
        "static": report
            .static_violations
            .iter()
            .map(|(t, v)| json!({ "t": t, "violation": v }))
            .collect::<Vec<_>>(),
    });
    Ok(Outcome {
        lines,
        value,
        code: if valid { 0 } else { 1 },
    })
}

// ---- simulate / query / explain ----

fn load_log(path: &std::path::Path) -> Result<(EventLog, DerivedTrace), Failure> {
    let log = engine::parse_log(&read_file(path)?).map_err(|e| Failure::usage(e.to_string()))?;
    let trace = engine::run(&log).map_err(|e| Failure::check(e.to_string()))?;
    Ok((log, trace))
}

fn task_status_text(status: &engine::TaskStatus) -> String {
    match status {
        engine::TaskStatus::Active => "active".to_string(),
        engine::TaskStatus::CompletedAt { t } => format!("completed_at={t}"),
        engine::TaskStatus::ExpiredAt { t } => format!("expired_at={t}"),
    }
}

fn cmd_simulate(
    path: &std::path::Path,
    export: Option<&std::path::Path>,
) -> Result<Outcome, Failure> {
    let (_, trace) = load_log(path)?;
    let mut lines = vec![format!("instants {}", trace.len())];
    for t in 0..trace.len() {
        lines.push(trace.describe_instant(t));
    }
    let mut tasks = Vec::new();
    for (i, rec) in trace.tasks().iter().enumerate() {
        let status = task_status_text(&rec.status);
        lines.push(format!(
            "task{i} Task{}({}; {}) agreed_at={} event=e{} status={status}",
            rec.group, rec.objective, rec.deadline, rec.agreed_at, rec.agree_event
        ));
        tasks.push(json!({
            "group": rec.group.to_string(),
            "objective": rec.objective.to_string(),
            "deadline": rec.deadline.to_string(),
            "agreed_at": rec.agreed_at,
            "agree_event": rec.agree_event,
            "status": status,
        }));
    }
    let mut exported = None;
    if let Some(out) = export {
        let tm = trace.to_trace_model();
        std::fs::write(out, tm.to_json())
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", out.display())))?;
        lines.push(format!("exported trace to {}", out.display()));
        exported = Some(out.display().to_string());
    }
    let description: Vec<String> = (0..trace.len()).map(|t| trace.describe_instant(t)).collect();
    Ok(Outcome::ok(
        lines,
        json!({
            "instants": trace.len(),
            "description": description,
            "tasks": tasks,
            "exported": exported,
        }),
    ))
}

fn cmd_query(path: &std::path::Path, formula: &str, instant: usize) -> Result<Outcome, Failure> {
    let (_, trace) = load_log(path)?;
    let f = parse_temporal(formula).map_err(|e| Failure::usage(e.to_string()))?;
    let value = trace
        .query(&f, instant)
        .map_err(|e| Failure::usage(e.to_string()))?;
    Ok(Outcome::ok(
        vec![value.to_string()],
        json!({ "formula": f.to_string(), "t": instant, "value": value }),
    ))
}

fn describe_event(i: usize, e: &Event) -> String {
    let what = match &e.kind {
        EventKind::Agency { group, objective } => format!("agency by {group} of {objective}"),
        EventKind::Attempt { group, objective } => format!("attempt by {group} at {objective}"),
        EventKind::Grant { group, objective } => format!("grant to {group} of {objective}"),
        EventKind::Revoke { group, objective } => {
            format!("revocation from {group} of {objective}")
        }
        EventKind::Agree {
            group,
            objective,
            deadline,
        } => format!("agreement by {group} on {objective} by deadline {deadline}"),
    };
    format!("e{i} t={}: {what}", e.t)
}

fn provenance_events(p: &Provenance) -> Vec<usize> {
    match p {
        Provenance::Agency { event }
        | Provenance::Attempt { event }
        | Provenance::B4 { event }
        | Provenance::T1 { event }
        | Provenance::T2 { event }
        | Provenance::B7 { event } => vec![*event],
        Provenance::Closure { events }
        | Provenance::B5 { events }
        | Provenance::AgencyAttempt { events } => events.clone(),
        Provenance::MonotonicConf { .. } | Provenance::T7 { .. } => Vec::new(),
    }
}

fn cmd_explain(path: &std::path::Path, fact: &str, instant: usize) -> Result<Outcome, Failure> {
    let (log, trace) = load_log(path)?;
    if instant >= trace.len() {
        return Err(Failure::usage(format!(
            "instant {instant} is out of range for a trace of length {}",
            trace.len()
        )));
    }
    let parsed = parse_static(fact).map_err(|e| Failure::usage(e.to_string()))?;
    let mut lines = Vec::new();

    let key_of = |phi: &StaticFormula| {
        canonical_key(phi, trace.universe()).map_err(|e| Failure::usage(e.to_string()))
    };
    let explain_provenance =
        |label: &str, provs: Option<&Vec<Provenance>>, lines: &mut Vec<String>| match provs {
            None => false,
            Some(provs) => {
                lines.push(format!("{label} holds at t={instant}"));
                let mut seen: BTreeSet<usize> = BTreeSet::new();
                for p in provs {
                    lines.push(format!("  via {p}"));
                    if let Provenance::T7 { task } = p {
                        let rec = &trace.tasks()[*task];
                        lines.push(format!(
                            "    task{task} = Task{}({}; {}) agreed_at={} status={}",
                            rec.group,
                            rec.objective,
                            rec.deadline,
                            rec.agreed_at,
                            task_status_text(&rec.status)
                        ));
                        seen.insert(rec.agree_event);
                    }
                    seen.extend(provenance_events(p));
                }
                for i in seen {
                    lines.push(format!("  {}", describe_event(i, &log.events[i])));
                }
                true
            }
        };

    let found = match &parsed {
        StaticFormula::Brings(g, phi) => {
            let fact_key = (g.clone(), key_of(phi)?);
            explain_provenance(
                &format!("E{g} {phi}"),
                trace.facts(instant).e.get(&fact_key),
                &mut lines,
            )
        }
        StaticFormula::Attempts(g, phi) => {
            let fact_key = (g.clone(), key_of(phi)?);
            explain_provenance(
                &format!("Att{g} {phi}"),
                trace.facts(instant).att.get(&fact_key),
                &mut lines,
            )
        }
        StaticFormula::Conf(g, phi) => {
            let fact_key = (g.clone(), key_of(phi)?);
            explain_provenance(
                &format!("Conf{g} {phi}"),
                trace.facts(instant).conf.get(&fact_key),
                &mut lines,
            )
        }
        StaticFormula::Disc(g, phi) => {
            let fact_key = (g.clone(), key_of(phi)?);
            explain_provenance(
                &format!("Disc{g} {phi}"),
                trace.facts(instant).disc.get(&fact_key),
                &mut lines,
            )
        }
        StaticFormula::Dabl(g, phi) => {
            let fact_key = (g.clone(), key_of(phi)?);
            if trace.facts(instant).dabl.contains(&fact_key) {
                lines.push(format!("Dabl{g} {phi} holds at t={instant}"));
                let grounding = (0..=instant)
                    .rev()
                    .find(|t| trace.facts(*t).conf.contains_key(&fact_key))
                    .expect("a deemed ability is grounded in a confirmation");
                lines.push(format!("  confirmed at t={grounding}"));
                let mut seen: BTreeSet<usize> = BTreeSet::new();
                for p in &trace.facts(grounding).conf[&fact_key] {
                    lines.push(format!("    via {p}"));
                    seen.extend(provenance_events(p));
                }
                for i in seen {
                    lines.push(format!("    {}", describe_event(i, &log.events[i])));
                }
                lines.push(format!(
                    "  no disconfirmation in ({grounding},{instant}]"
                ));
                true
            } else {
                false
            }
        }
        StaticFormula::Task(g, o, d) | StaticFormula::Agree(g, o, d) => {
            let is_task = matches!(parsed, StaticFormula::Task(..));
            let identity = (g.clone(), key_of(o)?, key_of(d)?);
            let facts = trace.facts(instant);
            let present = if is_task {
                facts.tasks.contains(&identity)
            } else {
                facts.agrees.contains(&identity)
            };
            if present {
                let label = if is_task { "Task" } else { "Agree" };
                lines.push(format!("{label}{g}({o}; {d}) holds at t={instant}"));
                if let Some((i, rec)) = trace
                    .tasks()
                    .iter()
                    .enumerate()
                    .find(|(_, r)| {
                        r.group == *g
                            && r.objective_key == identity.1
                            && r.deadline_key == identity.2
                            && r.agreed_at <= instant
                    })
                {
                    lines.push(format!(
                        "  task{i} agreed at t={} via e{}",
                        rec.agreed_at, rec.agree_event
                    ));
                    lines.push(format!(
                        "  {}",
                        describe_event(rec.agree_event, &log.events[rec.agree_event])
                    ));
                    lines.push(format!("  status {}", task_status_text(&rec.status)));
                }
                true
            } else {
                false
            }
        }
        _ => {
            return Err(Failure::usage(format!(
                "`{parsed}` is not a modal fact; explain one of E/Att/Conf/Disc/Dabl/Task/Agree"
            )))
        }
    };

    if !found {
        return Err(Failure::check(format!(
            "`{parsed}` does not hold at t={instant}"
        )));
    }
    Ok(Outcome::ok(
        lines.clone(),
        json!({ "fact": parsed.to_string(), "t": instant, "lines": lines }),
    ))
}

// ---- replay / soundness ----

fn cmd_replay(name: &str) -> Result<Outcome, Failure> {
    match harness::replay(name) {
        Ok(transcript) => {
            let value = json!({ "name": name, "lines": transcript.lines });
            Ok(Outcome::ok(transcript.lines, value))
        }
        Err(e @ harness::ReplayError::UnknownScenario(_)) => Err(Failure::usage(e.to_string())),
        Err(e) => Err(Failure::check(e.to_string())),
    }
}

fn cmd_soundness(seed: Option<u64>, cases: usize) -> Result<Outcome, Failure> {
    let seed = match seed {
        Some(s) => s,
        None => match std::env::var("DEEMED_ABILITY_SEED") {
            Ok(text) => text.parse::<u64>().map_err(|_| {
                Failure::usage(format!("DEEMED_ABILITY_SEED is not a u64: `{text}`"))
            })?,
            Err(_) => DEFAULT_SEED,
        },
    };
    let reports: Vec<SuiteReport> = vec![
        harness::static_soundness(seed, cases),
        harness::temporal_soundness(seed, cases),
    ];
    let passed = reports.iter().all(SuiteReport::passed);
    let mut lines = Vec::new();
    for r in &reports {
        lines.extend(r.render().lines().map(str::to_string));
    }
    let value = json!({
        "seed": seed,
        "cases": cases,
        "passed": passed,
        "reports": reports,
    });
    Ok(Outcome {
        lines,
        value,
        code: if passed { 0 } else { 1 },
    })
}
