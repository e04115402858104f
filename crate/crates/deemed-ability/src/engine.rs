//! Deriving ability facts from grounded event logs.
//!
//! A log is JSON lines: one header, then valuation lines and event lines
//! in nondecreasing instant order. The engine sweeps the instants once,
//! turning records of what happened into per-instant fact sets:
//!
//! * agency records become `E` facts, closed under same-group conjunction,
//!   and confirmations for every simultaneous combination of records (the
//!   combined group gets the conjoined objective);
//! * manager grants confirm, manager revocations disconfirm;
//! * attempts without matching agency disconfirm;
//! * agreements open tasks, which later agency completes and whose
//!   deadline, if it arrives first, disconfirms the objective;
//! * deemed ability persists: confirmed objectives stay deemed until
//!   disconfirmed.
//!
//! Every derived fact carries provenance naming the rule and the event or
//! task it came from. A confirmation and disconfirmation of the same
//! objective at the same instant is a hard error citing both sides.

use crate::canonical::{CanonicalError, CanonicalKey, Universe, canonical_key, key_to_formula};
use crate::static_model::{SCModel, TableKind};
use crate::syntax::{AgentId, Group, InvalidName, StaticFormula, TemporalFormula};
use crate::temporal_model::{PointedModel, TemporalEvalError, TraceModel};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LogError {
    #[error("line {line}: not valid JSON: {message}")]
    Json { line: usize, message: String },
    #[error("line {line}: expected the header as the first line")]
    MissingHeader { line: usize },
    #[error("line {line}: a second header is not allowed")]
    DuplicateHeader { line: usize },
    #[error("line {line}: neither an event (`kind`) nor a valuation (`props`) line")]
    UnknownLine { line: usize },
    #[error("line {line}: unknown event kind `{kind}`")]
    UnknownKind { line: usize, kind: String },
    #[error("line {line}: `agree` needs a `psi` deadline")]
    MissingDeadline { line: usize },
    #[error("the horizon must be at least 1")]
    EmptyHorizon,
    #[error("line {line}: instant {t} is outside the horizon {horizon}")]
    OutsideHorizon { line: usize, t: usize, horizon: usize },
    #[error("line {line}: instants must be nondecreasing")]
    OutOfOrder { line: usize },
    #[error("line {line}: instant {t} already has a valuation")]
    DuplicateValuation { line: usize, t: usize },
    #[error("line {line}: proposition `{prop}` is not in the universe")]
    UnknownProp { line: usize, prop: String },
    #[error("line {line}: agent `{agent}` is not declared in the header")]
    UnknownAgent { line: usize, agent: String },
    #[error("line {line}: cannot parse `{text}`: {message}")]
    BadFormula {
        line: usize,
        text: String,
        message: String,
    },
    #[error("line {line}: objective `{text}` is not usable here: {source}")]
    BadObjective {
        line: usize,
        text: String,
        source: CanonicalError,
    },
    #[error(transparent)]
    Universe(CanonicalError),
    #[error(transparent)]
    Agent(#[from] InvalidName),
}

/// How a derived fact came to hold.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Provenance {
    /// A recorded agency event.
    Agency { event: usize },
    /// Same-group conjunction of simultaneous agency.
    Closure { events: Vec<usize> },
    /// A recorded attempt event.
    Attempt { event: usize },
    /// Agency entails attempting (only with the `b6` flag); conjunctions
    /// closed from several same-group successes cite all of them.
    AgencyAttempt { events: Vec<usize> },
    /// Confirmation by a single agency record.
    B4 { event: usize },
    /// Confirmation by simultaneous agency of several records.
    B5 { events: Vec<usize> },
    /// Confirmation inherited by a supergroup (only with the
    /// `monotonic_conf` flag).
    MonotonicConf { base: Group },
    /// Confirmation by a manager grant.
    T1 { event: usize },
    /// Disconfirmation by a manager revocation.
    T2 { event: usize },
    /// Disconfirmation by an attempt with no matching agency.
    B7 { event: usize },
    /// Disconfirmation by a task deadline passing unmet.
    T7 { task: usize },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |events: &[usize]| {
            events
                .iter()
                .map(|e| format!("e{e}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        match self {
            Provenance::Agency { event } => write!(f, "agency(e{event})"),
            Provenance::Closure { events } => write!(f, "b3({})", list(events)),
            Provenance::Attempt { event } => write!(f, "att(e{event})"),
            Provenance::AgencyAttempt { events } => write!(f, "b6({})", list(events)),
            Provenance::B4 { event } => write!(f, "b4(e{event})"),
            Provenance::B5 { events } => write!(f, "b5({})", list(events)),
            Provenance::MonotonicConf { base } => write!(f, "mono(from {base})"),
            Provenance::T1 { event } => write!(f, "t1(e{event})"),
            Provenance::T2 { event } => write!(f, "t2(e{event})"),
            Provenance::B7 { event } => write!(f, "b7(e{event})"),
            Provenance::T7 { task } => write!(f, "t7(task{task})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DerivationError {
    /// Agency of a falsehood: what a group brings about holds.
    #[error(
        "t={t}: event e{event} records agency of `{objective}`, which is false \
         under the instant's valuation"
    )]
    AgencyContradiction {
        t: usize,
        event: usize,
        objective: String,
    },
    /// Agency of a tautology: nothing brings about what could not fail.
    #[error("t={t}: event e{event} records agency of the tautology `{objective}`")]
    TautologicalAgency {
        t: usize,
        event: usize,
        objective: String,
    },
    /// The same objective confirmed and disconfirmed at one instant.
    #[error(
        "t={t}: `{objective}` for {group} is both confirmed ({confirmed}) and \
         disconfirmed ({disconfirmed})"
    )]
    Inconsistency {
        t: usize,
        group: Group,
        objective: String,
        confirmed: String,
        disconfirmed: String,
    },
    /// An agreement that is already completed or already past its
    /// deadline at the instant it is made.
    #[error("t={t}: event e{event} agrees on a task that is already {reason} at that instant")]
    TaskParadox {
        t: usize,
        event: usize,
        reason: String,
    },
    #[error(
        "t={t}: {count} simultaneous agency records exceed the combination \
         cap of {cap}"
    )]
    SubsetCapExceeded { t: usize, count: usize, cap: usize },
}

/// Optional behaviours, set in the log header.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Flags {
    /// Suppress confirmations whose group is empty.
    pub empty_group_excluded: bool,
    /// Every confirmation also confirms for every supergroup of declared
    /// agents.
    pub monotonic_conf: bool,
    /// Agency records also count as attempts.
    pub b6: bool,
    /// Most simultaneous agency records allowed at one instant.
    pub b5_subset_cap: usize,
}

impl Default for Flags {
    fn default() -> Self {
        Flags {
            empty_group_excluded: false,
            monotonic_conf: false,
            b6: false,
            b5_subset_cap: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub t: usize,
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventKind {
    Agency {
        group: Group,
        objective: StaticFormula,
    },
    Attempt {
        group: Group,
        objective: StaticFormula,
    },
    Grant {
        group: Group,
        objective: StaticFormula,
    },
    Revoke {
        group: Group,
        objective: StaticFormula,
    },
    Agree {
        group: Group,
        objective: StaticFormula,
        deadline: StaticFormula,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventLog {
    pub universe: Universe,
    pub agents: BTreeSet<AgentId>,
    pub horizon: usize,
    pub flags: Flags,
    pub events: Vec<Event>,
    /// Propositions true per instant; absent instants make every
    /// proposition false.
    pub valuations: BTreeMap<usize, BTreeSet<String>>,
}

impl EventLog {
    /// Serializes the log back to the JSONL format [`parse_log`] reads.
    /// Lines come out grouped by instant, valuations first, so the result
    /// always satisfies the nondecreasing-instant shape check.
    pub fn to_jsonl(&self) -> String {
        let mut lines = vec![serde_json::json!({
            "universe": self.universe.props(),
            "agents": self.agents.iter().map(AgentId::name).collect::<Vec<_>>(),
            "horizon": self.horizon,
            "flags": self.flags,
        })
        .to_string()];
        for t in 0..self.horizon {
            if let Some(props) = self.valuations.get(&t) {
                lines.push(
                    serde_json::json!({"t": t, "props": props.iter().collect::<Vec<_>>()})
                        .to_string(),
                );
            }
            for event in self.events.iter().filter(|e| e.t == t) {
                let (kind, group, phi, psi) = match &event.kind {
                    EventKind::Agency { group, objective } => {
                        ("agency", group, objective, None)
                    }
                    EventKind::Attempt { group, objective } => {
                        ("attempt", group, objective, None)
                    }
                    EventKind::Grant { group, objective } => ("grant", group, objective, None),
                    EventKind::Revoke { group, objective } => {
                        ("revoke", group, objective, None)
                    }
                    EventKind::Agree {
                        group,
                        objective,
                        deadline,
                    } => ("agree", group, objective, Some(deadline)),
                };
                let mut line = serde_json::json!({
                    "t": t,
                    "kind": kind,
                    "G": group.iter().map(AgentId::name).collect::<Vec<_>>(),
                    "phi": phi.to_string(),
                });
                if let Some(psi) = psi {
                    line["psi"] = serde_json::Value::String(psi.to_string());
                }
                lines.push(line.to_string());
            }
        }
        lines.join("\n") + "\n"
    }
}

#[derive(Deserialize)]
struct HeaderLine {
    universe: Vec<String>,
    agents: Vec<String>,
    horizon: usize,
    #[serde(default)]
    flags: Flags,
}

#[derive(Deserialize)]
struct EventLine {
    t: usize,
    kind: String,
    #[serde(rename = "G")]
    group: Vec<String>,
    phi: String,
    #[serde(default)]
    psi: Option<String>,
}

#[derive(Deserialize)]
struct ValuationLine {
    t: usize,
    props: Vec<String>,
}

/// Parses and shape-checks a JSONL event log.
pub fn parse_log(text: &str) -> Result<EventLog, LogError> {
    let mut log: Option<EventLog> = None;
    let mut last_t = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value =
            serde_json::from_str(raw).map_err(|e| LogError::Json {
                line,
                message: e.to_string(),
            })?;
        fn from_value<T: serde::de::DeserializeOwned>(
            v: serde_json::Value,
            line: usize,
        ) -> Result<T, LogError> {
            serde_json::from_value(v).map_err(|e| LogError::Json {
                line,
                message: e.to_string(),
            })
        }
        if value.get("universe").is_some() {
            if log.is_some() {
                return Err(LogError::DuplicateHeader { line });
            }
            let header: HeaderLine = from_value(value, line)?;
            if header.horizon == 0 {
                return Err(LogError::EmptyHorizon);
            }
            let universe = Universe::new(header.universe).map_err(LogError::Universe)?;
            let agents = header
                .agents
                .into_iter()
                .map(AgentId::new)
                .collect::<Result<BTreeSet<_>, _>>()?;
            log = Some(EventLog {
                universe,
                agents,
                horizon: header.horizon,
                flags: header.flags,
                events: Vec::new(),
                valuations: BTreeMap::new(),
            });
            continue;
        }
        let Some(log) = log.as_mut() else {
            return Err(LogError::MissingHeader { line });
        };
        let check_t = |t: usize, last_t: usize| -> Result<(), LogError> {
            if t >= log.horizon {
                return Err(LogError::OutsideHorizon {
                    line,
                    t,
                    horizon: log.horizon,
                });
            }
            if t < last_t {
                return Err(LogError::OutOfOrder { line });
            }
            Ok(())
        };
        if value.get("kind").is_some() {
            let ev: EventLine = from_value(value, line)?;
            check_t(ev.t, last_t)?;
            last_t = ev.t;
            let group = {
                let mut agents = BTreeSet::new();
                for name in &ev.group {
                    let a = AgentId::new(name.clone())?;
                    if !log.agents.contains(&a) {
                        return Err(LogError::UnknownAgent {
                            line,
                            agent: name.clone(),
                        });
                    }
                    agents.insert(a);
                }
                Group::new(agents)
            };
            let parse_objective = |text: &str| -> Result<StaticFormula, LogError> {
                let f = crate::syntax::parse_static(text).map_err(|e| LogError::BadFormula {
                    line,
                    text: text.to_string(),
                    message: e.to_string(),
                })?;
                canonical_key(&f, &log.universe).map_err(|e| LogError::BadObjective {
                    line,
                    text: text.to_string(),
                    source: e,
                })?;
                Ok(f)
            };
            let objective = parse_objective(&ev.phi)?;
            let kind = match ev.kind.as_str() {
                "agency" => EventKind::Agency { group, objective },
                "attempt" => EventKind::Attempt { group, objective },
                "grant" => EventKind::Grant { group, objective },
                "revoke" => EventKind::Revoke { group, objective },
                "agree" => {
                    let psi = ev.psi.ok_or(LogError::MissingDeadline { line })?;
                    EventKind::Agree {
                        group,
                        objective,
                        deadline: parse_objective(&psi)?,
                    }
                }
                other => {
                    return Err(LogError::UnknownKind {
                        line,
                        kind: other.to_string(),
                    });
                }
            };
            log.events.push(Event { t: ev.t, kind });
        } else if value.get("props").is_some() {
            let val: ValuationLine = from_value(value, line)?;
            check_t(val.t, last_t)?;
            last_t = val.t;
            if log.valuations.contains_key(&val.t) {
                return Err(LogError::DuplicateValuation { line, t: val.t });
            }
            for p in &val.props {
                if log.universe.index_of(p).is_none() {
                    return Err(LogError::UnknownProp {
                        line,
                        prop: p.to_string(),
                    });
                }
            }
            log.valuations
                .insert(val.t, val.props.into_iter().collect());
        } else {
            return Err(LogError::UnknownLine { line });
        }
    }
    log.ok_or(LogError::MissingHeader { line: 1 })
}

pub type FactKey = (Group, CanonicalKey);
pub type TaskKey = (Group, CanonicalKey, CanonicalKey);

/// The facts holding at one instant, with provenance for the derived
/// layers.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InstantFacts {
    pub valuation: BTreeSet<String>,
    pub e: BTreeMap<FactKey, Vec<Provenance>>,
    pub att: BTreeMap<FactKey, Vec<Provenance>>,
    pub conf: BTreeMap<FactKey, Vec<Provenance>>,
    pub disc: BTreeMap<FactKey, Vec<Provenance>>,
    pub dabl: BTreeSet<FactKey>,
    /// Tasks active at this instant.
    pub tasks: BTreeSet<TaskKey>,
    /// Agreements made at this instant.
    pub agrees: BTreeSet<TaskKey>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TaskStatus {
    Active,
    CompletedAt { t: usize },
    ExpiredAt { t: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskRecord {
    pub group: Group,
    pub objective: StaticFormula,
    pub objective_key: CanonicalKey,
    pub deadline: StaticFormula,
    pub deadline_key: CanonicalKey,
    pub agreed_at: usize,
    pub agree_event: usize,
    pub status: TaskStatus,
}

impl TaskRecord {
    fn active_at(&self, t: usize) -> bool {
        if t < self.agreed_at {
            return false;
        }
        match self.status {
            TaskStatus::Active => true,
            TaskStatus::CompletedAt { t: done } | TaskStatus::ExpiredAt { t: done } => t < done,
        }
    }
}

/// The full derivation result: per-instant facts, the task registry, and
/// enough naming to print objectives the way the log wrote them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedTrace {
    universe: Universe,
    agents: BTreeSet<AgentId>,
    flags: Flags,
    instants: Vec<InstantFacts>,
    tasks: Vec<TaskRecord>,
    names: BTreeMap<CanonicalKey, StaticFormula>,
}

impl DerivedTrace {
    pub fn len(&self) -> usize {
        self.instants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instants.is_empty()
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn agents(&self) -> &BTreeSet<AgentId> {
        &self.agents
    }

    pub fn facts(&self, t: usize) -> &InstantFacts {
        &self.instants[t]
    }

    pub fn tasks(&self) -> &[TaskRecord] {
        &self.tasks
    }

    /// Renders an objective the way the log spelled it, falling back to a
    /// canonical formula for keys that never appeared verbatim.
    pub fn render_key(&self, key: &CanonicalKey) -> String {
        match self.names.get(key) {
            Some(f) => f.to_string(),
            None => key_to_formula(key, &self.universe).to_string(),
        }
    }
}

struct AgencyRecord {
    group: Group,
    key: CanonicalKey,
    event: usize,
}

fn intern(
    names: &mut BTreeMap<CanonicalKey, StaticFormula>,
    f: &StaticFormula,
    u: &Universe,
) -> CanonicalKey {
    let key = canonical_key(f, u).expect("objectives are checked at parse time");
    names.entry(key.clone()).or_insert_with(|| f.clone());
    key
}

/// Runs the derivation sweep over a parsed log.
pub fn run(log: &EventLog) -> Result<DerivedTrace, DerivationError> {
    let empty = BTreeSet::new();
    let mut names: BTreeMap<CanonicalKey, StaticFormula> = BTreeMap::new();
    let mut tasks: Vec<TaskRecord> = Vec::new();
    let mut instants: Vec<InstantFacts> = Vec::new();
    let mut prev_dabl: BTreeSet<FactKey> = BTreeSet::new();

    for t in 0..log.horizon {
        let valuation = log.valuations.get(&t).unwrap_or(&empty);
        let val_index = log.universe.valuation_index(valuation);
        let mut facts = InstantFacts {
            valuation: valuation.clone(),
            ..InstantFacts::default()
        };

        let events_at: Vec<(usize, &Event)> = log
            .events
            .iter()
            .enumerate()
            .filter(|(_, e)| e.t == t)
            .collect();

        // Agency records: factive and never tautological.
        let mut records: Vec<AgencyRecord> = Vec::new();
        for (idx, event) in &events_at {
            if let EventKind::Agency { group, objective } = &event.kind {
                let key = intern(&mut names, objective, &log.universe);
                if key.is_tautology() {
                    return Err(DerivationError::TautologicalAgency {
                        t,
                        event: *idx,
                        objective: objective.to_string(),
                    });
                }
                if !key.holds_at(val_index) {
                    return Err(DerivationError::AgencyContradiction {
                        t,
                        event: *idx,
                        objective: objective.to_string(),
                    });
                }
                records.push(AgencyRecord {
                    group: group.clone(),
                    key,
                    event: *idx,
                });
            }
        }
        if records.len() > log.flags.b5_subset_cap {
            return Err(DerivationError::SubsetCapExceeded {
                t,
                count: records.len(),
                cap: log.flags.b5_subset_cap,
            });
        }

        // E facts, closed under same-group conjunction.
        let mut by_group: BTreeMap<&Group, Vec<&AgencyRecord>> = BTreeMap::new();
        for r in &records {
            by_group.entry(&r.group).or_default().push(r);
        }
        for (group, rs) in &by_group {
            for subset in nonempty_subsets(rs) {
                let key = conjoin_keys(subset.iter().map(|r| &r.key));
                let provenance = if subset.len() == 1 {
                    Provenance::Agency {
                        event: subset[0].event,
                    }
                } else {
                    Provenance::Closure {
                        events: subset.iter().map(|r| r.event).collect(),
                    }
                };
                facts
                    .e
                    .entry(((*group).clone(), key))
                    .or_default()
                    .push(provenance);
            }
        }

        // Attempts, recorded and (optionally) entailed by agency.
        for (idx, event) in &events_at {
            if let EventKind::Attempt { group, objective } = &event.kind {
                let key = intern(&mut names, objective, &log.universe);
                facts
                    .att
                    .entry((group.clone(), key))
                    .or_default()
                    .push(Provenance::Attempt { event: *idx });
            }
        }
        if log.flags.b6 {
            // Every derived success is also an attempt, including the
            // same-group conjunctions introduced by the closure above.
            for (group, rs) in &by_group {
                for subset in nonempty_subsets(rs) {
                    let key = conjoin_keys(subset.iter().map(|r| &r.key));
                    facts
                        .att
                        .entry(((*group).clone(), key))
                        .or_default()
                        .push(Provenance::AgencyAttempt {
                            events: subset.iter().map(|r| r.event).collect(),
                        });
                }
            }
        }

        // Confirmations: every simultaneous combination of agency records,
        // then manager grants, then (optionally) supergroups.
        for subset in nonempty_subsets(&records.iter().collect::<Vec<_>>()) {
            let group = subset
                .iter()
                .fold(Group::empty(), |acc, r| acc.union(&r.group));
            if log.flags.empty_group_excluded && group.is_empty() {
                continue;
            }
            let key = conjoin_keys(subset.iter().map(|r| &r.key));
            let provenance = if subset.len() == 1 {
                Provenance::B4 {
                    event: subset[0].event,
                }
            } else {
                Provenance::B5 {
                    events: subset.iter().map(|r| r.event).collect(),
                }
            };
            facts
                .conf
                .entry((group, key))
                .or_default()
                .push(provenance);
        }
        for (idx, event) in &events_at {
            if let EventKind::Grant { group, objective } = &event.kind {
                if log.flags.empty_group_excluded && group.is_empty() {
                    continue;
                }
                let key = intern(&mut names, objective, &log.universe);
                facts
                    .conf
                    .entry((group.clone(), key))
                    .or_default()
                    .push(Provenance::T1 { event: *idx });
            }
        }
        if log.flags.monotonic_conf {
            let declared: Vec<AgentId> = log.agents.iter().cloned().collect();
            let base: Vec<FactKey> = facts.conf.keys().cloned().collect();
            for (group, key) in base {
                for extra in crate::static_model::subsets(&declared) {
                    let bigger = group.union(&Group::new(extra));
                    if bigger != group {
                        facts
                            .conf
                            .entry((bigger, key.clone()))
                            .or_default()
                            .push(Provenance::MonotonicConf { base: group.clone() });
                    }
                }
            }
        }

        // Disconfirmations: revocations, then attempts with no matching
        // agency.
        for (idx, event) in &events_at {
            if let EventKind::Revoke { group, objective } = &event.kind {
                let key = intern(&mut names, objective, &log.universe);
                facts
                    .disc
                    .entry((group.clone(), key))
                    .or_default()
                    .push(Provenance::T2 { event: *idx });
            }
        }
        let attempted: Vec<FactKey> = facts.att.keys().cloned().collect();
        for fact in attempted {
            if !facts.e.contains_key(&fact) {
                let why: Vec<usize> = facts.att[&fact]
                    .iter()
                    .filter_map(|p| match p {
                        Provenance::Attempt { event } => Some(*event),
                        _ => None,
                    })
                    .collect();
                for event in why {
                    facts
                        .disc
                        .entry(fact.clone())
                        .or_default()
                        .push(Provenance::B7 { event });
                }
            }
        }

        // Tasks: completion first, then expiry, then fresh agreements.
        for (i, task) in tasks.iter_mut().enumerate() {
            if task.status != TaskStatus::Active || task.agreed_at > t {
                continue;
            }
            let done = facts
                .e
                .contains_key(&(task.group.clone(), task.objective_key.clone()));
            if done {
                task.status = TaskStatus::CompletedAt { t };
            } else if task.deadline_key.holds_at(val_index) {
                task.status = TaskStatus::ExpiredAt { t };
                facts
                    .disc
                    .entry((task.group.clone(), task.objective_key.clone()))
                    .or_default()
                    .push(Provenance::T7 { task: i });
            }
        }
        for (idx, event) in &events_at {
            if let EventKind::Agree {
                group,
                objective,
                deadline,
            } = &event.kind
            {
                let okey = intern(&mut names, objective, &log.universe);
                let dkey = intern(&mut names, deadline, &log.universe);
                if dkey.holds_at(val_index) {
                    return Err(DerivationError::TaskParadox {
                        t,
                        event: *idx,
                        reason: "past its deadline".to_string(),
                    });
                }
                if facts.e.contains_key(&(group.clone(), okey.clone())) {
                    return Err(DerivationError::TaskParadox {
                        t,
                        event: *idx,
                        reason: "completed".to_string(),
                    });
                }
                facts
                    .agrees
                    .insert((group.clone(), okey.clone(), dkey.clone()));
                let already_active = tasks.iter().any(|task| {
                    task.status == TaskStatus::Active
                        && task.group == *group
                        && task.objective_key == okey
                        && task.deadline_key == dkey
                });
                if !already_active {
                    tasks.push(TaskRecord {
                        group: group.clone(),
                        objective: objective.clone(),
                        objective_key: okey,
                        deadline: deadline.clone(),
                        deadline_key: dkey,
                        agreed_at: t,
                        agree_event: *idx,
                        status: TaskStatus::Active,
                    });
                }
            }
        }
        for task in &tasks {
            if task.active_at(t) {
                facts.tasks.insert((
                    task.group.clone(),
                    task.objective_key.clone(),
                    task.deadline_key.clone(),
                ));
            }
        }

        // No objective may be confirmed and disconfirmed at once.
        for fact in facts.conf.keys() {
            if facts.disc.contains_key(fact) {
                let render = |ps: &[Provenance]| {
                    ps.iter()
                        .map(|p| p.to_string())
                        .collect::<Vec<_>>()
                        .join(", ")
                };
                return Err(DerivationError::Inconsistency {
                    t,
                    group: fact.0.clone(),
                    objective: names
                        .get(&fact.1)
                        .map(|f| f.to_string())
                        .unwrap_or_else(|| key_to_formula(&fact.1, &log.universe).to_string()),
                    confirmed: render(&facts.conf[fact]),
                    disconfirmed: render(&facts.disc[fact]),
                });
            }
        }

        // Persistence: deemed ability survives anything but
        // disconfirmation.
        facts.dabl = prev_dabl
            .iter()
            .filter(|fact| !facts.disc.contains_key(*fact))
            .cloned()
            .chain(facts.conf.keys().cloned())
            .collect();
        prev_dabl = facts.dabl.clone();
        instants.push(facts);
    }

    Ok(DerivedTrace {
        universe: log.universe.clone(),
        agents: log.agents.clone(),
        flags: log.flags,
        instants,
        tasks,
        names,
    })
}

fn nonempty_subsets<'a, T>(items: &[&'a T]) -> Vec<Vec<&'a T>> {
    let mut out: Vec<Vec<&T>> = vec![Vec::new()];
    for item in items {
        let extended: Vec<Vec<&T>> = out
            .iter()
            .map(|s| {
                let mut s = s.clone();
                s.push(*item);
                s
            })
            .collect();
        out.extend(extended);
    }
    out.retain(|s| !s.is_empty());
    out
}

fn conjoin_keys<'a>(mut keys: impl Iterator<Item = &'a CanonicalKey>) -> CanonicalKey {
    let first = keys.next().expect("nonempty subset").clone();
    keys.fold(first, |acc, k| acc.and(k))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QueryError {
    #[error("instant {t} is out of range for a trace of length {len}")]
    OutOfRange { t: usize, len: usize },
    #[error("queries may only put propositional objectives under modalities; `{0}` is not")]
    NotPropositional(String),
    #[error("proposition `{0}` is not in the log's universe")]
    UnknownProp(String),
    #[error(transparent)]
    Eval(#[from] crate::static_model::EvalError),
}

impl DerivedTrace {
    /// The trace as a sequence of pointed models: one world per universe
    /// valuation, the instant's valuation as the point, and the instant's
    /// facts installed at that point.
    pub fn to_trace_model(&self) -> TraceModel {
        let u = &self.universe;
        let n = u.valuation_count();
        let worlds: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let valuation: BTreeMap<String, BTreeSet<String>> = (0..n)
            .map(|i| (format!("v{i}"), u.valuation_props(i)))
            .collect();
        let mut instants = Vec::new();
        for facts in &self.instants {
            let mut m = SCModel::new(worlds.clone(), self.agents.clone(), valuation.clone())
                .expect("embedded worlds are fresh");
            let point = format!("v{}", u.valuation_index(&facts.valuation));
            let install = |kind: TableKind, keys: Vec<&FactKey>, m: &mut SCModel| {
                for (g, key) in keys {
                    m.add(kind, &point, g.clone(), key.bits().clone())
                        .expect("facts mention declared agents");
                }
            };
            install(TableKind::Dabl, facts.dabl.iter().collect(), &mut m);
            install(TableKind::Conf, facts.conf.keys().collect(), &mut m);
            install(TableKind::Disc, facts.disc.keys().collect(), &mut m);
            install(TableKind::Brings, facts.e.keys().collect(), &mut m);
            install(TableKind::Attempts, facts.att.keys().collect(), &mut m);
            for (g, okey, dkey) in &facts.tasks {
                m.add_task(&point, g.clone(), okey.bits().clone(), dkey.bits().clone())
                    .expect("facts mention declared agents");
            }
            for (g, okey, dkey) in &facts.agrees {
                m.add_agree(&point, g.clone(), okey.bits().clone(), dkey.bits().clone())
                    .expect("facts mention declared agents");
            }
            instants.push(PointedModel::new(m, &point).expect("the point world exists"));
        }
        TraceModel::new(instants).expect("horizon is at least 1")
    }

    fn check_query(&self, f: &TemporalFormula) -> Result<(), QueryError> {
        fn modal_args_propositional(f: &StaticFormula) -> Result<(), QueryError> {
            use StaticFormula::*;
            match f {
                Prop(_) | Top | Bottom => Ok(()),
                Not(x) => modal_args_propositional(x),
                And(l, r) | Or(l, r) | Implies(l, r) => {
                    modal_args_propositional(l)?;
                    modal_args_propositional(r)
                }
                Dabl(_, x) | Conf(_, x) | Disc(_, x) | Brings(_, x) | Attempts(_, x) => {
                    if x.is_propositional() {
                        Ok(())
                    } else {
                        Err(QueryError::NotPropositional(x.to_string()))
                    }
                }
                Task(_, a, b) | Agree(_, a, b) => {
                    for x in [a, b] {
                        if !x.is_propositional() {
                            return Err(QueryError::NotPropositional(x.to_string()));
                        }
                    }
                    Ok(())
                }
            }
        }
        let mut result = Ok(());
        f.walk_monos(&mut |sf| {
            if result.is_ok() {
                result = modal_args_propositional(sf);
            }
        });
        result?;
        for p in f.free_props() {
            if p != crate::syntax::TRUE_PROP && self.universe.index_of(&p).is_none() {
                return Err(QueryError::UnknownProp(p));
            }
        }
        Ok(())
    }

    /// Evaluates a temporal formula at instant `t` over the embedded trace
    /// model.
    pub fn query(&self, f: &TemporalFormula, t: usize) -> Result<bool, QueryError> {
        if t >= self.len() {
            return Err(QueryError::OutOfRange {
                t,
                len: self.len(),
            });
        }
        self.check_query(f)?;
        match self.to_trace_model().eval(t, f) {
            Ok(b) => Ok(b),
            Err(TemporalEvalError::OutOfRange { t, len }) => {
                Err(QueryError::OutOfRange { t, len })
            }
            Err(TemporalEvalError::Eval(e)) => Err(QueryError::Eval(e)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExplainError {
    #[error("instant {t} is out of range for a trace of length {len}")]
    OutOfRange { t: usize, len: usize },
    #[error("`{0}` does not hold at t={1}")]
    UnknownFact(String, usize),
    #[error("explainable facts are modalities with propositional objectives; got `{0}`")]
    NotAFact(String),
    #[error("objective `{text}` is not propositional over the log's universe: {source}")]
    BadObjective { text: String, source: CanonicalError },
}

/// A derivation story for one fact at one instant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Explanation {
    pub fact: String,
    pub t: usize,
    pub steps: Vec<String>,
}

impl fmt::Display for Explanation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} at t={}", self.fact, self.t)?;
        for s in &self.steps {
            writeln!(f, "  {s}")?;
        }
        Ok(())
    }
}

impl DerivedTrace {
    /// Explains why a fact holds at `t`: instant provenance for evidence
    /// and confirmation facts, and the confirming instant plus the
    /// persistence span for deemed ability.
    pub fn explain(&self, fact: &StaticFormula, t: usize) -> Result<Explanation, ExplainError> {
        use StaticFormula::*;
        if t >= self.len() {
            return Err(ExplainError::OutOfRange {
                t,
                len: self.len(),
            });
        }
        let key_of = |x: &StaticFormula| -> Result<CanonicalKey, ExplainError> {
            canonical_key(x, &self.universe).map_err(|e| ExplainError::BadObjective {
                text: x.to_string(),
                source: e,
            })
        };
        let described = fact.to_string();
        let provenance_steps = |map: &BTreeMap<FactKey, Vec<Provenance>>,
                                key: &FactKey|
         -> Option<Vec<String>> {
            map.get(key).map(|ps| {
                ps.iter()
                    .map(|p| format!("derived at t={t} by {p}"))
                    .collect()
            })
        };
        let steps = match fact {
            Conf(g, x) => provenance_steps(&self.instants[t].conf, &(g.clone(), key_of(x)?)),
            Disc(g, x) => provenance_steps(&self.instants[t].disc, &(g.clone(), key_of(x)?)),
            Brings(g, x) => provenance_steps(&self.instants[t].e, &(g.clone(), key_of(x)?)),
            Attempts(g, x) => provenance_steps(&self.instants[t].att, &(g.clone(), key_of(x)?)),
            Dabl(g, x) => {
                let fact_key = (g.clone(), key_of(x)?);
                if !self.instants[t].dabl.contains(&fact_key) {
                    None
                } else {
                    let confirmed_at = (0..=t)
                        .rev()
                        .find(|s| self.instants[*s].conf.contains_key(&fact_key))
                        .expect("deemed ability always traces back to a confirmation");
                    let mut steps: Vec<String> = self.instants[confirmed_at].conf[&fact_key]
                        .iter()
                        .map(|p| format!("confirmed at t={confirmed_at} by {p}"))
                        .collect();
                    if confirmed_at < t {
                        steps.push(format!(
                            "persisted without disconfirmation through t={confirmed_at}..={t}"
                        ));
                    }
                    Some(steps)
                }
            }
            Task(g, a, b) => {
                let key = (g.clone(), key_of(a)?, key_of(b)?);
                if !self.instants[t].tasks.contains(&key) {
                    None
                } else {
                    let record = self
                        .tasks
                        .iter()
                        .find(|task| {
                            task.group == *g
                                && task.objective_key == key.1
                                && task.deadline_key == key.2
                                && task.active_at(t)
                        })
                        .expect("an active task fact has a registry record");
                    Some(vec![format!(
                        "agreed at t={} by event e{}",
                        record.agreed_at, record.agree_event
                    )])
                }
            }
            Agree(g, a, b) => {
                let key = (g.clone(), key_of(a)?, key_of(b)?);
                self.instants[t].agrees.contains(&key).then(|| {
                    vec![format!("agreement recorded at t={t}")]
                })
            }
            _ => return Err(ExplainError::NotAFact(described)),
        };
        match steps {
            Some(steps) => Ok(Explanation {
                fact: described,
                t,
                steps,
            }),
            None => Err(ExplainError::UnknownFact(described, t)),
        }
    }

    /// One-line summary of an instant's facts, in a fixed order.
    pub fn describe_instant(&self, t: usize) -> String {
        let facts = &self.instants[t];
        let mut parts = vec![format!(
            "t={t} val={{{}}}",
            facts.valuation.iter().cloned().collect::<Vec<_>>().join(",")
        )];
        let render_unary = |label: &str, keys: Vec<&FactKey>| -> Option<String> {
            if keys.is_empty() {
                return None;
            }
            let items: Vec<String> = keys
                .iter()
                .map(|(g, k)| format!("{label}{g} {}", self.render_key(k)))
                .collect();
            Some(items.join(" "))
        };
        for (label, keys) in [
            ("E", facts.e.keys().collect::<Vec<_>>()),
            ("Att", facts.att.keys().collect()),
            ("Conf", facts.conf.keys().collect()),
            ("Disc", facts.disc.keys().collect()),
            ("Dabl", facts.dabl.iter().collect()),
        ] {
            if let Some(part) = render_unary(label, keys) {
                parts.push(part);
            }
        }
        for (label, set) in [("Task", &facts.tasks), ("Agree", &facts.agrees)] {
            for (g, okey, dkey) in set {
                parts.push(format!(
                    "{label}{g}({}; {})",
                    self.render_key(okey),
                    self.render_key(dkey)
                ));
            }
        }
        parts.join(" | ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_static, parse_temporal};
    use crate::temporal_model::{check_interdependence, validate_da_model};

    const BASE_HEADER: &str =
        r#"{"universe":["p1","p2"],"agents":["s1","s2","mgr"],"horizon":4}"#;

    fn log(lines: &[&str]) -> EventLog {
        let mut text = String::from(BASE_HEADER);
        for l in lines {
            text.push('\n');
            text.push_str(l);
        }
        parse_log(&text).unwrap()
    }

    fn fact(trace: &DerivedTrace, text: &str) -> FactKey {
        let f = parse_static(text).unwrap();
        match f {
            StaticFormula::Dabl(g, x)
            | StaticFormula::Conf(g, x)
            | StaticFormula::Disc(g, x)
            | StaticFormula::Brings(g, x)
            | StaticFormula::Attempts(g, x) => {
                (g, canonical_key(&x, trace.universe()).unwrap())
            }
            _ => panic!("not a fact"),
        }
    }

    #[test]
    fn agency_confirms_and_ability_persists() {
        let trace = run(&log(&[
            r#"{"t":0,"props":["p1"]}"#,
            r#"{"t":0,"kind":"agency","G":["s1"],"phi":"p1"}"#,
        ]))
        .unwrap();
        assert_eq!(trace.len(), 4);
        let conf = fact(&trace, "Conf{s1} p1");
        assert!(trace.facts(0).conf.contains_key(&conf));
        assert_eq!(
            trace.facts(0).conf[&conf],
            vec![Provenance::B4 { event: 0 }]
        );
        for t in 0..4 {
            assert!(trace.facts(t).dabl.contains(&conf), "t={t}");
        }
        assert!(trace.facts(1).conf.is_empty());
    }

    #[test]
    fn simultaneous_agency_confirms_every_combination() {
        let trace = run(&log(&[
            r#"{"t":1,"props":["p1","p2"]}"#,
            r#"{"t":1,"kind":"agency","G":["s1"],"phi":"p1"}"#,
            r#"{"t":1,"kind":"agency","G":["s2"],"phi":"p2"}"#,
        ]))
        .unwrap();
        let facts = trace.facts(1);
        for (text, want) in [
            ("Conf{s1} p1", true),
            ("Conf{s2} p2", true),
            ("Conf{s1,s2} (p1 & p2)", true),
            ("Conf{s1,s2} p1", false),
            ("Conf{s1} p2", false),
        ] {
            assert_eq!(
                facts.conf.contains_key(&fact(&trace, text)),
                want,
                "{text}"
            );
        }
        assert_eq!(
            facts.conf[&fact(&trace, "Conf{s1,s2} (p1 & p2)")],
            vec![Provenance::B5 { events: vec![0, 1] }]
        );
        // The conjunction's E fact exists only for the combined group when
        // the group is the same; here groups differ, so each keeps its own.
        assert!(facts.e.contains_key(&fact(&trace, "E{s1} p1")));
        assert!(!facts.e.contains_key(&fact(&trace, "E{s1,s2} (p1 & p2)")));
    }

    #[test]
    fn same_group_agency_closes_under_conjunction() {
        let trace = run(&log(&[
            r#"{"t":0,"props":["p1","p2"]}"#,
            r#"{"t":0,"kind":"agency","G":["s1"],"phi":"p1"}"#,
            r#"{"t":0,"kind":"agency","G":["s1"],"phi":"p2"}"#,
        ]))
        .unwrap();
        let facts = trace.facts(0);
        assert!(facts.e.contains_key(&fact(&trace, "E{s1} (p1 & p2)")));
        assert_eq!(
            facts.e[&fact(&trace, "E{s1} (p1 & p2)")],
            vec![Provenance::Closure { events: vec![0, 1] }]
        );
    }

    #[test]
    fn factivity_and_tautologies_are_enforced() {
        let err = run(&log(&[r#"{"t":0,"kind":"agency","G":["s1"],"phi":"p1"}"#]))
            .unwrap_err();
        assert!(matches!(
            err,
            DerivationError::AgencyContradiction { t: 0, event: 0, .. }
        ));
        let err = run(&log(&[
            r#"{"t":0,"props":["p1"]}"#,
            r#"{"t":0,"kind":"agency","G":["s1"],"phi":"p1 | !p1"}"#,
        ]))
        .unwrap_err();
        assert!(matches!(err, DerivationError::TautologicalAgency { .. }));
    }

    #[test]
    fn grants_confirm_and_revocations_disconfirm() {
        let trace = run(&log(&[
            r#"{"t":0,"kind":"grant","G":["s2"],"phi":"p2"}"#,
            r#"{"t":2,"kind":"revoke","G":["s2"],"phi":"p2"}"#,
        ]))
        .unwrap();
        let key = fact(&trace, "Dabl{s2} p2");
        assert!(trace.facts(0).dabl.contains(&key));
        assert!(trace.facts(1).dabl.contains(&key));
        assert!(!trace.facts(2).dabl.contains(&key));
        assert!(!trace.facts(3).dabl.contains(&key));
        assert_eq!(
            trace.facts(2).disc[&key],
            vec![Provenance::T2 { event: 1 }]
        );
    }

    #[test]
    fn failed_attempts_disconfirm_but_matched_ones_do_not() {
        let trace = run(&log(&[
            r#"{"t":0,"props":["p1"]}"#,
            r#"{"t":0,"kind":"attempt","G":["s1"],"phi":"p2"}"#,
            r#"{"t":1,"props":["p1"]}"#,
            r#"{"t":1,"kind":"agency","G":["s1"],"phi":"p1"}"#,
            r#"{"t":1,"kind":"attempt","G":["s1"],"phi":"p1"}"#,
        ]))
        .unwrap();
        let missed = fact(&trace, "Disc{s1} p2");
        assert_eq!(
            trace.facts(0).disc[&missed],
            vec![Provenance::B7 { event: 0 }]
        );
        // The attempt at t=1 is matched by agency, so nothing is
        // disconfirmed there.
        assert!(trace.facts(1).disc.is_empty());
    }

    #[test]
    fn attempt_matched_by_closure_counts_as_matched() {
        // The attempt targets the conjunction; only the two conjuncts are
        // recorded as agency, and the closure covers the attempt.
        let trace = run(&log(&[
            r#"{"t":0,"props":["p1","p2"]}"#,
            r#"{"t":0,"kind":"agency","G":["s1"],"phi":"p1"}"#,
            r#"{"t":0,"kind":"agency","G":["s1"],"phi":"p2"}"#,
            r#"{"t":0,"kind":"attempt","G":["s1"],"phi":"p2 & p1"}"#,
        ]))
        .unwrap();
        assert!(trace.facts(0).disc.is_empty());
    }

    #[test]
    fn inconsistent_instants_are_rejected_with_both_sides() {
        let err = run(&log(&[
            r#"{"t":0,"kind":"grant","G":["s1"],"phi":"p1"}"#,
            r#"{"t":0,"kind":"revoke","G":["s1"],"phi":"p1"}"#,
        ]))
        .unwrap_err();
        match err {
            DerivationError::Inconsistency {
                t,
                confirmed,
                disconfirmed,
                ..
            } => {
                assert_eq!(t, 0);
                assert_eq!(confirmed, "t1(e0)");
                assert_eq!(disconfirmed, "t2(e1)");
            }
            other => panic!("wrong error: {other}"),
        }
    }

    #[test]
    fn tasks_complete_on_matching_agency() {
        let trace = run(&log(&[
            r#"{"t":0,"kind":"agree","G":["s1"],"phi":"p1","psi":"p2"}"#,
            r#"{"t":2,"props":["p1"]}"#,
            r#"{"t":2,"kind":"agency","G":["s1"],"phi":"p1"}"#,
        ]))
        .unwrap();
        assert_eq!(trace.tasks().len(), 1);
        assert_eq!(trace.tasks()[0].status, TaskStatus::CompletedAt { t: 2 });
        // Active at 0 and 1, gone at the completion instant.
        assert_eq!(trace.facts(0).tasks.len(), 1);
        assert_eq!(trace.facts(1).tasks.len(), 1);
        assert!(trace.facts(2).tasks.is_empty());
        assert!(trace.facts(2).disc.is_empty());
        assert!(trace.facts(3).tasks.is_empty());
    }

    #[test]
    fn tasks_expire_into_disconfirmation() {
        let trace = run(&log(&[
            r#"{"t":0,"kind":"agree","G":["s1"],"phi":"p1","psi":"p2"}"#,
            r#"{"t":2,"props":["p2"]}"#,
        ]))
        .unwrap();
        assert_eq!(trace.tasks()[0].status, TaskStatus::ExpiredAt { t: 2 });
        let key = fact(&trace, "Disc{s1} p1");
        assert_eq!(trace.facts(2).disc[&key], vec![Provenance::T7 { task: 0 }]);
        assert!(trace.facts(2).tasks.is_empty());
    }

    #[test]
    fn completion_at_the_deadline_beats_expiry() {
        let trace = run(&log(&[
            r#"{"t":0,"kind":"agree","G":["s1"],"phi":"p1","psi":"p2"}"#,
            r#"{"t":1,"props":["p1","p2"]}"#,
            r#"{"t":1,"kind":"agency","G":["s1"],"phi":"p1"}"#,
        ]))
        .unwrap();
        assert_eq!(trace.tasks()[0].status, TaskStatus::CompletedAt { t: 1 });
        assert!(!trace.facts(1).disc.contains_key(&fact(&trace, "Disc{s1} p1")));
    }

    #[test]
    fn paradoxical_agreements_are_rejected() {
        let err = run(&log(&[
            r#"{"t":0,"props":["p2"]}"#,
            r#"{"t":0,"kind":"agree","G":["s1"],"phi":"p1","psi":"p2"}"#,
        ]))
        .unwrap_err();
        assert!(matches!(err, DerivationError::TaskParadox { .. }));
        let err = run(&log(&[
            r#"{"t":0,"props":["p1"]}"#,
            r#"{"t":0,"kind":"agency","G":["s1"],"phi":"p1"}"#,
            r#"{"t":0,"kind":"agree","G":["s1"],"phi":"p1","psi":"p2"}"#,
        ]))
        .unwrap_err();
        assert!(matches!(err, DerivationError::TaskParadox { .. }));
    }

    #[test]
    fn flags_change_the_derived_facts() {
        let header = r#"{"universe":["p1"],"agents":["s1","s2"],"horizon":1,"flags":{"monotonic_conf":true,"b6":true}}"#;
        let text = format!(
            "{header}\n{}\n{}",
            r#"{"t":0,"props":["p1"]}"#, r#"{"t":0,"kind":"agency","G":["s1"],"phi":"p1"}"#
        );
        let trace = run(&parse_log(&text).unwrap()).unwrap();
        let facts = trace.facts(0);
        // b6: the agency record counts as an attempt.
        assert!(facts.att.contains_key(&fact(&trace, "Att{s1} p1")));
        // monotonic_conf: supergroups inherit the confirmation.
        assert!(facts.conf.contains_key(&fact(&trace, "Conf{s1,s2} p1")));
        assert!(facts
            .conf
            .contains_key(&fact(&trace, "Conf{s1} p1")));
    }

    #[test]
    fn b6_covers_closure_conjunctions() {
        let header =
            r#"{"universe":["p1","p2"],"agents":["s1"],"horizon":1,"flags":{"b6":true}}"#;
        let text = format!(
            "{header}\n{}\n{}\n{}",
            r#"{"t":0,"props":["p1","p2"]}"#,
            r#"{"t":0,"kind":"agency","G":["s1"],"phi":"p1"}"#,
            r#"{"t":0,"kind":"agency","G":["s1"],"phi":"p2"}"#
        );
        let trace = run(&parse_log(&text).unwrap()).unwrap();
        let facts = trace.facts(0);
        let conjunction = fact(&trace, "Att{s1} (p1 & p2)");
        assert!(facts.e.contains_key(&fact(&trace, "E{s1} (p1 & p2)")));
        assert_eq!(
            facts.att.get(&conjunction),
            Some(&vec![Provenance::AgencyAttempt { events: vec![0, 1] }])
        );
        // Every success carries an attempt alongside it.
        for key in facts.e.keys() {
            assert!(facts.att.contains_key(key), "no attempt for {key:?}");
        }
    }

    #[test]
    fn empty_group_conf_can_be_excluded() {
        let base = r#"{"t":0,"props":["p1"]}
{"t":0,"kind":"agency","G":[],"phi":"p1"}
{"t":0,"kind":"grant","G":[],"phi":"p1"}"#;
        let with = |flags: &str| -> DerivedTrace {
            let text = format!(
                r#"{{"universe":["p1"],"agents":["s1"],"horizon":1{flags}}}
{base}"#
            );
            run(&parse_log(&text).unwrap()).unwrap()
        };
        let default = with("");
        assert_eq!(default.facts(0).conf.len(), 1);
        // Both the success and the grant land on the same empty-group fact.
        assert_eq!(default.facts(0).conf.values().next().unwrap().len(), 2);
        let excluded = with(r#","flags":{"empty_group_excluded":true}"#);
        assert!(excluded.facts(0).conf.is_empty());
        // The E fact stays either way.
        assert_eq!(excluded.facts(0).e.len(), 1);
    }

    #[test]
    fn subset_cap_is_enforced() {
        let mut lines = vec![r#"{"t":0,"props":["p1"]}"#.to_string()];
        for _ in 0..3 {
            lines.push(r#"{"t":0,"kind":"agency","G":["s1"],"phi":"p1"}"#.to_string());
        }
        let text = format!(
            "{}\n{}",
            r#"{"universe":["p1"],"agents":["s1"],"horizon":1,"flags":{"b5_subset_cap":2}}"#,
            lines.join("\n")
        );
        let err = run(&parse_log(&text).unwrap()).unwrap_err();
        assert_eq!(
            err,
            DerivationError::SubsetCapExceeded {
                t: 0,
                count: 3,
                cap: 2
            }
        );
    }

    #[test]
    fn log_shape_errors_carry_line_numbers() {
        let cases: Vec<(String, &str)> = vec![
            ("not json".to_string(), "line 1"),
            (r#"{"t":0,"kind":"agency","G":[],"phi":"p1"}"#.to_string(), "header"),
            (
                format!("{BASE_HEADER}\n{BASE_HEADER}"),
                "second header",
            ),
            (
                format!("{BASE_HEADER}\n{}", r#"{"t":9,"props":[]}"#),
                "outside the horizon",
            ),
            (
                format!(
                    "{BASE_HEADER}\n{}\n{}",
                    r#"{"t":2,"props":[]}"#, r#"{"t":1,"props":[]}"#
                ),
                "nondecreasing",
            ),
            (
                format!(
                    "{BASE_HEADER}\n{}\n{}",
                    r#"{"t":1,"props":[]}"#, r#"{"t":1,"props":["p1"]}"#
                ),
                "already has a valuation",
            ),
            (
                format!("{BASE_HEADER}\n{}", r#"{"t":0,"props":["zz"]}"#),
                "not in the universe",
            ),
            (
                format!(
                    "{BASE_HEADER}\n{}",
                    r#"{"t":0,"kind":"agency","G":["nobody"],"phi":"p1"}"#
                ),
                "not declared",
            ),
            (
                format!(
                    "{BASE_HEADER}\n{}",
                    r#"{"t":0,"kind":"agency","G":["s1"],"phi":"p1 &"}"#
                ),
                "cannot parse",
            ),
            (
                format!(
                    "{BASE_HEADER}\n{}",
                    r#"{"t":0,"kind":"agency","G":["s1"],"phi":"Dabl{s1} p1"}"#
                ),
                "not usable",
            ),
            (
                format!(
                    "{BASE_HEADER}\n{}",
                    r#"{"t":0,"kind":"agree","G":["s1"],"phi":"p1"}"#
                ),
                "needs a `psi`",
            ),
            (
                format!("{BASE_HEADER}\n{}", r#"{"t":0,"what":"x"}"#),
                "neither an event",
            ),
            (
                format!("{BASE_HEADER}\n{}", r#"{"t":0,"kind":"dance","G":[],"phi":"p1"}"#),
                "unknown event kind",
            ),
        ];
        for (text, needle) in cases {
            let err = parse_log(&text).unwrap_err().to_string();
            assert!(err.contains(needle), "`{err}` should mention `{needle}`");
        }
        assert_eq!(
            parse_log(r#"{"universe":["p1"],"agents":[],"horizon":0}"#),
            Err(LogError::EmptyHorizon)
        );
    }

    #[test]
    fn derived_traces_embed_as_valid_trace_models() {
        let trace = run(&log(&[
            r#"{"t":0,"props":["p1"]}"#,
            r#"{"t":0,"kind":"agency","G":["s1"],"phi":"p1"}"#,
            r#"{"t":1,"kind":"grant","G":["s2"],"phi":"p2"}"#,
            r#"{"t":2,"kind":"agree","G":["s1"],"phi":"p2","psi":"p1"}"#,
            r#"{"t":3,"kind":"revoke","G":["s1"],"phi":"p1"}"#,
        ]))
        .unwrap();
        let tm = trace.to_trace_model();
        assert_eq!(tm.len(), 4);
        let report = validate_da_model(&tm).unwrap();
        assert!(report.is_valid(), "{:?}", report);
        assert_eq!(check_interdependence(&tm).unwrap(), vec![]);
        // The point tracks the valuation.
        assert_eq!(tm.instant(0).point_name(), "v2");
        assert_eq!(tm.instant(1).point_name(), "v0");
    }

    #[test]
    fn queries_evaluate_over_the_embedding() {
        let trace = run(&log(&[
            r#"{"t":0,"kind":"grant","G":["s2"],"phi":"p2"}"#,
            r#"{"t":2,"kind":"revoke","G":["s2"],"phi":"p2"}"#,
        ]))
        .unwrap();
        let q = |text: &str, t: usize| -> bool {
            trace.query(&parse_temporal(text).unwrap(), t).unwrap()
        };
        assert!(q("Dabl{s2} p2", 0));
        assert!(q("Dabl{s2} p2", 1));
        assert!(!q("Dabl{s2} p2", 2));
        assert!(q("(Dabl{s2} p2) U (Disc{s2} p2)", 0));
        assert!(q("(!Dabl{s2} p2) W (Conf{s2} p2)", 2));
        assert!(q("F (Disc{s2} p2)", 1));
        assert!(q("P (Conf{s2} p2)", 3));

        let errs = [
            trace.query(&parse_temporal("Dabl{s2} Conf{s2} p2").unwrap(), 0),
            trace.query(&parse_temporal("zz").unwrap(), 0),
            trace.query(&parse_temporal("p1").unwrap(), 9),
        ];
        assert!(matches!(errs[0], Err(QueryError::NotPropositional(_))));
        assert!(matches!(errs[1], Err(QueryError::UnknownProp(_))));
        assert!(matches!(errs[2], Err(QueryError::OutOfRange { .. })));
    }

    #[test]
    fn explanations_tell_the_derivation_story() {
        let trace = run(&log(&[
            r#"{"t":0,"props":["p1"]}"#,
            r#"{"t":0,"kind":"agency","G":["s1"],"phi":"p1"}"#,
            r#"{"t":2,"kind":"agree","G":["s2"],"phi":"p2","psi":"p1"}"#,
        ]))
        .unwrap();
        let explain = |text: &str, t: usize| -> Explanation {
            trace.explain(&parse_static(text).unwrap(), t).unwrap()
        };
        let e = explain("Dabl{s1} p1", 3);
        assert_eq!(
            e.steps,
            vec![
                "confirmed at t=0 by b4(e0)".to_string(),
                "persisted without disconfirmation through t=0..=3".to_string(),
            ]
        );
        assert_eq!(explain("Conf{s1} p1", 0).steps, vec![
            "derived at t=0 by b4(e0)".to_string()
        ]);
        assert_eq!(explain("E{s1} p1", 0).steps, vec![
            "derived at t=0 by agency(e0)".to_string()
        ]);
        assert_eq!(explain("Task{s2}(p2; p1)", 3).steps, vec![
            "agreed at t=2 by event e1".to_string()
        ]);
        assert_eq!(explain("Agree{s2}(p2; p1)", 2).steps, vec![
            "agreement recorded at t=2".to_string()
        ]);

        assert!(matches!(
            trace.explain(&parse_static("Disc{s1} p1").unwrap(), 0),
            Err(ExplainError::UnknownFact(..))
        ));
        assert!(matches!(
            trace.explain(&parse_static("p1 & p1").unwrap(), 0),
            Err(ExplainError::NotAFact(_))
        ));
        assert!(matches!(
            trace.explain(&parse_static("Conf{s1} p1").unwrap(), 9),
            Err(ExplainError::OutOfRange { .. })
        ));
    }

    #[test]
    fn instants_describe_themselves_stably() {
        let trace = run(&log(&[
            r#"{"t":0,"props":["p1"]}"#,
            r#"{"t":0,"kind":"agency","G":["s1"],"phi":"p1"}"#,
        ]))
        .unwrap();
        assert_eq!(
            trace.describe_instant(0),
            "t=0 val={p1} | E{s1} p1 | Conf{s1} p1 | Dabl{s1} p1"
        );
        // Ability persists even through eventless instants.
        assert_eq!(trace.describe_instant(1), "t=1 val={} | Dabl{s1} p1");
    }

    #[test]
    fn logs_round_trip_through_jsonl() {
        let original = log(&[
            r#"{"t":0,"props":["p1","p2"]}"#,
            r#"{"t":0,"kind":"agency","G":["s1"],"phi":"p1"}"#,
            r#"{"t":0,"kind":"agency","G":["s2"],"phi":"p2"}"#,
            r#"{"t":1,"kind":"agree","G":["s2"],"phi":"p1","psi":"p2"}"#,
            r#"{"t":2,"props":["p2"]}"#,
            r#"{"t":2,"kind":"attempt","G":["s1","s2"],"phi":"p2 & p1"}"#,
        ]);
        let reparsed = parse_log(&original.to_jsonl()).unwrap();
        assert_eq!(reparsed, original);
        // A second trip is byte-identical.
        assert_eq!(reparsed.to_jsonl(), original.to_jsonl());
    }
}
