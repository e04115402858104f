//! Trace models: finite sequences of pointed static models, one per
//! instant, with strict until/since evaluation over them.
//!
//! Beyond evaluation this module checks the three trace conditions that
//! tie ability facts to their evidence over time:
//!
//! * **C1**: once deemed able, a group stays deemed able until a
//!   disconfirmation lands;
//! * **C2**: once not deemed able, it stays that way until a
//!   confirmation lands;
//! * **C3**: being deemed able traces back to a confirmation now or in
//!   the past, with ability unbroken in between.
//!
//! The checks run over whatever fact tables a trace actually has, valid or
//! not, and report violations as data with a minimal witness each.

use crate::bitset::BitSet;
use crate::canonical::{CanonicalKey, Universe};
use crate::static_model::{EvalError, ModelViolation, SCModel, TableKind, validate_sc_model};
use crate::syntax::{Group, StaticFormula, TemporalFormula};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TraceError {
    #[error("a trace needs at least one instant")]
    Empty,
    #[error("instant {instant} declares a different world list than instant 0")]
    HeterogeneousWorlds { instant: usize },
    #[error("unknown world id `{0}` as a point")]
    UnknownPoint(String),
    #[error("instant {instant}: model reference {reference} does not point at an earlier instant")]
    BadReference { instant: usize, reference: usize },
    #[error("`instants` says {declared} but {found} models are listed")]
    LengthMismatch { declared: usize, found: usize },
    #[error("trace file is not valid JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Model(#[from] crate::static_model::ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TemporalEvalError {
    #[error("instant {t} is out of range for a trace of length {len}")]
    OutOfRange { t: usize, len: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// A static model with a distinguished world.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointedModel {
    pub model: SCModel,
    pub point: usize,
}

impl PointedModel {
    pub fn new(model: SCModel, point: &str) -> Result<Self, TraceError> {
        let point = model
            .world_index(point)
            .ok_or_else(|| TraceError::UnknownPoint(point.to_string()))?;
        Ok(PointedModel { model, point })
    }

    pub fn point_name(&self) -> &str {
        &self.model.worlds()[self.point]
    }
}

/// A nonempty sequence of pointed models, indexed by instant `0..len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceModel {
    instants: Vec<PointedModel>,
}

impl TraceModel {
    pub fn new(instants: Vec<PointedModel>) -> Result<Self, TraceError> {
        if instants.is_empty() {
            return Err(TraceError::Empty);
        }
        Ok(TraceModel { instants })
    }

    pub fn len(&self) -> usize {
        self.instants.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn instant(&self, t: usize) -> &PointedModel {
        &self.instants[t]
    }

    pub fn instants(&self) -> &[PointedModel] {
        &self.instants
    }

    /// Truth of `f` at every instant, computed bottom-up: each connective
    /// turns the vectors of its children into its own in one pass.
    pub fn truth_vector(&self, f: &TemporalFormula) -> Result<Vec<bool>, EvalError> {
        let n = self.len();
        Ok(match f {
            TemporalFormula::Mono(sf) => {
                let mut v = Vec::with_capacity(n);
                for pm in &self.instants {
                    v.push(pm.model.eval_at(pm.point, sf)?);
                }
                v
            }
            TemporalFormula::Not(x) => {
                let mut v = self.truth_vector(x)?;
                for b in &mut v {
                    *b = !*b;
                }
                v
            }
            TemporalFormula::And(l, r) => {
                let l = self.truth_vector(l)?;
                let r = self.truth_vector(r)?;
                l.into_iter().zip(r).map(|(a, b)| a && b).collect()
            }
            TemporalFormula::Until(l, r) => {
                let l = self.truth_vector(l)?;
                let r = self.truth_vector(r)?;
                let mut v = vec![false; n];
                for t in (0..n.saturating_sub(1)).rev() {
                    v[t] = r[t + 1] || (l[t + 1] && v[t + 1]);
                }
                v
            }
            TemporalFormula::Since(l, r) => {
                let l = self.truth_vector(l)?;
                let r = self.truth_vector(r)?;
                let mut v = vec![false; n];
                for t in 1..n {
                    v[t] = r[t - 1] || (l[t - 1] && v[t - 1]);
                }
                v
            }
        })
    }

    pub fn eval(&self, t: usize, f: &TemporalFormula) -> Result<bool, TemporalEvalError> {
        if t >= self.len() {
            return Err(TemporalEvalError::OutOfRange { t, len: self.len() });
        }
        Ok(self.truth_vector(f)?[t])
    }

    pub fn to_json(&self) -> String {
        let mut models = Vec::new();
        for (i, pm) in self.instants.iter().enumerate() {
            let reuse = self.instants[..i]
                .iter()
                .position(|prev| prev.model == pm.model);
            models.push(InstantEntry {
                model: match reuse {
                    Some(j) => ModelOrRef::Ref { reference: j },
                    None => ModelOrRef::Inline(Box::new((&pm.model).into())),
                },
                point: pm.point_name().to_string(),
            });
        }
        let file = TraceFile {
            instants: self.instants.len(),
            models,
        };
        serde_json::to_string_pretty(&file).expect("trace serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, TraceError> {
        let file: TraceFile =
            serde_json::from_str(text).map_err(|e| TraceError::Json(e.to_string()))?;
        if file.instants != file.models.len() {
            return Err(TraceError::LengthMismatch {
                declared: file.instants,
                found: file.models.len(),
            });
        }
        let mut instants: Vec<PointedModel> = Vec::new();
        for (i, entry) in file.models.into_iter().enumerate() {
            let model = match entry.model {
                ModelOrRef::Ref { reference } => {
                    if reference >= i {
                        return Err(TraceError::BadReference {
                            instant: i,
                            reference,
                        });
                    }
                    instants[reference].model.clone()
                }
                ModelOrRef::Inline(m) => SCModel::try_from(*m)?,
            };
            instants.push(PointedModel::new(model, &entry.point)?);
        }
        TraceModel::new(instants)
    }
}

/// Evaluates `f` at instant `t` of `tm`.
pub fn eval_temporal(
    tm: &TraceModel,
    t: usize,
    f: &TemporalFormula,
) -> Result<bool, TemporalEvalError> {
    tm.eval(t, f)
}

#[derive(Serialize, Deserialize)]
struct TraceFile {
    instants: usize,
    models: Vec<InstantEntry>,
}

#[derive(Serialize, Deserialize)]
struct InstantEntry {
    model: ModelOrRef,
    point: String,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ModelOrRef {
    Ref {
        #[serde(rename = "ref")]
        reference: usize,
    },
    Inline(Box<crate::static_model::ModelFile>),
}

// ---- Ability-trace axioms ----

/// The three persistence/grounding axioms over a group and objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DAAxiom {
    /// Deemed ability persists until disconfirmed.
    Lbda1,
    /// Deemed inability persists until confirmed.
    Lbda2,
    /// Deemed ability is grounded in a present or past confirmation.
    Lbda3,
}

impl fmt::Display for DAAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DAAxiom::Lbda1 => "lbda1",
            DAAxiom::Lbda2 => "lbda2",
            DAAxiom::Lbda3 => "lbda3",
        })
    }
}

/// Builds the temporal instance of an axiom for a given group/objective.
pub fn axiom_instance(axiom: DAAxiom, g: &Group, phi: &StaticFormula) -> TemporalFormula {
    let dabl = TemporalFormula::mono(StaticFormula::dabl(g.clone(), phi.clone()))
        .expect("modality roots are monolithic");
    let conf = TemporalFormula::mono(StaticFormula::conf(g.clone(), phi.clone()))
        .expect("modality roots are monolithic");
    let disc = TemporalFormula::mono(StaticFormula::disc(g.clone(), phi.clone()))
        .expect("modality roots are monolithic");
    match axiom {
        DAAxiom::Lbda1 => {
            TemporalFormula::implies(dabl.clone(), TemporalFormula::weak_until(dabl, disc))
        }
        DAAxiom::Lbda2 => TemporalFormula::implies(
            TemporalFormula::not(dabl.clone()),
            TemporalFormula::weak_until(TemporalFormula::not(dabl), conf),
        ),
        DAAxiom::Lbda3 => TemporalFormula::implies(
            dabl.clone(),
            TemporalFormula::or(conf.clone(), TemporalFormula::since(dabl, conf)),
        ),
    }
}

/// Truth vector of an axiom instance over the trace.
pub fn axiom_check(
    tm: &TraceModel,
    axiom: DAAxiom,
    g: &Group,
    phi: &StaticFormula,
) -> Result<Vec<bool>, EvalError> {
    tm.truth_vector(&axiom_instance(axiom, g, phi))
}

// ---- Trace validation ----

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TraceCondition {
    C1,
    C2,
    C3,
}

impl TraceCondition {
    pub fn axiom(self) -> DAAxiom {
        match self {
            TraceCondition::C1 => DAAxiom::Lbda1,
            TraceCondition::C2 => DAAxiom::Lbda2,
            TraceCondition::C3 => DAAxiom::Lbda3,
        }
    }
}

impl fmt::Display for TraceCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TraceCondition::C1 => "C1",
            TraceCondition::C2 => "C2",
            TraceCondition::C3 => "C3",
        })
    }
}

/// A trace-condition violation, anchored at the instant where the
/// offending fact holds, with a minimal witness for why no later (or
/// earlier) instant repairs it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DAViolation {
    pub condition: TraceCondition,
    pub t: usize,
    pub group: Group,
    /// The objective as a set of world ids.
    pub objective_worlds: Vec<String>,
    /// The objective rendered as a formula, when the trace's worlds
    /// enumerate the valuations of a proposition universe.
    pub objective_formula: Option<String>,
    pub witness: String,
}

impl DAViolation {
    /// One-line rendering, e.g.
    /// `C1 t=3 G={a,b} phi=p witness=deemed at t=3 ...`.
    pub fn render(&self) -> String {
        let phi = match &self.objective_formula {
            Some(f) => f.clone(),
            None => format!("[{}]", self.objective_worlds.join(",")),
        };
        format!(
            "{} t={} G={} phi={} witness={}",
            self.condition, self.t, self.group, phi, self.witness
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct DAValidationReport {
    /// C1–C3 violations across all instants, groups and tracked
    /// objectives.
    pub violations: Vec<DAViolation>,
    /// Per-instant neighborhood-constraint violations.
    pub static_violations: Vec<(usize, ModelViolation)>,
}

impl DAValidationReport {
    /// True when the trace meets C1–C3; per-instant static violations are
    /// reported separately and do not affect this.
    pub fn conditions_hold(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty() && self.static_violations.is_empty()
    }
}

/// When the model's worlds enumerate the valuations of the propositions it
/// mentions (in valuation-index order), returns that universe.
pub fn aligned_universe(m: &SCModel) -> Option<Universe> {
    let props: BTreeSet<String> = (0..m.world_count())
        .flat_map(|w| m.valuation(w).iter().cloned())
        .collect();
    let u = Universe::new(props).ok()?;
    if m.world_count() != u.valuation_count() {
        return None;
    }
    for w in 0..m.world_count() {
        if *m.valuation(w) != u.valuation_props(w) {
            return None;
        }
    }
    Some(u)
}

/// Checks C1–C3 over every tracked objective and group.
///
/// Tracked objectives are the world sets appearing in any instant's
/// `dabl`/`conf`/`disc` table, read rigidly across instants (the same world
/// set at every instant). Groups are every subset of the trace's agents
/// when there are at most six of them, otherwise the groups actually keyed
/// in fact tables. All instants must declare the same world list.
pub fn validate_da_model(tm: &TraceModel) -> Result<DAValidationReport, TraceError> {
    let worlds = tm.instant(0).model.worlds();
    for (i, pm) in tm.instants().iter().enumerate() {
        if pm.model.worlds() != worlds {
            return Err(TraceError::HeterogeneousWorlds { instant: i });
        }
    }

    let agents: BTreeSet<_> = tm
        .instants()
        .iter()
        .flat_map(|pm| pm.model.agents().iter().cloned())
        .collect();
    let groups: BTreeSet<Group> = if agents.len() <= 6 {
        crate::static_model::subsets(&agents.into_iter().collect::<Vec<_>>())
            .into_iter()
            .map(Group::new)
            .collect()
    } else {
        tm.instants()
            .iter()
            .flat_map(|pm| pm.model.fact_groups())
            .collect()
    };
    let objectives: BTreeSet<BitSet> = tm
        .instants()
        .iter()
        .flat_map(|pm| pm.model.fact_sets())
        .collect();

    let universe = aligned_universe(&tm.instant(0).model);
    let render_formula = |x: &BitSet| -> Option<String> {
        let u = universe.as_ref()?;
        let key = CanonicalKey::from_bits(x.clone());
        Some(crate::canonical::key_to_formula(&key, u).to_string())
    };

    let mut report = DAValidationReport::default();
    for (i, pm) in tm.instants().iter().enumerate() {
        for v in validate_sc_model(&pm.model).violations {
            report.static_violations.push((i, v));
        }
    }

    let n = tm.len();
    for g in &groups {
        for x in &objectives {
            let at = |kind: TableKind, t: usize| -> bool {
                let pm = tm.instant(t);
                pm.model.has_member(kind, pm.point, g, x)
            };
            let dabl: Vec<bool> = (0..n).map(|t| at(TableKind::Dabl, t)).collect();
            let conf: Vec<bool> = (0..n).map(|t| at(TableKind::Conf, t)).collect();
            let disc: Vec<bool> = (0..n).map(|t| at(TableKind::Disc, t)).collect();
            let mut push = |condition: TraceCondition, t: usize, witness: String| {
                report.violations.push(DAViolation {
                    condition,
                    t,
                    group: g.clone(),
                    objective_worlds: x.iter_ones().map(|i| worlds[i].clone()).collect(),
                    objective_formula: render_formula(x),
                    witness,
                });
            };

            for t in 0..n {
                // C1: deemed ability holds until a disconfirmation.
                if dabl[t] {
                    if let Some(s) = (t + 1..n).find(|s| !dabl[*s]) {
                        if !(t + 1..=s).any(|u| disc[u]) {
                            push(
                                TraceCondition::C1,
                                t,
                                format!(
                                    "deemed at t={t} but not at s={s} and never \
                                     disconfirmed in ({t},{s}]"
                                ),
                            );
                        }
                    }
                }
                // C2: deemed inability holds until a confirmation.
                if !dabl[t] {
                    if let Some(s) = (t + 1..n).find(|s| dabl[*s]) {
                        if !(t + 1..=s).any(|u| conf[u]) {
                            push(
                                TraceCondition::C2,
                                t,
                                format!(
                                    "not deemed at t={t} but deemed at s={s} and never \
                                     confirmed in ({t},{s}]"
                                ),
                            );
                        }
                    }
                }
                // C3: deemed ability is grounded in a confirmation at or
                // before it, with ability unbroken in between.
                if dabl[t]
                    && !conf[t]
                    && !(0..t).any(|s| conf[s] && (s + 1..t).all(|u| dabl[u]))
                {
                    let mut r = t;
                    while r > 0 && dabl[r - 1] {
                        r -= 1;
                    }
                    push(
                        TraceCondition::C3,
                        t,
                        format!(
                            "deemed continuously since t={r} with no confirmation \
                             in [{r},{t}]"
                        ),
                    );
                }
            }
        }
    }
    Ok(report)
}

/// A mismatch between having an ability fact and having a confirmation for
/// it somewhere in the trace: over any trace meeting C2 and C3, a group is
/// deemed able of an objective at some instant exactly when that ability
/// is confirmed at some instant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InterdependenceViolation {
    pub group: Group,
    pub objective_worlds: Vec<String>,
    /// An instant with the ability fact, when confirmation is missing
    /// everywhere; otherwise an instant with the confirmation.
    pub t: usize,
    pub dabl_somewhere: bool,
    pub conf_somewhere: bool,
}

/// Checks the interdependence of ability and confirmation per tracked
/// `(group, objective)` pair.
pub fn check_interdependence(tm: &TraceModel) -> Result<Vec<InterdependenceViolation>, TraceError> {
    let worlds = tm.instant(0).model.worlds();
    for (i, pm) in tm.instants().iter().enumerate() {
        if pm.model.worlds() != worlds {
            return Err(TraceError::HeterogeneousWorlds { instant: i });
        }
    }
    let mut pairs: BTreeSet<(Group, BitSet)> = BTreeSet::new();
    for pm in tm.instants() {
        for g in pm.model.fact_groups() {
            for x in pm.model.fact_sets() {
                pairs.insert((g.clone(), x));
            }
        }
    }
    let mut out = Vec::new();
    for (g, x) in pairs {
        let hit = |kind: TableKind| -> Option<usize> {
            (0..tm.len()).find(|t| {
                let pm = tm.instant(*t);
                pm.model.has_member(kind, pm.point, &g, &x)
            })
        };
        let dabl_at = hit(TableKind::Dabl);
        let conf_at = hit(TableKind::Conf);
        if dabl_at.is_some() != conf_at.is_some() {
            out.push(InterdependenceViolation {
                group: g,
                objective_worlds: x.iter_ones().map(|i| worlds[i].clone()).collect(),
                t: dabl_at.or(conf_at).unwrap(),
                dabl_somewhere: dabl_at.is_some(),
                conf_somewhere: conf_at.is_some(),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{AgentId, parse_static, parse_temporal};
    use std::collections::{BTreeMap, BTreeSet};

    fn g(names: &[&str]) -> Group {
        Group::from_names(names.iter().copied()).unwrap()
    }

    /// One world `w`, proposition `p` true there, so `ext(p) = {w}` at
    /// every instant; fact tables are driven directly by bit vectors.
    fn vector_trace(dabl: &[bool], conf: &[bool], disc: &[bool]) -> TraceModel {
        let n = dabl.len();
        let mut instants = Vec::new();
        for t in 0..n {
            let valuation = BTreeMap::from([(
                "w".to_string(),
                BTreeSet::from(["p".to_string()]),
            )]);
            let mut m = SCModel::new(
                vec!["w".into()],
                [AgentId::new("a").unwrap()],
                valuation,
            )
            .unwrap();
            let x = m.world_set(["w"]).unwrap();
            for (kind, bit) in [
                (TableKind::Dabl, dabl[t]),
                (TableKind::Conf, conf[t]),
                (TableKind::Disc, disc[t]),
            ] {
                if bit {
                    m.add(kind, "w", g(&["a"]), x.clone()).unwrap();
                }
            }
            instants.push(PointedModel::new(m, "w").unwrap());
        }
        TraceModel::new(instants).unwrap()
    }

    fn atom_trace(p: &[bool], q: &[bool]) -> TraceModel {
        let n = p.len();
        let mut instants = Vec::new();
        for t in 0..n {
            let mut props = BTreeSet::new();
            if p[t] {
                props.insert("p".to_string());
            }
            if q[t] {
                props.insert("q".to_string());
            }
            let m = SCModel::new(
                vec!["w".into()],
                [],
                BTreeMap::from([("w".to_string(), props)]),
            )
            .unwrap();
            instants.push(PointedModel::new(m, "w").unwrap());
        }
        TraceModel::new(instants).unwrap()
    }

    #[test]
    fn until_and_since_are_strict() {
        // p: 0,1; q: 2 only.
        let tm = atom_trace(&[true, true, false], &[false, false, true]);
        let check = |text: &str, expected: [bool; 3]| {
            let f = parse_temporal(text).unwrap();
            assert_eq!(tm.truth_vector(&f).unwrap(), expected, "{text}");
        };
        check("p U q", [true, true, false]);
        check("q S p", [false, true, true]);
        // Strictness: truth now contributes nothing.
        check("F q", [true, true, false]);
        check("G p", [false, false, true]);
        check("P p", [false, true, true]);
        check("H p", [true, true, true]);
        check("H q", [true, false, false]);
        check("p W q", [true, true, true]);
        // The lone q at the end never sees a later p.
        check("F (q & F p)", [false, false, false]);
    }

    #[test]
    fn until_needs_the_gap_filled() {
        // p: 0 and 2, gap at 1; q at 3.
        let tm = atom_trace(
            &[true, false, true, false],
            &[false, false, false, true],
        );
        let f = parse_temporal("p U q").unwrap();
        // From 0 the gap at 1 blocks the path; from 1 and 2 it works.
        assert_eq!(tm.truth_vector(&f).unwrap(), vec![false, true, true, false]);
    }

    #[test]
    fn out_of_range_instants_error() {
        let tm = atom_trace(&[true], &[false]);
        let f = parse_temporal("p").unwrap();
        assert!(tm.eval(0, &f).unwrap());
        assert_eq!(
            tm.eval(1, &f),
            Err(TemporalEvalError::OutOfRange { t: 1, len: 1 })
        );
    }

    #[test]
    fn validator_matches_axiom_semantics_exhaustively() {
        // Every fact-vector triple on traces up to length 4: a condition is
        // violated at (t, G, X) exactly where the corresponding axiom
        // instance is false.
        let phi = parse_static("p").unwrap();
        let group = g(&["a"]);
        for n in 1..=4usize {
            for bits in 0..(1u32 << (3 * n)) {
                let pick = |k: usize| -> Vec<bool> {
                    (0..n).map(|t| bits >> (k * n + t) & 1 == 1).collect()
                };
                let (dabl, conf, disc) = (pick(0), pick(1), pick(2));
                let tm = vector_trace(&dabl, &conf, &disc);
                let report = validate_da_model(&tm).unwrap();
                for condition in [
                    TraceCondition::C1,
                    TraceCondition::C2,
                    TraceCondition::C3,
                ] {
                    let vec = axiom_check(&tm, condition.axiom(), &group, &phi).unwrap();
                    for t in 0..n {
                        let violated = report.violations.iter().any(|v| {
                            v.condition == condition && v.t == t && v.group == group
                        });
                        assert_eq!(
                            violated, !vec[t],
                            "{condition} at t={t} dabl={dabl:?} conf={conf:?} disc={disc:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn validator_reports_minimal_witnesses() {
        // dabl at 0,1 then gone at 2 with no disc: C1 at 0 and 1, C3 at 0
        // and 1 (never confirmed).
        let tm = vector_trace(
            &[true, true, false],
            &[false, false, false],
            &[false, false, false],
        );
        let report = validate_da_model(&tm).unwrap();
        let c1: Vec<_> = report
            .violations
            .iter()
            .filter(|v| v.condition == TraceCondition::C1)
            .collect();
        assert_eq!(c1.len(), 2);
        assert_eq!(c1[0].t, 0);
        assert!(c1[0].witness.contains("not at s=2"));
        // A one-world trace does not enumerate a universe's valuations, so
        // the objective stays a world set.
        assert_eq!(c1[0].objective_formula, None);
        assert_eq!(
            c1[0].render(),
            "C1 t=0 G={a} phi=[w] witness=deemed at t=0 but not at s=2 and never \
             disconfirmed in (0,2]"
        );
        let c3: Vec<_> = report
            .violations
            .iter()
            .filter(|v| v.condition == TraceCondition::C3)
            .collect();
        assert_eq!(c3.len(), 2);
        assert!(c3[0].witness.contains("since t=0"));
    }

    #[test]
    fn clean_lifecycle_passes_all_conditions() {
        // conf at 0 opens the ability, disc at 3 closes it.
        let tm = vector_trace(
            &[true, true, true, false, false],
            &[true, false, false, false, false],
            &[false, false, false, true, false],
        );
        let report = validate_da_model(&tm).unwrap();
        assert!(report.conditions_hold(), "{:?}", report.violations);
        assert!(report.is_valid());
        assert_eq!(check_interdependence(&tm).unwrap(), vec![]);
    }

    #[test]
    fn interdependence_flags_unconfirmed_ability() {
        let tm = vector_trace(&[true, true], &[false, false], &[false, false]);
        let out = check_interdependence(&tm).unwrap();
        assert_eq!(out.len(), 1);
        assert!(out[0].dabl_somewhere && !out[0].conf_somewhere);
    }

    #[test]
    fn heterogeneous_worlds_are_rejected() {
        let m1 = SCModel::new(vec!["w".into()], [], BTreeMap::new()).unwrap();
        let m2 = SCModel::new(vec!["v".into()], [], BTreeMap::new()).unwrap();
        let tm = TraceModel::new(vec![
            PointedModel::new(m1, "w").unwrap(),
            PointedModel::new(m2, "v").unwrap(),
        ])
        .unwrap();
        assert_eq!(
            validate_da_model(&tm),
            Err(TraceError::HeterogeneousWorlds { instant: 1 })
        );
    }

    #[test]
    fn trace_json_round_trips_with_refs() {
        let tm = vector_trace(&[true, true], &[true, false], &[false, false]);
        let text = tm.to_json();
        let back = TraceModel::from_json(&text).unwrap();
        assert_eq!(tm, back);

        // Identical instants serialize as refs.
        let tm = atom_trace(&[true, true], &[false, false]);
        let text = tm.to_json();
        assert!(text.contains("\"ref\": 0"));
        assert_eq!(TraceModel::from_json(&text).unwrap(), tm);

        let bad = r#"{"instants": 1, "models": [{"model": {"ref": 5}, "point": "w"}]}"#;
        assert_eq!(
            TraceModel::from_json(bad),
            Err(TraceError::BadReference {
                instant: 0,
                reference: 5
            })
        );
        let short = r#"{"instants": 2, "models": []}"#;
        assert_eq!(
            TraceModel::from_json(short),
            Err(TraceError::LengthMismatch {
                declared: 2,
                found: 0
            })
        );
    }

    #[test]
    fn aligned_universes_are_detected() {
        // Worlds enumerating the valuations of {p} in index order: world 0
        // makes p false, world 1 makes p true... valuation index 0 has p
        // true under the bit convention, so order matters.
        let u = Universe::new(vec!["p".into()]).unwrap();
        let mut worlds = Vec::new();
        let mut valuation = BTreeMap::new();
        for i in 0..u.valuation_count() {
            let name = format!("v{i}");
            valuation.insert(
                name.clone(),
                u.valuation_props(i).into_iter().collect::<BTreeSet<_>>(),
            );
            worlds.push(name);
        }
        let m = SCModel::new(worlds, [], valuation).unwrap();
        assert_eq!(aligned_universe(&m), Some(u));

        // Same worlds in the wrong order: world 0 must make everything
        // false.
        let skewed = SCModel::new(
            vec!["a".into(), "b".into()],
            [],
            BTreeMap::from([("a".to_string(), BTreeSet::from(["p".to_string()]))]),
        )
        .unwrap();
        assert_eq!(aligned_universe(&skewed), None);
        // World names are irrelevant; only index order matters.
        let renamed = SCModel::new(
            vec!["x".into(), "y".into()],
            [],
            BTreeMap::from([("y".to_string(), BTreeSet::from(["p".to_string()]))]),
        )
        .unwrap();
        assert!(aligned_universe(&renamed).is_some());
    }
}
