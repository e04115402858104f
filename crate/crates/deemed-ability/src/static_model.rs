//! Finite neighborhood models for the static layer.
//!
//! A model carries, per world and group, three neighborhood sets over
//! worlds: `dabl` (objectives the group is deemed able to bring about),
//! `conf` (objectives whose ability is being confirmed here) and `disc`
//! (objectives whose ability is being disconfirmed here). Validity demands
//! `conf ⊆ dabl` and `disc ∩ dabl = ∅` pointwise. Optional tables ground
//! the evidence modalities: `E` (brings about, which validation holds to
//! consistency, factivity and aggregation), `Att` (attempts), and the
//! binary `Task`/`Agree` tables.
//!
//! A modal formula is true at a world when the extension of its argument
//! is a member of the corresponding neighborhood set.

use crate::bitset::BitSet;
use crate::syntax::{AgentId, Group, StaticFormula, TRUE_PROP};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("duplicate world id `{0}`")]
    DuplicateWorld(String),
    #[error("unknown world id `{0}`")]
    UnknownWorld(String),
    #[error("unknown agent `{0}`: not in the model's declared agent set")]
    UnknownAgent(String),
    #[error("model file is not valid JSON: {0}")]
    Json(String),
    #[error("{0}")]
    InvalidName(#[from] crate::syntax::InvalidName),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("unknown world id `{0}`")]
    UnknownWorld(String),
    #[error("formula mentions agent `{0}` outside the model's agent set")]
    UnknownAgent(String),
}

type Table = BTreeMap<(usize, Group), BTreeSet<BitSet>>;
type PairTable = BTreeMap<(usize, Group), BTreeSet<(BitSet, BitSet)>>;

/// Which unary neighborhood table a fact lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableKind {
    Dabl,
    Conf,
    Disc,
    Brings,
    Attempts,
}

/// A static neighborhood model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SCModel {
    worlds: Vec<String>,
    agents: BTreeSet<AgentId>,
    valuations: Vec<BTreeSet<String>>,
    dabl: Table,
    conf: Table,
    disc: Table,
    brings: Table,
    attempts: Table,
    tasks: PairTable,
    agrees: PairTable,
}

impl SCModel {
    /// Creates a model with empty neighborhoods. `valuation` maps world ids
    /// to the propositions true there; omitted worlds get the empty
    /// valuation.
    pub fn new(
        worlds: Vec<String>,
        agents: impl IntoIterator<Item = AgentId>,
        valuation: BTreeMap<String, BTreeSet<String>>,
    ) -> Result<Self, ModelError> {
        let mut seen = BTreeSet::new();
        for w in &worlds {
            if !seen.insert(w.clone()) {
                return Err(ModelError::DuplicateWorld(w.clone()));
            }
        }
        let mut valuations = vec![BTreeSet::new(); worlds.len()];
        for (w, props) in valuation {
            let i = worlds
                .iter()
                .position(|x| *x == w)
                .ok_or(ModelError::UnknownWorld(w))?;
            valuations[i] = props;
        }
        Ok(SCModel {
            worlds,
            agents: agents.into_iter().collect(),
            valuations,
            dabl: Table::new(),
            conf: Table::new(),
            disc: Table::new(),
            brings: Table::new(),
            attempts: Table::new(),
            tasks: PairTable::new(),
            agrees: PairTable::new(),
        })
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn world_count(&self) -> usize {
        self.worlds.len()
    }

    pub fn agents(&self) -> &BTreeSet<AgentId> {
        &self.agents
    }

    pub fn world_index(&self, name: &str) -> Option<usize> {
        self.worlds.iter().position(|w| w == name)
    }

    pub fn valuation(&self, world: usize) -> &BTreeSet<String> {
        &self.valuations[world]
    }

    /// Builds the world set containing the named worlds.
    pub fn world_set<'a>(
        &self,
        names: impl IntoIterator<Item = &'a str>,
    ) -> Result<BitSet, ModelError> {
        let mut s = BitSet::empty(self.worlds.len());
        for n in names {
            match self.world_index(n) {
                Some(i) => s.insert(i),
                None => return Err(ModelError::UnknownWorld(n.to_string())),
            }
        }
        Ok(s)
    }

    fn check_group(&self, g: &Group) -> Result<(), ModelError> {
        for a in g.iter() {
            if !self.agents.contains(a) {
                return Err(ModelError::UnknownAgent(a.name().to_string()));
            }
        }
        Ok(())
    }

    /// Inserts a world set into one of the unary neighborhood tables.
    pub fn add(
        &mut self,
        kind: TableKind,
        world: &str,
        g: Group,
        set: BitSet,
    ) -> Result<(), ModelError> {
        self.check_group(&g)?;
        let w = self
            .world_index(world)
            .ok_or_else(|| ModelError::UnknownWorld(world.to_string()))?;
        self.table_mut(kind).entry((w, g)).or_default().insert(set);
        Ok(())
    }

    pub fn add_task(
        &mut self,
        world: &str,
        g: Group,
        objective: BitSet,
        deadline: BitSet,
    ) -> Result<(), ModelError> {
        self.check_group(&g)?;
        let w = self
            .world_index(world)
            .ok_or_else(|| ModelError::UnknownWorld(world.to_string()))?;
        self.tasks
            .entry((w, g))
            .or_default()
            .insert((objective, deadline));
        Ok(())
    }

    pub fn add_agree(
        &mut self,
        world: &str,
        g: Group,
        objective: BitSet,
        deadline: BitSet,
    ) -> Result<(), ModelError> {
        self.check_group(&g)?;
        let w = self
            .world_index(world)
            .ok_or_else(|| ModelError::UnknownWorld(world.to_string()))?;
        self.agrees
            .entry((w, g))
            .or_default()
            .insert((objective, deadline));
        Ok(())
    }

    fn table(&self, kind: TableKind) -> &Table {
        match kind {
            TableKind::Dabl => &self.dabl,
            TableKind::Conf => &self.conf,
            TableKind::Disc => &self.disc,
            TableKind::Brings => &self.brings,
            TableKind::Attempts => &self.attempts,
        }
    }

    fn table_mut(&mut self, kind: TableKind) -> &mut Table {
        match kind {
            TableKind::Dabl => &mut self.dabl,
            TableKind::Conf => &mut self.conf,
            TableKind::Disc => &mut self.disc,
            TableKind::Brings => &mut self.brings,
            TableKind::Attempts => &mut self.attempts,
        }
    }

    /// The neighborhood at `(world, group)`; absent keys mean empty.
    pub fn neighborhood(
        &self,
        kind: TableKind,
        world: usize,
        g: &Group,
    ) -> impl Iterator<Item = &BitSet> {
        self.table(kind)
            .get(&(world, g.clone()))
            .into_iter()
            .flatten()
    }

    pub fn has_member(&self, kind: TableKind, world: usize, g: &Group, set: &BitSet) -> bool {
        self.table(kind)
            .get(&(world, g.clone()))
            .is_some_and(|s| s.contains(set))
    }

    /// Groups keyed anywhere in the dabl/conf/disc tables.
    pub fn fact_groups(&self) -> BTreeSet<Group> {
        [&self.dabl, &self.conf, &self.disc]
            .into_iter()
            .flat_map(|t| t.keys().map(|(_, g)| g.clone()))
            .collect()
    }

    /// World sets appearing anywhere in the dabl/conf/disc tables.
    pub fn fact_sets(&self) -> BTreeSet<BitSet> {
        [&self.dabl, &self.conf, &self.disc]
            .into_iter()
            .flat_map(|t| t.values().flatten().cloned())
            .collect()
    }

    /// The set of worlds where `f` holds, computed bottom-up.
    pub fn extension(&self, f: &StaticFormula) -> Result<BitSet, EvalError> {
        use StaticFormula::*;
        let n = self.worlds.len();
        Ok(match f {
            Prop(p) if p == TRUE_PROP => BitSet::full(n),
            Prop(p) => {
                BitSet::from_indices(n, (0..n).filter(|w| self.valuations[*w].contains(p)))
            }
            Top => BitSet::full(n),
            Bottom => BitSet::empty(n),
            Not(x) => self.extension(x)?.complement(),
            And(l, r) => self.extension(l)?.intersection(&self.extension(r)?),
            Or(l, r) => self.extension(l)?.union(&self.extension(r)?),
            Implies(l, r) => self.extension(l)?.complement().union(&self.extension(r)?),
            Dabl(g, x) => self.modal_extension(TableKind::Dabl, g, x)?,
            Conf(g, x) => self.modal_extension(TableKind::Conf, g, x)?,
            Disc(g, x) => self.modal_extension(TableKind::Disc, g, x)?,
            Brings(g, x) => self.modal_extension(TableKind::Brings, g, x)?,
            Attempts(g, x) => self.modal_extension(TableKind::Attempts, g, x)?,
            Task(g, a, b) => self.pair_extension(&self.tasks, g, a, b)?,
            Agree(g, a, b) => self.pair_extension(&self.agrees, g, a, b)?,
        })
    }

    fn modal_extension(
        &self,
        kind: TableKind,
        g: &Group,
        arg: &StaticFormula,
    ) -> Result<BitSet, EvalError> {
        self.check_group_eval(g)?;
        let ext = self.extension(arg)?;
        let n = self.worlds.len();
        Ok(BitSet::from_indices(
            n,
            (0..n).filter(|w| self.has_member(kind, *w, g, &ext)),
        ))
    }

    fn pair_extension(
        &self,
        table: &PairTable,
        g: &Group,
        a: &StaticFormula,
        b: &StaticFormula,
    ) -> Result<BitSet, EvalError> {
        self.check_group_eval(g)?;
        let pair = (self.extension(a)?, self.extension(b)?);
        let n = self.worlds.len();
        Ok(BitSet::from_indices(
            n,
            (0..n).filter(|w| {
                table
                    .get(&(*w, g.clone()))
                    .is_some_and(|s| s.contains(&pair))
            }),
        ))
    }

    fn check_group_eval(&self, g: &Group) -> Result<(), EvalError> {
        for a in g.iter() {
            if !self.agents.contains(a) {
                return Err(EvalError::UnknownAgent(a.name().to_string()));
            }
        }
        Ok(())
    }

    /// Truth at a world named by id.
    pub fn eval_static(&self, world: &str, f: &StaticFormula) -> Result<bool, EvalError> {
        let w = self
            .world_index(world)
            .ok_or_else(|| EvalError::UnknownWorld(world.to_string()))?;
        self.eval_at(w, f)
    }

    /// Truth at a world given by index.
    pub fn eval_at(&self, world: usize, f: &StaticFormula) -> Result<bool, EvalError> {
        Ok(self.extension(f)?.contains(world))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ModelFile::from(self)).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let file: ModelFile =
            serde_json::from_str(text).map_err(|e| ModelError::Json(e.to_string()))?;
        file.try_into()
    }
}

/// A violation found by [`validate_sc_model`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelViolation {
    /// A confirmed objective that is not deemed.
    ConfNotDabl {
        world: String,
        group: Group,
        set: Vec<String>,
    },
    /// A disconfirmed objective that is still deemed.
    DiscOverlapsDabl {
        world: String,
        group: Group,
        set: Vec<String>,
    },
    /// The full world set in an `E` neighborhood: nobody brings about a
    /// tautology.
    BringsTautology { world: String, group: Group },
    /// An `E` member not containing its own world: bringing about is
    /// factive.
    BringsNotFactive {
        world: String,
        group: Group,
        set: Vec<String>,
    },
    /// Two `E` members whose intersection is missing: simultaneous doings
    /// aggregate.
    BringsNotClosed {
        world: String,
        group: Group,
        set_a: Vec<String>,
        set_b: Vec<String>,
    },
}

impl ModelViolation {
    /// One-line rendering, e.g.
    /// `constraint-1 world=w0 G={a} X=[w0]: confirmed objective is not deemed`.
    pub fn render(&self) -> String {
        let list = |s: &[String]| format!("[{}]", s.join(","));
        match self {
            ModelViolation::ConfNotDabl { world, group, set } => format!(
                "constraint-1 world={world} G={group} X={}: confirmed objective is not deemed",
                list(set)
            ),
            ModelViolation::DiscOverlapsDabl { world, group, set } => format!(
                "constraint-2 world={world} G={group} X={}: disconfirmed objective is still deemed",
                list(set)
            ),
            ModelViolation::BringsTautology { world, group } => format!(
                "b1 world={world} G={group}: the full world set appears in the E table"
            ),
            ModelViolation::BringsNotFactive { world, group, set } => format!(
                "b2 world={world} G={group} X={}: an E member does not contain its own world",
                list(set)
            ),
            ModelViolation::BringsNotClosed {
                world,
                group,
                set_a,
                set_b,
            } => format!(
                "b3 world={world} G={group} X={} Y={}: the intersection of two E members is missing",
                list(set_a),
                list(set_b)
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<ModelViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the two neighborhood constraints, and the `E`-table laws when an
/// `E` table is present.
pub fn validate_sc_model(m: &SCModel) -> ValidationReport {
    let names = |s: &BitSet| -> Vec<String> {
        s.iter_ones().map(|i| m.worlds[i].clone()).collect()
    };
    let mut violations = Vec::new();
    for ((w, g), sets) in &m.conf {
        for x in sets {
            if !m.has_member(TableKind::Dabl, *w, g, x) {
                violations.push(ModelViolation::ConfNotDabl {
                    world: m.worlds[*w].clone(),
                    group: g.clone(),
                    set: names(x),
                });
            }
        }
    }
    for ((w, g), sets) in &m.disc {
        for x in sets {
            if m.has_member(TableKind::Dabl, *w, g, x) {
                violations.push(ModelViolation::DiscOverlapsDabl {
                    world: m.worlds[*w].clone(),
                    group: g.clone(),
                    set: names(x),
                });
            }
        }
    }
    for ((w, g), sets) in &m.brings {
        for x in sets {
            if x.is_full() {
                violations.push(ModelViolation::BringsTautology {
                    world: m.worlds[*w].clone(),
                    group: g.clone(),
                });
            }
            if !x.contains(*w) {
                violations.push(ModelViolation::BringsNotFactive {
                    world: m.worlds[*w].clone(),
                    group: g.clone(),
                    set: names(x),
                });
            }
        }
        for x in sets {
            for y in sets {
                if x < y && x.contains(*w) && y.contains(*w) {
                    let meet = x.intersection(y);
                    if !sets.contains(&meet) {
                        violations.push(ModelViolation::BringsNotClosed {
                            world: m.worlds[*w].clone(),
                            group: g.clone(),
                            set_a: names(x),
                            set_b: names(y),
                        });
                    }
                }
            }
        }
    }
    ValidationReport { violations }
}

/// Parameters for [`random_sc_model`].
#[derive(Debug, Clone, Copy)]
pub struct GenParams {
    /// 1..=5 worlds.
    pub worlds: usize,
    /// 0..=3 agents.
    pub agents: usize,
    /// 0..=3 propositions.
    pub props: usize,
    /// Probability that a candidate set lands in a neighborhood.
    pub density: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            worlds: 4,
            agents: 2,
            props: 2,
            density: 0.3,
        }
    }
}

/// Generates a model that is valid by construction: confirmations are
/// sampled from inside the deemed sets, disconfirmations from outside, and
/// `E` neighborhoods are factive, tautology-free and closed under
/// intersection. Deterministic in the seed.
pub fn random_sc_model(seed: u64, params: &GenParams) -> SCModel {
    assert!(
        (1..=5).contains(&params.worlds)
            && params.agents <= 3
            && params.props <= 3
            && (0.0..=1.0).contains(&params.density),
        "generation parameters out of range: {params:?}"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let worlds: Vec<String> = (0..params.worlds).map(|i| format!("w{i}")).collect();
    let agent_names = ["a", "b", "c"];
    let prop_names = ["p", "q", "r"];
    let agents: Vec<AgentId> = agent_names[..params.agents]
        .iter()
        .map(|a| AgentId::new(*a).unwrap())
        .collect();

    let mut valuation = BTreeMap::new();
    for w in &worlds {
        let props: BTreeSet<String> = prop_names[..params.props]
            .iter()
            .filter(|_| rng.random_bool(0.5))
            .map(|p| p.to_string())
            .collect();
        valuation.insert(w.clone(), props);
    }
    let mut m = SCModel::new(worlds.clone(), agents.clone(), valuation).unwrap();

    let n = params.worlds;
    let all_groups: Vec<Group> = subsets(&agents).into_iter().map(Group::new).collect();
    let all_sets: Vec<BitSet> = (0..(1usize << n))
        .map(|mask| BitSet::from_indices(n, (0..n).filter(|i| mask >> i & 1 == 1)))
        .collect();

    for w in 0..n {
        for g in &all_groups {
            let mut dabl: Vec<BitSet> = Vec::new();
            for x in &all_sets {
                if rng.random_bool(params.density) {
                    dabl.push(x.clone());
                }
            }
            for x in &dabl {
                m.add(TableKind::Dabl, &worlds[w], g.clone(), x.clone())
                    .unwrap();
                if rng.random_bool(params.density) {
                    m.add(TableKind::Conf, &worlds[w], g.clone(), x.clone())
                        .unwrap();
                }
            }
            for x in &all_sets {
                if !dabl.contains(x) && rng.random_bool(params.density) {
                    m.add(TableKind::Disc, &worlds[w], g.clone(), x.clone())
                        .unwrap();
                }
            }
            let mut brings: BTreeSet<BitSet> = all_sets
                .iter()
                .filter(|x| x.contains(w) && !x.is_full())
                .filter(|_| rng.random_bool(params.density))
                .cloned()
                .collect();
            close_under_intersection(&mut brings);
            for x in brings {
                m.add(TableKind::Brings, &worlds[w], g.clone(), x).unwrap();
            }
            for x in &all_sets {
                if rng.random_bool(params.density) {
                    m.add(TableKind::Attempts, &worlds[w], g.clone(), x.clone())
                        .unwrap();
                }
            }
        }
    }
    m
}

/// All subsets, empty set included.
pub fn subsets<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for item in items {
        let mut extended: Vec<Vec<T>> = out
            .iter()
            .map(|s| {
                let mut s = s.clone();
                s.push(item.clone());
                s
            })
            .collect();
        out.append(&mut extended);
    }
    out
}

fn close_under_intersection(sets: &mut BTreeSet<BitSet>) {
    loop {
        let mut fresh = Vec::new();
        for x in sets.iter() {
            for y in sets.iter() {
                let meet = x.intersection(y);
                if !sets.contains(&meet) {
                    fresh.push(meet);
                }
            }
        }
        if fresh.is_empty() {
            return;
        }
        sets.extend(fresh);
    }
}

// ---- JSON file shape ----

#[derive(Serialize, Deserialize)]
pub(crate) struct ModelFile {
    worlds: Vec<String>,
    agents: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    valuation: BTreeMap<String, BTreeSet<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    dabl: Vec<TableEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    conf: Vec<TableEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    disc: Vec<TableEntry>,
    #[serde(default, rename = "E", skip_serializing_if = "Vec::is_empty")]
    brings: Vec<TableEntry>,
    #[serde(default, rename = "Att", skip_serializing_if = "Vec::is_empty")]
    attempts: Vec<TableEntry>,
    #[serde(default, rename = "Task", skip_serializing_if = "Vec::is_empty")]
    tasks: Vec<PairEntry>,
    #[serde(default, rename = "Agree", skip_serializing_if = "Vec::is_empty")]
    agrees: Vec<PairEntry>,
}

#[derive(Serialize, Deserialize)]
struct TableEntry {
    w: String,
    #[serde(rename = "G")]
    g: Vec<String>,
    sets: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct PairEntry {
    w: String,
    #[serde(rename = "G")]
    g: Vec<String>,
    pairs: Vec<(Vec<String>, Vec<String>)>,
}

impl From<&SCModel> for ModelFile {
    fn from(m: &SCModel) -> Self {
        let names = |s: &BitSet| -> Vec<String> {
            s.iter_ones().map(|i| m.worlds[i].clone()).collect()
        };
        let dump = |t: &Table| -> Vec<TableEntry> {
            t.iter()
                .filter(|(_, sets)| !sets.is_empty())
                .map(|((w, g), sets)| TableEntry {
                    w: m.worlds[*w].clone(),
                    g: g.iter().map(|a| a.name().to_string()).collect(),
                    sets: sets.iter().map(names).collect(),
                })
                .collect()
        };
        let dump_pairs = |t: &PairTable| -> Vec<PairEntry> {
            t.iter()
                .filter(|(_, sets)| !sets.is_empty())
                .map(|((w, g), pairs)| PairEntry {
                    w: m.worlds[*w].clone(),
                    g: g.iter().map(|a| a.name().to_string()).collect(),
                    pairs: pairs.iter().map(|(a, b)| (names(a), names(b))).collect(),
                })
                .collect()
        };
        ModelFile {
            worlds: m.worlds.clone(),
            agents: m.agents.iter().map(|a| a.name().to_string()).collect(),
            valuation: m
                .worlds
                .iter()
                .zip(&m.valuations)
                .filter(|(_, v)| !v.is_empty())
                .map(|(w, v)| (w.clone(), v.clone()))
                .collect(),
            dabl: dump(&m.dabl),
            conf: dump(&m.conf),
            disc: dump(&m.disc),
            brings: dump(&m.brings),
            attempts: dump(&m.attempts),
            tasks: dump_pairs(&m.tasks),
            agrees: dump_pairs(&m.agrees),
        }
    }
}

impl TryFrom<ModelFile> for SCModel {
    type Error = ModelError;

    fn try_from(file: ModelFile) -> Result<SCModel, ModelError> {
        let agents: Vec<AgentId> = file
            .agents
            .iter()
            .map(|a| AgentId::new(a.clone()))
            .collect::<Result<_, _>>()?;
        let mut m = SCModel::new(file.worlds, agents, file.valuation)?;
        let load = |m: &mut SCModel, kind: TableKind, entries: &[TableEntry]| -> Result<(), ModelError> {
            for e in entries {
                let g = Group::from_names(e.g.iter().map(|s| s.as_str()))?;
                for set in &e.sets {
                    let ws = m.world_set(set.iter().map(|s| s.as_str()))?;
                    m.add(kind, &e.w, g.clone(), ws)?;
                }
            }
            Ok(())
        };
        load(&mut m, TableKind::Dabl, &file.dabl)?;
        load(&mut m, TableKind::Conf, &file.conf)?;
        load(&mut m, TableKind::Disc, &file.disc)?;
        load(&mut m, TableKind::Brings, &file.brings)?;
        load(&mut m, TableKind::Attempts, &file.attempts)?;
        for (entries, which) in [(&file.tasks, true), (&file.agrees, false)] {
            for e in entries {
                let g = Group::from_names(e.g.iter().map(|s| s.as_str()))?;
                for (a, b) in &e.pairs {
                    let oa = m.world_set(a.iter().map(|s| s.as_str()))?;
                    let ob = m.world_set(b.iter().map(|s| s.as_str()))?;
                    if which {
                        m.add_task(&e.w, g.clone(), oa, ob)?;
                    } else {
                        m.add_agree(&e.w, g.clone(), oa, ob)?;
                    }
                }
            }
        }
        Ok(m)
    }
}
