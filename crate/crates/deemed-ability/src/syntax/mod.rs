//! Formula syntax.
//!
//! Two layers share one vocabulary of agents and propositions:
//!
//! * static formulas: Boolean connectives plus the group modalities
//!   `Dabl` (deemed able), `Conf` (confirms), `Disc` (disconfirms),
//!   `E` (brings about), `Att` (attempts), and the binary `Task`/`Agree`
//!   forms;
//! * temporal formulas: strict until/since over *monolithic* static
//!   formulas, i.e. formulas whose root is not a Boolean connective.
//!
//! Disjunction and implication are definitional sugar over `!` and `&`, as
//! are the temporal operators `F G W H P`. Sugar at the temporal layer is
//! stored expanded; at the static layer `Or`/`Implies` stay as constructors
//! and the canonicalizer treats them by their definitions.

mod parser;
mod printer;

pub use parser::{parse_static, parse_temporal, ParseError};
pub use printer::{ast_static, ast_temporal, print_static, print_temporal};

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// Reserved name of the manager agent.
pub const MANAGER: &str = "mgr";

/// Reserved proposition pinned true at every world of every model. Used to
/// express the temporal `F`/`P` sugar without admitting `T` as a temporal
/// atom.
pub const TRUE_PROP: &str = "__true";

/// Returns whether `name` is a valid agent or proposition token.
pub fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid name {0:?}: expected a non-empty token over [a-zA-Z0-9_]")]
pub struct InvalidName(pub String);

/// An agent identifier.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct AgentId(String);

impl AgentId {
    pub fn new(name: impl Into<String>) -> Result<Self, InvalidName> {
        let name = name.into();
        if valid_name(&name) {
            Ok(AgentId(name))
        } else {
            Err(InvalidName(name))
        }
    }

    pub fn manager() -> Self {
        AgentId(MANAGER.to_string())
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn is_manager(&self) -> bool {
        self.0 == MANAGER
    }
}

impl TryFrom<String> for AgentId {
    type Error = InvalidName;
    fn try_from(s: String) -> Result<Self, InvalidName> {
        AgentId::new(s)
    }
}

impl From<AgentId> for String {
    fn from(a: AgentId) -> String {
        a.0
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AgentId({})", self.0)
    }
}

/// A finite set of agents. The empty group is legal.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Group(BTreeSet<AgentId>);

impl Group {
    pub fn new(agents: impl IntoIterator<Item = AgentId>) -> Self {
        Group(agents.into_iter().collect())
    }

    /// Builds a group from plain names, failing on the first invalid one.
    pub fn from_names<'a>(names: impl IntoIterator<Item = &'a str>) -> Result<Self, InvalidName> {
        names.into_iter().map(AgentId::new).collect()
    }

    pub fn empty() -> Self {
        Group::default()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, agent: &AgentId) -> bool {
        self.0.contains(agent)
    }

    pub fn is_subset(&self, other: &Group) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn union(&self, other: &Group) -> Group {
        Group(self.0.union(&other.0).cloned().collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = &AgentId> {
        self.0.iter()
    }
}

impl FromIterator<AgentId> for Group {
    fn from_iter<T: IntoIterator<Item = AgentId>>(iter: T) -> Self {
        Group(iter.into_iter().collect())
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Group{self}")
    }
}

/// A static formula.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StaticFormula {
    Prop(String),
    Top,
    Bottom,
    Not(Box<StaticFormula>),
    And(Box<StaticFormula>, Box<StaticFormula>),
    Or(Box<StaticFormula>, Box<StaticFormula>),
    Implies(Box<StaticFormula>, Box<StaticFormula>),
    Dabl(Group, Box<StaticFormula>),
    Conf(Group, Box<StaticFormula>),
    Disc(Group, Box<StaticFormula>),
    Brings(Group, Box<StaticFormula>),
    Attempts(Group, Box<StaticFormula>),
    Task(Group, Box<StaticFormula>, Box<StaticFormula>),
    Agree(Group, Box<StaticFormula>, Box<StaticFormula>),
}

impl StaticFormula {
    pub fn prop(name: impl Into<String>) -> Self {
        let name = name.into();
        debug_assert!(valid_name(&name), "invalid proposition name {name:?}");
        StaticFormula::Prop(name)
    }

    pub fn not(f: StaticFormula) -> Self {
        StaticFormula::Not(Box::new(f))
    }

    pub fn and(l: StaticFormula, r: StaticFormula) -> Self {
        StaticFormula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: StaticFormula, r: StaticFormula) -> Self {
        StaticFormula::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: StaticFormula, r: StaticFormula) -> Self {
        StaticFormula::Implies(Box::new(l), Box::new(r))
    }

    pub fn dabl(g: Group, f: StaticFormula) -> Self {
        StaticFormula::Dabl(g, Box::new(f))
    }

    pub fn conf(g: Group, f: StaticFormula) -> Self {
        StaticFormula::Conf(g, Box::new(f))
    }

    pub fn disc(g: Group, f: StaticFormula) -> Self {
        StaticFormula::Disc(g, Box::new(f))
    }

    pub fn brings(g: Group, f: StaticFormula) -> Self {
        StaticFormula::Brings(g, Box::new(f))
    }

    pub fn attempts(g: Group, f: StaticFormula) -> Self {
        StaticFormula::Attempts(g, Box::new(f))
    }

    pub fn task(g: Group, objective: StaticFormula, deadline: StaticFormula) -> Self {
        StaticFormula::Task(g, Box::new(objective), Box::new(deadline))
    }

    pub fn agree(g: Group, objective: StaticFormula, deadline: StaticFormula) -> Self {
        StaticFormula::Agree(g, Box::new(objective), Box::new(deadline))
    }

    /// All proposition names occurring anywhere, including under modalities.
    pub fn free_props(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_props(&mut out);
        out
    }

    fn collect_props(&self, out: &mut BTreeSet<String>) {
        use StaticFormula::*;
        match self {
            Prop(p) => {
                out.insert(p.clone());
            }
            Top | Bottom => {}
            Not(f) => f.collect_props(out),
            And(l, r) | Or(l, r) | Implies(l, r) => {
                l.collect_props(out);
                r.collect_props(out);
            }
            Dabl(_, f) | Conf(_, f) | Disc(_, f) | Brings(_, f) | Attempts(_, f) => {
                f.collect_props(out)
            }
            Task(_, a, b) | Agree(_, a, b) => {
                a.collect_props(out);
                b.collect_props(out);
            }
        }
    }

    /// All agents mentioned in any group, anywhere in the formula.
    pub fn mentioned_agents(&self) -> BTreeSet<AgentId> {
        let mut out = BTreeSet::new();
        self.collect_agents(&mut out);
        out
    }

    fn collect_agents(&self, out: &mut BTreeSet<AgentId>) {
        use StaticFormula::*;
        match self {
            Prop(_) | Top | Bottom => {}
            Not(f) => f.collect_agents(out),
            And(l, r) | Or(l, r) | Implies(l, r) => {
                l.collect_agents(out);
                r.collect_agents(out);
            }
            Dabl(g, f) | Conf(g, f) | Disc(g, f) | Brings(g, f) | Attempts(g, f) => {
                out.extend(g.iter().cloned());
                f.collect_agents(out);
            }
            Task(g, a, b) | Agree(g, a, b) => {
                out.extend(g.iter().cloned());
                a.collect_agents(out);
                b.collect_agents(out);
            }
        }
    }

    /// Whether the formula is purely propositional: no modality anywhere.
    pub fn is_propositional(&self) -> bool {
        use StaticFormula::*;
        match self {
            Prop(_) | Top | Bottom => true,
            Not(f) => f.is_propositional(),
            And(l, r) | Or(l, r) | Implies(l, r) => l.is_propositional() && r.is_propositional(),
            Dabl(..) | Conf(..) | Disc(..) | Brings(..) | Attempts(..) | Task(..) | Agree(..) => {
                false
            }
        }
    }
}

/// Root classification of a static formula: the temporal layer only admits
/// monolithic formulas as atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Monolithic,
    BooleanCombination,
}

/// Classifies by the top constructor alone. `Not`, `And` and the sugar
/// defined from them (`Or`, `Implies`, `Top`, `Bottom`) are Boolean
/// combinations; propositions and modality-rooted formulas are monolithic.
pub fn classify_monolithic(f: &StaticFormula) -> Classification {
    use StaticFormula::*;
    match f {
        Not(_) | And(..) | Or(..) | Implies(..) | Top | Bottom => {
            Classification::BooleanCombination
        }
        Prop(_) | Dabl(..) | Conf(..) | Disc(..) | Brings(..) | Attempts(..) | Task(..)
        | Agree(..) => Classification::Monolithic,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("formula {0:?} is a Boolean combination and cannot be a temporal atom")]
pub struct NotMonolithic(pub String);

/// A temporal formula.
///
/// `F G W H P` and the Boolean sugar are stored expanded, so these five
/// constructors are the whole language: equality is equality of the
/// expansion.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TemporalFormula {
    Mono(StaticFormula),
    Not(Box<TemporalFormula>),
    And(Box<TemporalFormula>, Box<TemporalFormula>),
    Until(Box<TemporalFormula>, Box<TemporalFormula>),
    Since(Box<TemporalFormula>, Box<TemporalFormula>),
}

impl TemporalFormula {
    /// Wraps a monolithic static formula as a temporal atom.
    pub fn mono(f: StaticFormula) -> Result<Self, NotMonolithic> {
        match classify_monolithic(&f) {
            Classification::Monolithic => Ok(TemporalFormula::Mono(f)),
            Classification::BooleanCombination => {
                Err(NotMonolithic(crate::syntax::printer::print_static(&f)))
            }
        }
    }

    /// The pinned-true atom, the one tautology admitted as a temporal atom.
    pub fn true_atom() -> Self {
        TemporalFormula::Mono(StaticFormula::prop(TRUE_PROP))
    }

    pub fn not(f: TemporalFormula) -> Self {
        TemporalFormula::Not(Box::new(f))
    }

    pub fn and(l: TemporalFormula, r: TemporalFormula) -> Self {
        TemporalFormula::And(Box::new(l), Box::new(r))
    }

    /// `l | r` expanded as `!(!l & !r)`.
    pub fn or(l: TemporalFormula, r: TemporalFormula) -> Self {
        TemporalFormula::not(TemporalFormula::and(
            TemporalFormula::not(l),
            TemporalFormula::not(r),
        ))
    }

    /// `l -> r` expanded as `!l | r`.
    pub fn implies(l: TemporalFormula, r: TemporalFormula) -> Self {
        TemporalFormula::or(TemporalFormula::not(l), r)
    }

    pub fn until(l: TemporalFormula, r: TemporalFormula) -> Self {
        TemporalFormula::Until(Box::new(l), Box::new(r))
    }

    pub fn since(l: TemporalFormula, r: TemporalFormula) -> Self {
        TemporalFormula::Since(Box::new(l), Box::new(r))
    }

    /// `F f`: somewhere strictly later.
    pub fn eventually(f: TemporalFormula) -> Self {
        TemporalFormula::until(TemporalFormula::true_atom(), f)
    }

    /// `G f`: everywhere strictly later.
    pub fn globally(f: TemporalFormula) -> Self {
        TemporalFormula::not(TemporalFormula::eventually(TemporalFormula::not(f)))
    }

    /// `l W r`: until without the obligation that `r` ever holds.
    pub fn weak_until(l: TemporalFormula, r: TemporalFormula) -> Self {
        TemporalFormula::or(
            TemporalFormula::until(l.clone(), r),
            TemporalFormula::globally(l),
        )
    }

    /// `P f`: somewhere strictly earlier.
    pub fn past(f: TemporalFormula) -> Self {
        TemporalFormula::since(TemporalFormula::true_atom(), f)
    }

    /// `H f`: everywhere strictly earlier.
    pub fn has_always(f: TemporalFormula) -> Self {
        TemporalFormula::not(TemporalFormula::past(TemporalFormula::not(f)))
    }

    /// Lifts a static formula by moving its Boolean structure to the
    /// temporal layer, leaving monolithic subformulas as atoms. Total:
    /// `Top` and `Bottom` become the pinned-true atom and its negation.
    pub fn lift(f: &StaticFormula) -> Self {
        use StaticFormula as S;
        match f {
            S::Not(x) => TemporalFormula::not(TemporalFormula::lift(x)),
            S::And(l, r) => {
                TemporalFormula::and(TemporalFormula::lift(l), TemporalFormula::lift(r))
            }
            S::Or(l, r) => TemporalFormula::or(TemporalFormula::lift(l), TemporalFormula::lift(r)),
            S::Implies(l, r) => {
                TemporalFormula::implies(TemporalFormula::lift(l), TemporalFormula::lift(r))
            }
            S::Top => TemporalFormula::true_atom(),
            S::Bottom => TemporalFormula::not(TemporalFormula::true_atom()),
            mono => TemporalFormula::Mono(mono.clone()),
        }
    }

    /// Proposition names over all atoms, including those introduced by
    /// sugar expansion.
    pub fn free_props(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk_monos(&mut |m| {
            out.extend(m.free_props());
        });
        out
    }

    /// Calls `f` on every `Mono` leaf.
    pub fn walk_monos(&self, f: &mut impl FnMut(&StaticFormula)) {
        match self {
            TemporalFormula::Mono(m) => f(m),
            TemporalFormula::Not(x) => x.walk_monos(f),
            TemporalFormula::And(l, r)
            | TemporalFormula::Until(l, r)
            | TemporalFormula::Since(l, r) => {
                l.walk_monos(f);
                r.walk_monos(f);
            }
        }
    }
}

impl fmt::Display for StaticFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&printer::print_static(self))
    }
}

impl fmt::Display for TemporalFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&printer::print_temporal(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(names: &[&str]) -> Group {
        Group::from_names(names.iter().copied()).unwrap()
    }

    #[test]
    fn classify_by_root_constructor() {
        let p = StaticFormula::prop("p");
        assert_eq!(classify_monolithic(&p), Classification::Monolithic);
        assert_eq!(
            classify_monolithic(&StaticFormula::dabl(g(&["a"]), p.clone())),
            Classification::Monolithic
        );
        assert_eq!(
            classify_monolithic(&StaticFormula::conf(
                g(&["a"]),
                StaticFormula::and(p.clone(), p.clone())
            )),
            Classification::Monolithic
        );
        for boolean in [
            StaticFormula::not(p.clone()),
            StaticFormula::and(p.clone(), p.clone()),
            StaticFormula::or(p.clone(), p.clone()),
            StaticFormula::implies(p.clone(), p.clone()),
            StaticFormula::Top,
            StaticFormula::Bottom,
        ] {
            assert_eq!(
                classify_monolithic(&boolean),
                Classification::BooleanCombination,
                "{boolean}"
            );
        }
    }

    #[test]
    fn free_props_reaches_under_modalities() {
        let f = StaticFormula::and(
            StaticFormula::prop("p"),
            StaticFormula::dabl(g(&["a"]), StaticFormula::prop("q")),
        );
        let props: Vec<_> = f.free_props().into_iter().collect();
        assert_eq!(props, vec!["p".to_string(), "q".to_string()]);
        assert!(StaticFormula::Bottom.free_props().is_empty());
    }

    #[test]
    fn mono_rejects_boolean_roots() {
        assert!(TemporalFormula::mono(StaticFormula::prop("p")).is_ok());
        assert!(TemporalFormula::mono(StaticFormula::Top).is_err());
        assert!(TemporalFormula::mono(StaticFormula::not(StaticFormula::prop("p"))).is_err());
    }

    #[test]
    fn sugar_expands_to_core_constructors() {
        let p = TemporalFormula::mono(StaticFormula::prop("p")).unwrap();
        let q = TemporalFormula::mono(StaticFormula::prop("q")).unwrap();
        assert_eq!(
            TemporalFormula::eventually(p.clone()),
            TemporalFormula::until(TemporalFormula::true_atom(), p.clone())
        );
        assert_eq!(
            TemporalFormula::weak_until(p.clone(), q.clone()),
            TemporalFormula::or(
                TemporalFormula::until(p.clone(), q),
                TemporalFormula::globally(p)
            )
        );
    }

    #[test]
    fn agent_names_are_validated() {
        assert!(AgentId::new("s2").is_ok());
        assert!(AgentId::new("").is_err());
        assert!(AgentId::new("a b").is_err());
        assert!(AgentId::manager().is_manager());
    }

    #[test]
    fn lift_moves_boolean_structure_to_the_temporal_layer() {
        let f = StaticFormula::implies(
            StaticFormula::prop("p"),
            StaticFormula::or(StaticFormula::Top, StaticFormula::prop("q")),
        );
        let lifted = TemporalFormula::lift(&f);
        let mut leaves = Vec::new();
        lifted.walk_monos(&mut |m| leaves.push(m.clone()));
        assert!(leaves
            .iter()
            .all(|m| classify_monolithic(m) == Classification::Monolithic));
    }
}
