//! Canonical keys for propositional objectives.
//!
//! Within a fixed [`Universe`] of propositions, a propositional formula is
//! keyed by its full truth table. Two formulas get the same key exactly
//! when they are classically equivalent, which is what lets confirmations,
//! disconfirmations and attempts match objectives up to logical identity
//! rather than up to spelling.
//!
//! Valuations are numbered `0..2^n` in lexicographic order over the sorted
//! proposition list, false before true: valuation `i` makes proposition
//! `j` true iff bit `n-1-j` of `i` is set. Bit `i` of a key is the truth
//! value of the formula under valuation `i`.

use crate::bitset::BitSet;
use crate::syntax::{StaticFormula, TRUE_PROP};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// Hard cap on universe size; keys have `2^n` bits.
pub const MAX_PROPS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CanonicalError {
    #[error("formula `{0}` is not propositional: modalities have no truth table")]
    NotPropositional(String),
    #[error("proposition `{0}` is not in the universe")]
    OutOfUniverse(String),
    #[error("universe has {0} propositions, the cap is {MAX_PROPS}")]
    TooManyProps(usize),
    #[error("invalid proposition name {0:?}")]
    InvalidProp(String),
    #[error("`{TRUE_PROP}` is reserved and cannot be declared in a universe")]
    ReservedProp,
}

/// An ordered universe of proposition names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Universe {
    props: Vec<String>,
}

impl Universe {
    /// Sorts and deduplicates. The reserved pinned-true proposition may not
    /// be declared: it is implicitly true under every valuation.
    pub fn new(props: impl IntoIterator<Item = String>) -> Result<Self, CanonicalError> {
        let mut props: Vec<String> = props.into_iter().collect();
        props.sort();
        props.dedup();
        for p in &props {
            if p == TRUE_PROP {
                return Err(CanonicalError::ReservedProp);
            }
            if !crate::syntax::valid_name(p) {
                return Err(CanonicalError::InvalidProp(p.clone()));
            }
        }
        if props.len() > MAX_PROPS {
            return Err(CanonicalError::TooManyProps(props.len()));
        }
        Ok(Universe { props })
    }

    pub fn props(&self) -> &[String] {
        &self.props
    }

    pub fn len(&self) -> usize {
        self.props.len()
    }

    pub fn is_empty(&self) -> bool {
        self.props.is_empty()
    }

    pub fn valuation_count(&self) -> usize {
        1 << self.props.len()
    }

    pub fn index_of(&self, prop: &str) -> Option<usize> {
        self.props.binary_search_by(|p| p.as_str().cmp(prop)).ok()
    }

    /// Truth of proposition number `prop` under valuation number `i`.
    pub fn prop_holds(&self, i: usize, prop: usize) -> bool {
        i >> (self.props.len() - 1 - prop) & 1 == 1
    }

    /// The set of propositions true under valuation number `i`.
    pub fn valuation_props(&self, i: usize) -> BTreeSet<String> {
        (0..self.props.len())
            .filter(|j| self.prop_holds(i, *j))
            .map(|j| self.props[j].clone())
            .collect()
    }

    /// The valuation number under which exactly `true_props ∩ universe`
    /// holds.
    pub fn valuation_index(&self, true_props: &BTreeSet<String>) -> usize {
        let mut i = 0;
        for (j, p) in self.props.iter().enumerate() {
            if true_props.contains(p) {
                i |= 1 << (self.props.len() - 1 - j);
            }
        }
        i
    }
}

impl TryFrom<Vec<String>> for Universe {
    type Error = CanonicalError;
    fn try_from(props: Vec<String>) -> Result<Self, CanonicalError> {
        Universe::new(props)
    }
}

impl From<Universe> for Vec<String> {
    fn from(u: Universe) -> Vec<String> {
        u.props
    }
}

/// The truth table of a propositional formula over a universe.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey(BitSet);

impl CanonicalKey {
    pub fn bits(&self) -> &BitSet {
        &self.0
    }

    pub fn from_bits(bits: BitSet) -> Self {
        CanonicalKey(bits)
    }

    pub fn is_tautology(&self) -> bool {
        self.0.is_full()
    }

    pub fn is_contradiction(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_hex(&self) -> String {
        self.0.to_hex()
    }

    /// Key of the pointwise conjunction.
    pub fn and(&self, other: &CanonicalKey) -> CanonicalKey {
        CanonicalKey(self.0.intersection(&other.0))
    }

    /// Whether the formula holds under valuation number `i`.
    pub fn holds_at(&self, i: usize) -> bool {
        self.0.contains(i)
    }
}

impl fmt::Debug for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalKey({})", self.to_hex())
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Computes the truth-table key of a propositional formula.
pub fn canonical_key(f: &StaticFormula, u: &Universe) -> Result<CanonicalKey, CanonicalError> {
    Ok(CanonicalKey(key_bits(f, u)?))
}

fn key_bits(f: &StaticFormula, u: &Universe) -> Result<BitSet, CanonicalError> {
    use StaticFormula::*;
    let n = u.valuation_count();
    Ok(match f {
        Prop(p) if p == TRUE_PROP => BitSet::full(n),
        Prop(p) => match u.index_of(p) {
            Some(j) => BitSet::from_indices(n, (0..n).filter(|i| u.prop_holds(*i, j))),
            None => return Err(CanonicalError::OutOfUniverse(p.clone())),
        },
        Top => BitSet::full(n),
        Bottom => BitSet::empty(n),
        Not(x) => key_bits(x, u)?.complement(),
        And(l, r) => key_bits(l, u)?.intersection(&key_bits(r, u)?),
        Or(l, r) => key_bits(l, u)?.union(&key_bits(r, u)?),
        Implies(l, r) => key_bits(l, u)?.complement().union(&key_bits(r, u)?),
        _ => return Err(CanonicalError::NotPropositional(f.to_string())),
    })
}

/// Classical equivalence over the universe: equality of keys.
pub fn equivalent(
    f: &StaticFormula,
    g: &StaticFormula,
    u: &Universe,
) -> Result<bool, CanonicalError> {
    Ok(canonical_key(f, u)? == canonical_key(g, u)?)
}

/// Truth of a propositional formula under a single valuation, given as the
/// set of true propositions. The pinned-true proposition holds regardless.
pub fn eval_under_valuation(
    f: &StaticFormula,
    true_props: &BTreeSet<String>,
) -> Result<bool, CanonicalError> {
    use StaticFormula::*;
    Ok(match f {
        Prop(p) => p == TRUE_PROP || true_props.contains(p),
        Top => true,
        Bottom => false,
        Not(x) => !eval_under_valuation(x, true_props)?,
        And(l, r) => eval_under_valuation(l, true_props)? && eval_under_valuation(r, true_props)?,
        Or(l, r) => eval_under_valuation(l, true_props)? || eval_under_valuation(r, true_props)?,
        Implies(l, r) => {
            !eval_under_valuation(l, true_props)? || eval_under_valuation(r, true_props)?
        }
        _ => return Err(CanonicalError::NotPropositional(f.to_string())),
    })
}

/// Reconstructs a formula from a key as a disjunction of minterms. The
/// result's key is the input key; it is a readable stand-in for "whichever
/// objective has this truth table".
pub fn key_to_formula(key: &CanonicalKey, u: &Universe) -> StaticFormula {
    if key.is_contradiction() {
        return StaticFormula::Bottom;
    }
    if key.is_tautology() {
        return StaticFormula::Top;
    }
    let mut terms: Vec<StaticFormula> = Vec::new();
    for i in key.0.iter_ones() {
        let mut lits = (0..u.len()).map(|j| {
            let p = StaticFormula::prop(u.props()[j].clone());
            if u.prop_holds(i, j) {
                p
            } else {
                StaticFormula::not(p)
            }
        });
        let first = lits.next().expect("nonempty universe: key not constant");
        terms.push(lits.fold(first, StaticFormula::and));
    }
    let mut it = terms.into_iter();
    let first = it.next().expect("nonempty key");
    it.fold(first, StaticFormula::or)
}
