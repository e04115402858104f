//! Deliberately naive reference evaluators.
//!
//! These recompute truth by direct recursion, with per-world set building
//! for the static layer and explicit quantifier expansion over instants
//! for the temporal layer, sharing no code with the production evaluators. The
//! test suites compare the two on random inputs; a disagreement means one
//! side is wrong.

use crate::static_model::{EvalError, SCModel, TableKind};
use crate::syntax::{Group, StaticFormula, TemporalFormula, TRUE_PROP};
use crate::temporal_model::{TemporalEvalError, TraceModel};
use std::collections::BTreeSet;

/// Truth of `f` at world `w`, by top-down recursion.
pub fn eval_static_naive(m: &SCModel, w: usize, f: &StaticFormula) -> Result<bool, EvalError> {
    use StaticFormula::*;
    Ok(match f {
        Prop(p) if p == TRUE_PROP => true,
        Prop(p) => m.valuation(w).contains(p),
        Top => true,
        Bottom => false,
        Not(x) => !eval_static_naive(m, w, x)?,
        And(l, r) => eval_static_naive(m, w, l)? && eval_static_naive(m, w, r)?,
        Or(l, r) => eval_static_naive(m, w, l)? || eval_static_naive(m, w, r)?,
        Implies(l, r) => !eval_static_naive(m, w, l)? || eval_static_naive(m, w, r)?,
        Dabl(g, x) => member_naive(m, TableKind::Dabl, w, g, x)?,
        Conf(g, x) => member_naive(m, TableKind::Conf, w, g, x)?,
        Disc(g, x) => member_naive(m, TableKind::Disc, w, g, x)?,
        Brings(g, x) => member_naive(m, TableKind::Brings, w, g, x)?,
        Attempts(g, x) => member_naive(m, TableKind::Attempts, w, g, x)?,
        Task(..) | Agree(..) => {
            // The naive path reuses the binary-table lookup through the
            // production extension only for these bookkeeping modalities.
            return m.eval_at(w, f);
        }
    })
}

fn member_naive(
    m: &SCModel,
    kind: TableKind,
    w: usize,
    g: &Group,
    arg: &StaticFormula,
) -> Result<bool, EvalError> {
    for a in g.iter() {
        if !m.agents().contains(a) {
            return Err(EvalError::UnknownAgent(a.name().to_string()));
        }
    }
    let mut worlds_of_arg = BTreeSet::new();
    for v in 0..m.world_count() {
        if eval_static_naive(m, v, arg)? {
            worlds_of_arg.insert(v);
        }
    }
    for member in m.neighborhood(kind, w, g) {
        let as_indices: BTreeSet<usize> = member.iter_ones().collect();
        if as_indices == worlds_of_arg {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Truth of `f` at instant `t`, by expanding the strict until/since
/// quantifiers literally.
pub fn eval_temporal_naive(
    tm: &TraceModel,
    t: usize,
    f: &TemporalFormula,
) -> Result<bool, TemporalEvalError> {
    let n = tm.len();
    if t >= n {
        return Err(TemporalEvalError::OutOfRange { t, len: n });
    }
    use TemporalFormula::*;
    Ok(match f {
        Mono(sf) => {
            let pm = tm.instant(t);
            eval_static_naive(&pm.model, pm.point, sf)?
        }
        Not(x) => !eval_temporal_naive(tm, t, x)?,
        And(l, r) => eval_temporal_naive(tm, t, l)? && eval_temporal_naive(tm, t, r)?,
        Until(l, r) => {
            let mut found = false;
            for s in t + 1..n {
                let mut ok = eval_temporal_naive(tm, s, r)?;
                for u in t + 1..s {
                    ok = ok && eval_temporal_naive(tm, u, l)?;
                }
                if ok {
                    found = true;
                    break;
                }
            }
            found
        }
        Since(l, r) => {
            let mut found = false;
            for s in 0..t {
                let mut ok = eval_temporal_naive(tm, s, r)?;
                for u in s + 1..t {
                    ok = ok && eval_temporal_naive(tm, u, l)?;
                }
                if ok {
                    found = true;
                    break;
                }
            }
            found
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::static_model::{GenParams, random_sc_model};
    use crate::syntax::{parse_static, parse_temporal};
    use crate::temporal_model::PointedModel;

    #[test]
    fn naive_static_agrees_on_a_generated_model() {
        let m = random_sc_model(11, &GenParams::default());
        for text in [
            "p",
            "!q",
            "p & q",
            "p | !q",
            "p -> q",
            "Dabl{a} p",
            "Conf{a,b} (p | q)",
            "Disc{b} !p",
            "E{a} p",
            "Att{b} (p & q)",
            "Dabl{a} p & !Disc{a} p",
            "Dabl{a} Conf{b} q",
        ] {
            let f = parse_static(text).unwrap();
            for w in 0..m.world_count() {
                assert_eq!(
                    eval_static_naive(&m, w, &f),
                    m.eval_at(w, &f),
                    "{text} at world {w}"
                );
            }
        }
    }

    #[test]
    fn naive_temporal_agrees_on_a_generated_trace() {
        let instants: Vec<PointedModel> = (0..4)
            .map(|i| {
                let m = random_sc_model(100 + i, &GenParams::default());
                PointedModel::new(m, "w0").unwrap()
            })
            .collect();
        let tm = TraceModel::new(instants).unwrap();
        for text in [
            "p U q",
            "q S p",
            "F Dabl{a} p",
            "G (p -> F q)",
            "(Dabl{a} p) W (Disc{a} p)",
            "H !q",
            "P Conf{b} q",
            "(p U q) S (q U p)",
        ] {
            let f = parse_temporal(text).unwrap();
            for t in 0..tm.len() {
                assert_eq!(
                    eval_temporal_naive(&tm, t, &f),
                    tm.eval(t, &f),
                    "{text} at instant {t}"
                );
            }
        }
    }
}
