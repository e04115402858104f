//! Randomized soundness suites and scripted scenario replays.
//!
//! The suites draw models, traces and event logs from seeded generators,
//! instantiate the axiom schemata over them, and collect counterexamples
//! instead of panicking: a run is a pure function of its seed, and two runs
//! with the same seed produce byte-identical reports. Failing cases are
//! shrunk (events first, then the horizon) before they are reported.
//!
//! The replays drive the derivation engine over two bundled event logs and
//! compare the rendered transcripts line by line against frozen goldens.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::canonical::{canonical_key, CanonicalKey, Universe};
use crate::engine::{
    self, DerivationError, DerivedTrace, Event, EventKind, EventLog, FactKey, Flags, LogError,
};
use crate::static_model::{random_sc_model, subsets, validate_sc_model, GenParams, SCModel};
use crate::syntax::{parse_static, AgentId, Group, StaticFormula, TemporalFormula};
use crate::temporal_model::{
    axiom_check, axiom_instance, check_interdependence, validate_da_model, DAAxiom, PointedModel,
    TraceModel,
};

/// Seed used when the caller does not pick one.
pub const DEFAULT_SEED: u64 = 42;

// ---- Reports ----

/// One failed assertion, with everything needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    /// Index of the generated case within the suite run.
    pub case: usize,
    /// Seed that regenerates this case's inputs deterministically.
    pub seed: u64,
    /// The violated property, e.g. `sc1` or `ltl5`.
    pub property: String,
    /// The failing instantiation, rendered as a formula.
    pub instantiation: String,
    /// First failing instant, for temporal properties.
    pub failing_instant: Option<usize>,
    /// The offending (shrunk) model, trace or log, plus a witness.
    pub detail: String,
}

/// Outcome of one suite run. Identical seeds give identical reports,
/// byte for byte.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub cases: usize,
    /// Number of individual assertions evaluated.
    pub checks: u64,
    pub counterexamples: Vec<Counterexample>,
    pub notes: Vec<String>,
}

impl SuiteReport {
    fn new(suite: &str, seed: u64, cases: usize) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            seed,
            cases,
            checks: 0,
            counterexamples: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }

    /// Stable plain-text form of the report.
    pub fn render(&self) -> String {
        let mut out = format!(
            "suite {} seed={} cases={} checks={}\n",
            self.suite, self.seed, self.cases, self.checks
        );
        for note in &self.notes {
            out.push_str(&format!("note {note}\n"));
        }
        for c in &self.counterexamples {
            let at = c
                .failing_instant
                .map(|t| format!(" t={t}"))
                .unwrap_or_default();
            out.push_str(&format!(
                "counterexample case={} seed={} property={}{}: {}\n",
                c.case, c.seed, c.property, at, c.instantiation
            ));
            for line in c.detail.lines() {
                out.push_str(&format!("  {line}\n"));
            }
        }
        out.push_str(if self.passed() {
            "verdict pass\n"
        } else {
            "verdict fail\n"
        });
        out
    }

    /// Counts one assertion; records a counterexample when it failed.
    fn check(
        &mut self,
        case: usize,
        seed: u64,
        ok: bool,
        property: &str,
        instantiation: impl FnOnce() -> String,
        failing_instant: Option<usize>,
        detail: impl FnOnce() -> String,
    ) {
        self.checks += 1;
        if !ok {
            self.counterexamples.push(Counterexample {
                case,
                seed,
                property: property.to_string(),
                instantiation: instantiation(),
                failing_instant,
                detail: detail(),
            });
        }
    }
}

/// SplitMix-style finalizer used to derive independent sub-seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn case_seed(seed: u64, case: usize) -> u64 {
    mix(seed ^ mix(case as u64 + 1))
}

// ---- Formula and group generation ----

/// A random propositional formula over `props`, depth-bounded. With no
/// propositions available it falls back to the constants.
pub fn random_prop_formula(
    rng: &mut ChaCha8Rng,
    props: &[String],
    depth: usize,
) -> StaticFormula {
    if depth == 0 || rng.random_bool(0.4) {
        if props.is_empty() || rng.random_bool(0.05) {
            return if rng.random_bool(0.5) {
                StaticFormula::Top
            } else {
                StaticFormula::Bottom
            };
        }
        let p = &props[rng.random_range(0..props.len())];
        return StaticFormula::prop(p.clone());
    }
    match rng.random_range(0..4u32) {
        0 => StaticFormula::not(random_prop_formula(rng, props, depth - 1)),
        1 => StaticFormula::and(
            random_prop_formula(rng, props, depth - 1),
            random_prop_formula(rng, props, depth - 1),
        ),
        2 => StaticFormula::or(
            random_prop_formula(rng, props, depth - 1),
            random_prop_formula(rng, props, depth - 1),
        ),
        _ => StaticFormula::implies(
            random_prop_formula(rng, props, depth - 1),
            random_prop_formula(rng, props, depth - 1),
        ),
    }
}

/// A random subgroup of `agents`; nonempty unless `allow_empty`.
pub fn random_group(rng: &mut ChaCha8Rng, agents: &BTreeSet<AgentId>, allow_empty: bool) -> Group {
    if agents.is_empty() {
        return Group::empty();
    }
    for _ in 0..8 {
        let picked: Vec<AgentId> = agents
            .iter()
            .filter(|_| rng.random_bool(0.5))
            .cloned()
            .collect();
        if allow_empty || !picked.is_empty() {
            return Group::new(picked);
        }
    }
    let nth = rng.random_range(0..agents.len());
    Group::new([agents.iter().nth(nth).unwrap().clone()])
}

/// A random rewrite of `f` with the same classical semantics: double
/// negation, commuted or idempotent conjunction, De Morgan shells,
/// implication expansion, and neutral constants. Non-Boolean subformulas
/// are treated as opaque atoms and survive unchanged.
pub fn equivalent_variant(rng: &mut ChaCha8Rng, f: &StaticFormula) -> StaticFormula {
    use StaticFormula as S;
    let base = match f {
        S::Not(x) => S::not(equivalent_variant(rng, x)),
        S::And(l, r) => {
            let l2 = equivalent_variant(rng, l);
            let r2 = equivalent_variant(rng, r);
            match rng.random_range(0..3u32) {
                0 => S::and(l2, r2),
                1 => S::and(r2, l2),
                _ => S::not(S::or(S::not(l2), S::not(r2))),
            }
        }
        S::Or(l, r) => {
            let l2 = equivalent_variant(rng, l);
            let r2 = equivalent_variant(rng, r);
            match rng.random_range(0..4u32) {
                0 => S::or(l2, r2),
                1 => S::or(r2, l2),
                2 => S::not(S::and(S::not(l2), S::not(r2))),
                _ => S::implies(S::not(l2), r2),
            }
        }
        S::Implies(l, r) => {
            let l2 = equivalent_variant(rng, l);
            let r2 = equivalent_variant(rng, r);
            match rng.random_range(0..3u32) {
                0 => S::implies(l2, r2),
                1 => S::or(S::not(l2), r2),
                _ => S::not(S::and(l2, S::not(r2))),
            }
        }
        other => other.clone(),
    };
    match rng.random_range(0..8u32) {
        0 => S::not(S::not(base)),
        1 => S::and(base, S::Top),
        2 => S::or(base, S::Bottom),
        3 => {
            let copy = base.clone();
            S::and(base, copy)
        }
        _ => base,
    }
}

/// Every proposition assigned somewhere in the model.
fn model_props(model: &SCModel) -> Vec<String> {
    let mut out: BTreeSet<String> = BTreeSet::new();
    for w in 0..model.world_count() {
        out.extend(model.valuation(w).iter().cloned());
    }
    out.into_iter().collect()
}

/// The tightest definable cover of `set`: a disjunction of valuation
/// descriptions, one per member world.
fn characteristic_formula(
    model: &SCModel,
    set: &crate::bitset::BitSet,
    props: &[String],
) -> StaticFormula {
    use StaticFormula as S;
    let mut disjuncts: Vec<StaticFormula> = Vec::new();
    for w in set.iter_ones() {
        let val = model.valuation(w);
        let conj = props
            .iter()
            .map(|p| {
                if val.contains(p) {
                    S::prop(p.clone())
                } else {
                    S::not(S::prop(p.clone()))
                }
            })
            .reduce(S::and)
            .unwrap_or(S::Top);
        disjuncts.push(conj);
    }
    disjuncts.into_iter().reduce(S::or).unwrap_or(S::Bottom)
}

// ---- Static soundness ----

/// Runs `n_cases` random valid static models against the static axioms:
/// sc1, sc2, the congruence rules in semantic form, the joint consistency
/// of confirmation and disconfirmation, and the agency laws b1, b2, b3.
pub fn static_soundness(seed: u64, n_cases: usize) -> SuiteReport {
    let mut report = SuiteReport::new("static_soundness", seed, n_cases);
    for case in 0..n_cases {
        let cs = case_seed(seed, case);
        let mut rng = ChaCha8Rng::seed_from_u64(cs);
        let params = GenParams {
            worlds: rng.random_range(1..=5),
            agents: rng.random_range(1..=3),
            props: rng.random_range(1..=3),
            density: [0.15, 0.3, 0.45][rng.random_range(0..3)],
        };
        let model = random_sc_model(mix(cs), &params);
        static_case(&mut report, case, cs, &mut rng, &model);
    }
    report
}

fn static_case(
    report: &mut SuiteReport,
    case: usize,
    cs: u64,
    rng: &mut ChaCha8Rng,
    model: &SCModel,
) {
    use StaticFormula as S;

    let frame = validate_sc_model(model);
    report.check(
        case,
        cs,
        frame.is_valid(),
        "def1",
        || "the model satisfies the frame conditions".to_string(),
        None,
        || format!("violations: {:?}\nmodel: {}", frame.violations, model.to_json()),
    );

    let props = model_props(model);
    let mut pool: Vec<StaticFormula> = Vec::new();
    for set in model.fact_sets().into_iter().take(4) {
        pool.push(characteristic_formula(model, &set, &props));
    }
    for _ in 0..4 {
        pool.push(random_prop_formula(rng, &props, 2));
    }
    pool.push(S::Top);

    let mut groups: BTreeSet<Group> = model.fact_groups().into_iter().take(4).collect();
    groups.insert(random_group(rng, model.agents(), true));
    groups.insert(random_group(rng, model.agents(), false));

    let ext = |f: &StaticFormula| {
        model
            .extension(f)
            .expect("pool formulas stay inside the model signature")
    };

    for g in &groups {
        for phi in &pool {
            let e_phi = ext(phi);
            let e_dabl = ext(&S::dabl(g.clone(), phi.clone()));
            let e_conf = ext(&S::conf(g.clone(), phi.clone()));
            let e_disc = ext(&S::disc(g.clone(), phi.clone()));

            report.check(
                case,
                cs,
                e_conf.is_subset(&e_dabl),
                "sc1",
                || format!("Conf{g} {phi} -> Dabl{g} {phi}"),
                None,
                || {
                    let w = e_conf
                        .iter_ones()
                        .find(|w| !e_dabl.contains(*w))
                        .expect("a witness world exists");
                    format!(
                        "confirmed but not deemed at world {}\nmodel: {}",
                        model.worlds()[w],
                        model.to_json()
                    )
                },
            );
            report.check(
                case,
                cs,
                e_disc.intersection(&e_dabl).is_empty(),
                "sc2",
                || format!("Disc{g} {phi} -> !Dabl{g} {phi}"),
                None,
                || {
                    let w = e_disc
                        .iter_ones()
                        .find(|w| e_dabl.contains(*w))
                        .expect("a witness world exists");
                    format!(
                        "disconfirmed yet deemed at world {}\nmodel: {}",
                        model.worlds()[w],
                        model.to_json()
                    )
                },
            );
            report.check(
                case,
                cs,
                e_conf.intersection(&e_disc).is_empty(),
                "conf-disc-bot",
                || format!("Conf{g} {phi} & Disc{g} {phi} -> _|_"),
                None,
                || {
                    let w = e_conf
                        .iter_ones()
                        .find(|w| e_disc.contains(*w))
                        .expect("a witness world exists");
                    format!(
                        "both confirmed and disconfirmed at world {}\nmodel: {}",
                        model.worlds()[w],
                        model.to_json()
                    )
                },
            );

            let variant = equivalent_variant(rng, phi);
            for (rule, kind, expected) in [
                ("scr1", S::dabl(g.clone(), variant.clone()), &e_dabl),
                ("scr2", S::conf(g.clone(), variant.clone()), &e_conf),
                ("scr3", S::disc(g.clone(), variant.clone()), &e_disc),
            ] {
                let got = ext(&kind);
                report.check(
                    case,
                    cs,
                    got == *expected,
                    rule,
                    || format!("{kind} should agree with the {phi} instance everywhere"),
                    None,
                    || format!("model: {}", model.to_json()),
                );
            }

            let e_brings = ext(&S::brings(g.clone(), phi.clone()));
            report.check(
                case,
                cs,
                e_brings.is_subset(&e_phi),
                "b2",
                || format!("E{g} {phi} -> {phi}"),
                None,
                || format!("model: {}", model.to_json()),
            );
            let taut = S::or(phi.clone(), S::not(phi.clone()));
            report.check(
                case,
                cs,
                ext(&S::brings(g.clone(), taut.clone())).is_empty(),
                "b1",
                || format!("!E{g} ({taut})"),
                None,
                || format!("model: {}", model.to_json()),
            );
        }

        report.check(
            case,
            cs,
            ext(&S::brings(g.clone(), S::Top)).is_empty(),
            "b1",
            || format!("!E{g} T"),
            None,
            || format!("model: {}", model.to_json()),
        );

        for pair in pool.windows(2) {
            let both = ext(&S::brings(g.clone(), pair[0].clone()))
                .intersection(&ext(&S::brings(g.clone(), pair[1].clone())));
            let joint = ext(&S::brings(g.clone(), S::and(pair[0].clone(), pair[1].clone())));
            report.check(
                case,
                cs,
                both.is_subset(&joint),
                "b3",
                || {
                    format!(
                        "E{g} {} & E{g} {} -> E{g} ({} & {})",
                        pair[0], pair[1], pair[0], pair[1]
                    )
                },
                None,
                || format!("model: {}", model.to_json()),
            );
        }
    }
}

// ---- Event log generation ----

/// Knobs for [`random_event_log`].
#[derive(Debug, Clone, Copy)]
pub struct LogGenParams {
    /// Inclusive instant-count range.
    pub horizon: (usize, usize),
    /// 1..=3 agents.
    pub max_agents: usize,
    /// 1..=3 propositions.
    pub max_props: usize,
    /// Chance for each optional engine behaviour to be switched on.
    pub flag_probability: f64,
}

impl Default for LogGenParams {
    fn default() -> Self {
        LogGenParams {
            horizon: (2, 6),
            max_agents: 3,
            max_props: 3,
            flag_probability: 0.25,
        }
    }
}

/// One random grounded event log. Success events are kept factive and
/// non-tautological by construction; rarer conflicts (such as a grant and
/// a revocation colliding on one fact) are left in and handled by
/// rejection in [`random_derived_trace`].
pub fn random_event_log(rng: &mut ChaCha8Rng, params: &LogGenParams) -> EventLog {
    let prop_names = ["p1", "p2", "p3"];
    let agent_names = ["s1", "s2", "s3"];
    let n_props = rng.random_range(1..=params.max_props.min(3));
    let props: Vec<String> = prop_names[..n_props].iter().map(|p| p.to_string()).collect();
    let universe = Universe::new(props.clone()).expect("few short proposition names");
    let n_agents = rng.random_range(1..=params.max_agents.min(3));
    let agents: BTreeSet<AgentId> = agent_names[..n_agents]
        .iter()
        .map(|a| AgentId::new(*a).expect("fixed agent names"))
        .collect();
    let horizon = rng.random_range(params.horizon.0..=params.horizon.1);
    let flags = Flags {
        empty_group_excluded: rng.random_bool(params.flag_probability),
        monotonic_conf: rng.random_bool(params.flag_probability),
        b6: rng.random_bool(params.flag_probability),
        ..Flags::default()
    };

    let mut valuations = std::collections::BTreeMap::new();
    for t in 0..horizon {
        if rng.random_bool(0.85) {
            let val: BTreeSet<String> = props
                .iter()
                .filter(|_| rng.random_bool(0.5))
                .cloned()
                .collect();
            if !val.is_empty() || rng.random_bool(0.3) {
                valuations.insert(t, val);
            }
        }
    }

    let empty = BTreeSet::new();
    let mut events: Vec<Event> = Vec::new();
    for t in 0..horizon {
        let val = valuations.get(&t).unwrap_or(&empty);
        let val_index = universe.valuation_index(val);
        let sample = |rng: &mut ChaCha8Rng, pred: &dyn Fn(&CanonicalKey) -> bool, fallback: StaticFormula| {
            for _ in 0..12 {
                let f = random_prop_formula(rng, &props, 2);
                if let Ok(k) = canonical_key(&f, &universe) {
                    if pred(&k) {
                        return f;
                    }
                }
            }
            fallback
        };
        let plain = |k: &CanonicalKey| !k.is_tautology() && !k.is_contradiction();

        let n_events = match rng.random_range(0..10u32) {
            0..=2 => 0,
            3..=6 => 1,
            7..=8 => 2,
            _ => 3,
        };
        let mut agency_budget = 3usize;
        for _ in 0..n_events {
            let group = random_group(rng, &agents, false);
            let roll: f64 = rng.random();
            let kind = if roll < 0.35 && agency_budget > 0 {
                agency_budget -= 1;
                let fallback = match props.iter().find(|p| val.contains(*p)) {
                    Some(p) => StaticFormula::prop(p.clone()),
                    None => StaticFormula::not(StaticFormula::prop(props[0].clone())),
                };
                let objective = sample(
                    rng,
                    &|k| !k.is_tautology() && k.holds_at(val_index),
                    fallback,
                );
                EventKind::Agency { group, objective }
            } else if roll < 0.55 {
                EventKind::Attempt {
                    group,
                    objective: sample(rng, &plain, StaticFormula::prop(props[0].clone())),
                }
            } else if roll < 0.75 {
                let group = if rng.random_bool(0.12) { Group::empty() } else { group };
                EventKind::Grant {
                    group,
                    objective: sample(rng, &plain, StaticFormula::prop(props[0].clone())),
                }
            } else if roll < 0.85 {
                let group = if rng.random_bool(0.12) { Group::empty() } else { group };
                EventKind::Revoke {
                    group,
                    objective: sample(rng, &plain, StaticFormula::prop(props[0].clone())),
                }
            } else {
                let fallback = if val.contains(&props[0]) {
                    StaticFormula::not(StaticFormula::prop(props[0].clone()))
                } else {
                    StaticFormula::prop(props[0].clone())
                };
                let deadline = sample(
                    rng,
                    &|k| plain(k) && !k.holds_at(val_index),
                    fallback,
                );
                EventKind::Agree {
                    group,
                    objective: sample(rng, &plain, StaticFormula::prop(props[0].clone())),
                    deadline,
                }
            };
            events.push(Event { t, kind });
        }
    }

    EventLog {
        universe,
        agents,
        horizon,
        flags,
        events,
        valuations,
    }
}

/// Rejection-samples random logs until the engine accepts one. Returns the
/// log, its derivation, and how many candidates were discarded.
pub fn random_derived_trace(seed: u64, params: &LogGenParams) -> (EventLog, DerivedTrace, usize) {
    for attempt in 0..50usize {
        let mut rng = ChaCha8Rng::seed_from_u64(mix(seed ^ mix(attempt as u64 + 101)));
        let log = random_event_log(&mut rng, params);
        if let Ok(trace) = engine::run(&log) {
            return (log, trace, attempt);
        }
    }
    // Practically unreachable; an eventless log always derives.
    let log = EventLog {
        universe: Universe::new(["p1".to_string()]).expect("one proposition"),
        agents: [AgentId::new("s1").expect("fixed name")].into_iter().collect(),
        horizon: 2,
        flags: Flags::default(),
        events: Vec::new(),
        valuations: std::collections::BTreeMap::new(),
    };
    let trace = engine::run(&log).expect("an eventless log derives");
    (log, trace, 50)
}

/// A trace of independently random pointed models over one shared
/// signature; nothing ties consecutive instants together, so the
/// persistence constraints generally fail on these.
pub fn random_trace_model(
    rng: &mut ChaCha8Rng,
    instants: usize,
    params: &GenParams,
) -> TraceModel {
    assert!(instants >= 1, "a trace needs at least one instant");
    let pointed: Vec<PointedModel> = (0..instants)
        .map(|_| {
            let m = random_sc_model(rng.random::<u64>(), params);
            let w = m.worlds()[rng.random_range(0..m.world_count())].clone();
            PointedModel::new(m, &w).expect("the point is drawn from the worlds")
        })
        .collect();
    TraceModel::new(pointed).expect("at least one instant")
}

// ---- Linear-time axiom instances ----

/// Builds the `n`-th linear-time axiom over atoms `[p, q, r, s]`; the
/// variant of ltl8 built here is the since-form amendment.
fn ltl_instance(n: usize, a: &[TemporalFormula; 4]) -> TemporalFormula {
    use TemporalFormula as T;
    let (p, q, r, s) = (&a[0], &a[1], &a[2], &a[3]);
    let imp = T::implies;
    match n {
        1 => imp(
            T::and(
                T::globally(T::implies(p.clone(), q.clone())),
                T::until(r.clone(), p.clone()),
            ),
            T::until(r.clone(), q.clone()),
        ),
        2 => imp(
            T::and(
                T::has_always(T::implies(p.clone(), q.clone())),
                T::since(r.clone(), p.clone()),
            ),
            T::since(r.clone(), q.clone()),
        ),
        3 => imp(
            T::and(
                T::globally(T::implies(p.clone(), q.clone())),
                T::until(p.clone(), r.clone()),
            ),
            T::until(q.clone(), r.clone()),
        ),
        4 => imp(
            T::and(
                T::has_always(T::implies(p.clone(), q.clone())),
                T::since(p.clone(), r.clone()),
            ),
            T::since(q.clone(), r.clone()),
        ),
        5 => imp(
            T::and(p.clone(), T::until(r.clone(), q.clone())),
            T::until(r.clone(), T::and(q.clone(), T::since(r.clone(), p.clone()))),
        ),
        6 => imp(
            T::and(p.clone(), T::since(r.clone(), q.clone())),
            T::since(r.clone(), T::and(q.clone(), T::until(r.clone(), p.clone()))),
        ),
        7 => imp(
            T::until(q.clone(), p.clone()),
            T::until(T::and(q.clone(), T::until(q.clone(), p.clone())), p.clone()),
        ),
        8 => imp(
            T::since(q.clone(), p.clone()),
            T::since(T::and(q.clone(), T::since(q.clone(), p.clone())), p.clone()),
        ),
        9 => imp(
            T::until(q.clone(), T::and(q.clone(), T::until(q.clone(), p.clone()))),
            T::until(q.clone(), p.clone()),
        ),
        10 => imp(
            T::since(q.clone(), T::and(q.clone(), T::since(q.clone(), p.clone()))),
            T::since(q.clone(), p.clone()),
        ),
        11 => imp(
            T::and(T::until(q.clone(), p.clone()), T::until(s.clone(), r.clone())),
            T::or(
                T::until(T::and(q.clone(), s.clone()), T::and(p.clone(), r.clone())),
                T::or(
                    T::until(T::and(q.clone(), s.clone()), T::and(p.clone(), s.clone())),
                    T::until(T::and(q.clone(), s.clone()), T::and(q.clone(), r.clone())),
                ),
            ),
        ),
        12 => imp(
            T::and(T::since(q.clone(), p.clone()), T::since(s.clone(), r.clone())),
            T::or(
                T::since(T::and(q.clone(), s.clone()), T::and(p.clone(), r.clone())),
                T::or(
                    T::since(T::and(q.clone(), s.clone()), T::and(p.clone(), s.clone())),
                    T::since(T::and(q.clone(), s.clone()), T::and(q.clone(), r.clone())),
                ),
            ),
        ),
        _ => unreachable!("twelve linear-time axioms"),
    }
}

/// The mixed-operator form of ltl8, observed but never asserted.
fn ltl8_mixed(a: &[TemporalFormula; 4]) -> TemporalFormula {
    use TemporalFormula as T;
    let (p, q) = (&a[0], &a[1]);
    T::implies(
        T::since(q.clone(), p.clone()),
        T::until(T::and(q.clone(), T::since(q.clone(), p.clone())), p.clone()),
    )
}

// ---- Temporal soundness ----

/// Runs `n_cases` random derivations and `n_cases` unconstrained random
/// traces against the temporal axioms. Derived traces must satisfy the
/// linear-time schemata, the three persistence axioms, the task
/// principles, the engine's flag contracts and the confirmation
/// interdependence; unconstrained traces must satisfy the linear-time
/// schemata only, and each persistence axiom must be falsified by at
/// least one of them.
pub fn temporal_soundness(seed: u64, n_cases: usize) -> SuiteReport {
    let mut report = SuiteReport::new("temporal_soundness", seed, n_cases);
    let mut discarded_total = 0usize;
    let mut ltl8_mixed_failures = 0u64;
    let mut bite: [Option<usize>; 3] = [None; 3];

    for case in 0..n_cases {
        let cs = case_seed(seed, case);
        let mut rng = ChaCha8Rng::seed_from_u64(cs);
        let (log, trace, discarded) =
            random_derived_trace(mix(cs), &LogGenParams::default());
        discarded_total += discarded;
        derived_case(
            &mut report,
            case,
            cs,
            &mut rng,
            &log,
            &trace,
            &mut ltl8_mixed_failures,
        );
        unconstrained_case(
            &mut report,
            case,
            cs,
            &mut rng,
            &mut ltl8_mixed_failures,
            &mut bite,
        );
    }

    report.notes.push(format!(
        "log generator discarded {discarded_total} rejected candidates"
    ));
    report.notes.push(format!(
        "ltl8 in its mixed until form was falsified {ltl8_mixed_failures} times; \
         the since form is asserted in its place"
    ));
    if n_cases > 0 {
        for (i, axiom) in [DAAxiom::Lbda1, DAAxiom::Lbda2, DAAxiom::Lbda3]
            .into_iter()
            .enumerate()
        {
            match bite[i] {
                Some(c) => report.notes.push(format!(
                    "{axiom} falsified by an unconstrained trace first in case {c}"
                )),
                None => report.counterexamples.push(Counterexample {
                    case: n_cases,
                    seed,
                    property: format!("{axiom}-bite"),
                    instantiation: format!(
                        "{axiom} should fail on some trace without the persistence constraints"
                    ),
                    failing_instant: None,
                    detail: "no unconstrained random trace falsified the axiom within the case budget"
                        .to_string(),
                }),
            }
        }
    }
    report
}

fn derived_case(
    report: &mut SuiteReport,
    case: usize,
    cs: u64,
    rng: &mut ChaCha8Rng,
    log: &EventLog,
    trace: &DerivedTrace,
    ltl8_counter: &mut u64,
) {
    let tm = trace.to_trace_model();

    let da = validate_da_model(&tm).expect("derived traces share one world set");
    report.check(
        case,
        cs,
        da.is_valid(),
        "def5",
        || "the validator accepts the derived trace".to_string(),
        None,
        || {
            format!(
                "conditions: {:?}\nstatic: {:?}\nlog:\n{}",
                da.violations,
                da.static_violations,
                log.to_jsonl()
            )
        },
    );

    let mut tracked: BTreeSet<FactKey> = BTreeSet::new();
    for t in 0..trace.len() {
        let facts = trace.facts(t);
        tracked.extend(facts.e.keys().cloned());
        tracked.extend(facts.att.keys().cloned());
        tracked.extend(facts.conf.keys().cloned());
        tracked.extend(facts.disc.keys().cloned());
        tracked.extend(facts.dabl.iter().cloned());
    }

    for (g, key) in &tracked {
        let phi = parse_static(&trace.render_key(key)).expect("rendered objectives reparse");
        for axiom in [DAAxiom::Lbda1, DAAxiom::Lbda2, DAAxiom::Lbda3] {
            let vec = axiom_check(&tm, axiom, g, &phi).expect("tracked pairs evaluate");
            report.checks += 1;
            if let Some(t_fail) = vec.iter().position(|ok| !ok) {
                let fails = |tr: &DerivedTrace| {
                    axiom_check(&tr.to_trace_model(), axiom, g, &phi)
                        .map(|v| v.contains(&false))
                        .unwrap_or(false)
                };
                record_derived_failure(
                    report,
                    case,
                    cs,
                    &axiom.to_string(),
                    axiom_instance(axiom, g, &phi).to_string(),
                    Some(t_fail),
                    log,
                    &fails,
                );
            }
        }
    }

    let interdependence =
        check_interdependence(&tm).expect("derived traces share one world set");
    report.checks += 1;
    if let Some(first) = interdependence.first() {
        let fails = |tr: &DerivedTrace| {
            check_interdependence(&tr.to_trace_model())
                .map(|v| !v.is_empty())
                .unwrap_or(false)
        };
        record_derived_failure(
            report,
            case,
            cs,
            "interdependence",
            format!("{first:?}"),
            None,
            log,
            &fails,
        );
    }

    // Linear-time schemata over atoms drawn from the tracked facts.
    let mut atoms: Vec<TemporalFormula> = Vec::new();
    for (g, key) in tracked.iter().take(4) {
        let phi = parse_static(&trace.render_key(key)).expect("rendered objectives reparse");
        for build in [StaticFormula::dabl, StaticFormula::conf, StaticFormula::disc] {
            atoms.push(
                TemporalFormula::mono(build(g.clone(), phi.clone()))
                    .expect("modality roots are monolithic"),
            );
        }
    }
    for rec in trace.tasks().iter().take(2) {
        atoms.push(
            TemporalFormula::mono(StaticFormula::task(
                rec.group.clone(),
                rec.objective.clone(),
                rec.deadline.clone(),
            ))
            .expect("modality roots are monolithic"),
        );
    }
    for p in trace.universe().props() {
        atoms.push(TemporalFormula::mono(StaticFormula::prop(p.clone())).expect("atoms"));
    }
    let picks: [TemporalFormula; 4] =
        std::array::from_fn(|_| atoms[rng.random_range(0..atoms.len())].clone());
    for _ in 0..2 {
        let a: [TemporalFormula; 4] =
            std::array::from_fn(|_| atoms[rng.random_range(0..atoms.len())].clone());
        check_ltl_family(report, case, cs, &tm, &a, Some(log), ltl8_counter);
    }

    // Necessitation: prefixing a valid instance with either closure
    // operator preserves validity.
    let valid_instance = ltl_instance(1, &picks);
    for (rule, wrapped) in [
        ("ltlr1", TemporalFormula::globally(valid_instance.clone())),
        ("ltlr2", TemporalFormula::has_always(valid_instance.clone())),
    ] {
        let vec = tm.truth_vector(&wrapped).expect("atoms evaluate");
        let first_fail = vec.iter().position(|ok| !ok);
        report.check(
            case,
            cs,
            first_fail.is_none(),
            rule,
            || wrapped.to_string(),
            first_fail,
            || format!("log:\n{}", log.to_jsonl()),
        );
    }

    task_properties(report, case, cs, &tm, trace, log);
    flag_properties(report, case, cs, log, trace);
}

fn task_properties(
    report: &mut SuiteReport,
    case: usize,
    cs: u64,
    tm: &TraceModel,
    trace: &DerivedTrace,
    log: &EventLog,
) {
    use TemporalFormula as T;
    for rec in trace.tasks() {
        let task = T::mono(StaticFormula::task(
            rec.group.clone(),
            rec.objective.clone(),
            rec.deadline.clone(),
        ))
        .expect("modality roots are monolithic");
        let agree = T::mono(StaticFormula::agree(
            rec.group.clone(),
            rec.objective.clone(),
            rec.deadline.clone(),
        ))
        .expect("modality roots are monolithic");
        let done_by_group = T::mono(StaticFormula::brings(
            rec.group.clone(),
            rec.objective.clone(),
        ))
        .expect("modality roots are monolithic");
        let disc = T::mono(StaticFormula::disc(
            rec.group.clone(),
            rec.objective.clone(),
        ))
        .expect("modality roots are monolithic");
        let deadline = T::lift(&rec.deadline);
        let resolved = T::or(deadline.clone(), done_by_group.clone());

        let instances = [
            ("t3", T::implies(resolved.clone(), T::not(task.clone()))),
            (
                "t5",
                T::implies(
                    task.clone(),
                    T::or(agree.clone(), T::since(task.clone(), agree.clone())),
                ),
            ),
            (
                "t6",
                T::implies(task.clone(), T::weak_until(task.clone(), resolved.clone())),
            ),
            (
                "t7",
                T::implies(
                    T::since(task.clone(), agree.clone()),
                    T::implies(
                        T::and(deadline.clone(), T::not(done_by_group.clone())),
                        disc.clone(),
                    ),
                ),
            ),
        ];
        for (name, f) in instances {
            let vec = tm.truth_vector(&f).expect("task identities evaluate");
            report.checks += 1;
            if let Some(t_fail) = vec.iter().position(|ok| !ok) {
                let fails = |tr: &DerivedTrace| {
                    tr.to_trace_model()
                        .truth_vector(&f)
                        .map(|v| v.contains(&false))
                        .unwrap_or(false)
                };
                record_derived_failure(
                    report,
                    case,
                    cs,
                    name,
                    f.to_string(),
                    Some(t_fail),
                    log,
                    &fails,
                );
            }
        }
    }
}

fn flag_properties(
    report: &mut SuiteReport,
    case: usize,
    cs: u64,
    log: &EventLog,
    trace: &DerivedTrace,
) {
    if log.flags.monotonic_conf {
        let declared: Vec<AgentId> = log.agents.iter().cloned().collect();
        let all_groups: Vec<Group> = subsets(&declared).into_iter().map(Group::new).collect();
        for t in 0..trace.len() {
            let facts = trace.facts(t);
            for (g, key) in facts.conf.keys() {
                for sup in &all_groups {
                    if !g.is_subset(sup) || g == sup {
                        continue;
                    }
                    report.checks += 1;
                    if !facts.conf.contains_key(&(sup.clone(), key.clone())) {
                        let (g, key, sup) = (g.clone(), key.clone(), sup.clone());
                        let fails = move |tr: &DerivedTrace| {
                            (0..tr.len()).any(|t| {
                                tr.facts(t).conf.contains_key(&(g.clone(), key.clone()))
                                    && !tr.facts(t).conf.contains_key(&(sup.clone(), key.clone()))
                            })
                        };
                        record_derived_failure(
                            report,
                            case,
                            cs,
                            "flag-monotonic-conf",
                            format!("a supergroup misses a confirmation at t={t}"),
                            Some(t),
                            log,
                            &fails,
                        );
                    }
                }
            }
        }
    }
    if log.flags.empty_group_excluded {
        for t in 0..trace.len() {
            for (g, key) in trace.facts(t).conf.keys() {
                report.checks += 1;
                if g.is_empty() {
                    let shown = format!("Conf{{}} {} at t={t}", trace.render_key(key));
                    let key = key.clone();
                    let fails = move |tr: &DerivedTrace| {
                        (0..tr.len()).any(|t| {
                            tr.facts(t)
                                .conf
                                .contains_key(&(Group::empty(), key.clone()))
                        })
                    };
                    record_derived_failure(
                        report,
                        case,
                        cs,
                        "flag-empty-group-excluded",
                        shown,
                        Some(t),
                        log,
                        &fails,
                    );
                }
            }
        }
    }
    if log.flags.b6 {
        for t in 0..trace.len() {
            let facts = trace.facts(t);
            for fact in facts.e.keys() {
                report.checks += 1;
                if !facts.att.contains_key(fact) {
                    let fact = fact.clone();
                    let fails = move |tr: &DerivedTrace| {
                        (0..tr.len()).any(|t| {
                            tr.facts(t).e.contains_key(&fact)
                                && !tr.facts(t).att.contains_key(&fact)
                        })
                    };
                    record_derived_failure(
                        report,
                        case,
                        cs,
                        "flag-b6",
                        format!("a success at t={t} is not also an attempt"),
                        Some(t),
                        log,
                        &fails,
                    );
                }
            }
        }
    }
}

fn unconstrained_case(
    report: &mut SuiteReport,
    case: usize,
    cs: u64,
    rng: &mut ChaCha8Rng,
    ltl8_counter: &mut u64,
    bite: &mut [Option<usize>; 3],
) {
    let params = GenParams {
        worlds: rng.random_range(2..=4),
        agents: rng.random_range(1..=2),
        props: rng.random_range(1..=2),
        density: 0.35,
    };
    let instants = rng.random_range(2..=5);
    let tm = random_trace_model(rng, instants, &params);
    let agents = tm.instant(0).model.agents().clone();
    let props = model_props(&tm.instant(0).model);

    let mut pool: Vec<TemporalFormula> = props
        .iter()
        .map(|p| TemporalFormula::mono(StaticFormula::prop(p.clone())).expect("atoms"))
        .collect();
    for _ in 0..4 {
        let g = random_group(rng, &agents, false);
        let phi = random_prop_formula(rng, &props, 1);
        let modal = match rng.random_range(0..5u32) {
            0 => StaticFormula::dabl(g, phi),
            1 => StaticFormula::conf(g, phi),
            2 => StaticFormula::disc(g, phi),
            3 => StaticFormula::brings(g, phi),
            _ => StaticFormula::attempts(g, phi),
        };
        pool.push(TemporalFormula::mono(modal).expect("modality roots are monolithic"));
    }
    if pool.is_empty() {
        pool.push(TemporalFormula::true_atom());
    }

    for _ in 0..2 {
        let a: [TemporalFormula; 4] =
            std::array::from_fn(|_| pool[rng.random_range(0..pool.len())].clone());
        check_ltl_family(report, case, cs, &tm, &a, None, ltl8_counter);
    }

    // Without the persistence constraints the three ability axioms have no
    // reason to hold; record the first case where each one breaks.
    for _ in 0..6 {
        let g = random_group(rng, &agents, false);
        let phi = random_prop_formula(rng, &props, 1);
        for (i, axiom) in [DAAxiom::Lbda1, DAAxiom::Lbda2, DAAxiom::Lbda3]
            .into_iter()
            .enumerate()
        {
            if bite[i].is_some() {
                continue;
            }
            let vec = tm
                .truth_vector(&axiom_instance(axiom, &g, &phi))
                .expect("the signature is shared across instants");
            if vec.contains(&false) {
                bite[i] = Some(case);
            }
        }
    }
}

fn check_ltl_family(
    report: &mut SuiteReport,
    case: usize,
    cs: u64,
    tm: &TraceModel,
    atoms: &[TemporalFormula; 4],
    log: Option<&EventLog>,
    ltl8_counter: &mut u64,
) {
    for n in 1..=12 {
        let inst = ltl_instance(n, atoms);
        let vec = tm.truth_vector(&inst).expect("atoms evaluate on every instant");
        report.checks += 1;
        if let Some(t_fail) = vec.iter().position(|ok| !ok) {
            let property = format!("ltl{n}");
            match log {
                Some(log) => {
                    let fails = |tr: &DerivedTrace| {
                        tr.to_trace_model()
                            .truth_vector(&inst)
                            .map(|v| v.contains(&false))
                            .unwrap_or(false)
                    };
                    record_derived_failure(
                        report,
                        case,
                        cs,
                        &property,
                        inst.to_string(),
                        Some(t_fail),
                        log,
                        &fails,
                    );
                }
                None => {
                    let fails = |cand: &TraceModel| {
                        cand.truth_vector(&inst)
                            .map(|v| v.contains(&false))
                            .unwrap_or(false)
                    };
                    let minimal = shrink_trace(tm, &fails);
                    report.counterexamples.push(Counterexample {
                        case,
                        seed: cs,
                        property,
                        instantiation: inst.to_string(),
                        failing_instant: Some(t_fail),
                        detail: format!("minimal failing trace:\n{}", minimal.to_json()),
                    });
                }
            }
        }
    }
    let mixed = ltl8_mixed(atoms);
    if tm
        .truth_vector(&mixed)
        .expect("atoms evaluate on every instant")
        .contains(&false)
    {
        *ltl8_counter += 1;
    }
}

fn record_derived_failure(
    report: &mut SuiteReport,
    case: usize,
    seed: u64,
    property: &str,
    instantiation: String,
    failing_instant: Option<usize>,
    log: &EventLog,
    fails: &dyn Fn(&DerivedTrace) -> bool,
) {
    let minimal = shrink_log(log, fails);
    report.counterexamples.push(Counterexample {
        case,
        seed,
        property: property.to_string(),
        instantiation,
        failing_instant,
        detail: format!("minimal failing log:\n{}", minimal.to_jsonl()),
    });
}

/// Greedy shrink: drop events one at a time, then trim the horizon from
/// the end, keeping every candidate that still derives and still fails.
fn shrink_log(log: &EventLog, fails: &dyn Fn(&DerivedTrace) -> bool) -> EventLog {
    let reproduces =
        |cand: &EventLog| matches!(engine::run(cand), Ok(trace) if fails(&trace));
    let mut best = log.clone();
    loop {
        let mut improved = false;
        for i in 0..best.events.len() {
            let mut cand = best.clone();
            cand.events.remove(i);
            if reproduces(&cand) {
                best = cand;
                improved = true;
                break;
            }
        }
        if improved {
            continue;
        }
        while best.horizon > 1 {
            let mut cand = best.clone();
            cand.horizon -= 1;
            cand.events.retain(|e| e.t < cand.horizon);
            cand.valuations.retain(|t, _| *t < cand.horizon);
            if reproduces(&cand) {
                best = cand;
                improved = true;
            } else {
                break;
            }
        }
        if !improved {
            break;
        }
    }
    best
}

/// Greedy shrink for unconstrained traces: drop instants from either end
/// while the property still fails.
fn shrink_trace(tm: &TraceModel, fails: &dyn Fn(&TraceModel) -> bool) -> TraceModel {
    let mut best = tm.clone();
    loop {
        let mut improved = false;
        if best.len() > 1 {
            for drop_first in [false, true] {
                let kept: Vec<PointedModel> = if drop_first {
                    best.instants()[1..].to_vec()
                } else {
                    best.instants()[..best.len() - 1].to_vec()
                };
                let cand = TraceModel::new(kept).expect("still nonempty");
                if fails(&cand) {
                    best = cand;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            break;
        }
    }
    best
}

// ---- Scenario replays ----

/// Replay failures.
#[derive(Debug, thiserror::Error)]
pub enum ReplayError {
    #[error("unknown scenario `{0}`; expected `lifecycle` or `repository`")]
    UnknownScenario(String),
    #[error(
        "transcript diverges from the golden at line {line}\n  expected: {expected}\n  got:      {got}"
    )]
    GoldenMismatch {
        line: usize,
        expected: String,
        got: String,
    },
    #[error(transparent)]
    Log(#[from] LogError),
    #[error(transparent)]
    Derivation(#[from] DerivationError),
}

/// A rendered scenario run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Transcript {
    pub name: String,
    pub lines: Vec<String>,
}

impl Transcript {
    pub fn render(&self) -> String {
        let mut out = self.lines.join("\n");
        out.push('\n');
        out
    }
}

/// The bundled scenario names.
pub const SCENARIOS: [&str; 2] = ["lifecycle", "repository"];

/// Replays a bundled scenario and checks the transcript against its
/// golden, line by line.
pub fn replay(name: &str) -> Result<Transcript, ReplayError> {
    let (log_text, golden) = match name {
        "lifecycle" => (
            include_str!("../data/lifecycle.jsonl"),
            include_str!("../data/lifecycle.golden.txt"),
        ),
        "repository" => (
            include_str!("../data/repository.jsonl"),
            include_str!("../data/repository.golden.txt"),
        ),
        other => return Err(ReplayError::UnknownScenario(other.to_string())),
    };
    let transcript = scenario_transcript(name, log_text)?;
    let rendered = transcript.render();
    if rendered != golden {
        let golden_lines: Vec<&str> = golden.lines().collect();
        let rendered_lines: Vec<&str> = rendered.lines().collect();
        for i in 0..golden_lines.len().max(rendered_lines.len()) {
            let expected = golden_lines.get(i).copied().unwrap_or("<end of golden>");
            let got = rendered_lines.get(i).copied().unwrap_or("<end of transcript>");
            if expected != got {
                return Err(ReplayError::GoldenMismatch {
                    line: i + 1,
                    expected: expected.to_string(),
                    got: got.to_string(),
                });
            }
        }
        return Err(ReplayError::GoldenMismatch {
            line: golden_lines.len() + 1,
            expected: "<exact bytes>".to_string(),
            got: "<trailing whitespace differs>".to_string(),
        });
    }
    Ok(transcript)
}

fn scenario_transcript(name: &str, log_text: &str) -> Result<Transcript, ReplayError> {
    let log = engine::parse_log(log_text)?;
    let trace = engine::run(&log)?;
    let mut lines = vec![format!("scenario {name}"), format!("instants {}", trace.len())];
    for t in 0..trace.len() {
        lines.push(trace.describe_instant(t));
    }
    let ok = match name {
        "lifecycle" => lifecycle_lines(&trace, &mut lines),
        "repository" => repository_lines(&trace, &mut lines),
        _ => unreachable!("callers pass a bundled scenario name"),
    };
    lines.push(format!("verdict {}", if ok { "pass" } else { "fail" }));
    Ok(Transcript {
        name: name.to_string(),
        lines,
    })
}

fn lifecycle_lines(trace: &DerivedTrace, lines: &mut Vec<String>) -> bool {
    let mut ok = true;
    let mut push = |line: String, good: bool| {
        if !good {
            ok = false;
        }
        lines.push(line);
    };
    let u = trace.universe();
    let g = Group::from_names(["s1", "s2"]).expect("fixed agent names");
    let phi = parse_static("p1 & p2").expect("fixed objective");
    let key = canonical_key(&phi, u).expect("objective over the log universe");
    let fact = (g.clone(), key.clone());
    let rendered = trace.render_key(&key);

    match trace.facts(1).conf.get(&fact) {
        Some(provs) if provs.iter().any(|p| p.to_string().starts_with("b5(")) => {
            let how: Vec<String> = provs.iter().map(|p| p.to_string()).collect();
            push(
                format!(
                    "step 1 [b5] simultaneous successes E{{s1}} p1 and E{{s2}} p2 at t=1 \
                     give Conf{g} {rendered} via {}",
                    how.join(", ")
                ),
                true,
            );
        }
        _ => push(
            "step 1 [b5] MISSING: no aggregated confirmation at t=1".to_string(),
            false,
        ),
    }

    let variant = parse_static("p2 & p1").expect("fixed variant");
    let variant_key = canonical_key(&variant, u).expect("variant over the log universe");
    let variant_holds = trace
        .query(
            &TemporalFormula::mono(StaticFormula::conf(g.clone(), variant.clone()))
                .expect("modality roots are monolithic"),
            1,
        )
        .unwrap_or(false);
    if variant_key == key && variant_holds {
        push(
            format!(
                "step 2 [scr2] the spelling p2 & p1 shares canonical key {} with {rendered}, \
                 so Conf{g} p2 & p1 holds at t=1 as well",
                key.to_hex()
            ),
            true,
        );
    } else {
        push(
            "step 2 [scr2] MISSING: the equivalent spelling does not confirm at t=1".to_string(),
            false,
        );
    }

    push(
        format!("step 3 [sc1] the confirmation grounds the ability: Dabl{g} {rendered} from t=1"),
        trace.facts(1).dabl.contains(&fact),
    );

    let persists = [2usize, 3].iter().all(|t| {
        trace.facts(*t).dabl.contains(&fact) && !trace.facts(*t).disc.contains_key(&fact)
    });
    push(
        format!(
            "step 4 [lbda1] no disconfirmation intervenes, so Dabl{g} {rendered} \
             persists through t=2..3"
        ),
        persists,
    );

    let f4 = trace.facts(4);
    let b7 = f4.att.contains_key(&fact)
        && !f4.e.contains_key(&fact)
        && f4
            .disc
            .get(&fact)
            .map(|provs| provs.iter().any(|p| p.to_string().starts_with("b7(")))
            .unwrap_or(false);
    if b7 {
        let how: Vec<String> = f4.disc[&fact].iter().map(|p| p.to_string()).collect();
        push(
            format!(
                "step 5 [b7] Att{g} {rendered} at t=4 finds no matching success, \
                 so Disc{g} {rendered} via {}",
                how.join(", ")
            ),
            true,
        );
    } else {
        push(
            "step 5 [b7] MISSING: the failed attempt did not disconfirm at t=4".to_string(),
            false,
        );
    }

    let removed = [4usize, 5].iter().all(|t| !trace.facts(*t).dabl.contains(&fact));
    push(
        format!(
            "step 6 [sc2] the disconfirmation removes the ability: no Dabl{g} {rendered} \
             from t=4 on; the cycle can restart"
        ),
        removed,
    );
    ok
}

fn repository_lines(trace: &DerivedTrace, lines: &mut Vec<String>) -> bool {
    let u = trace.universe();
    let g = Group::from_names(["s2"]).expect("fixed agent name");
    let kphi = canonical_key(&parse_static("phi").expect("objective"), u).expect("objective");
    let kpsi = canonical_key(&parse_static("psi").expect("deadline"), u).expect("deadline");
    let phi = trace.render_key(&kphi);
    let psi = trace.render_key(&kpsi);

    let instants_where = |pred: &dyn Fn(usize) -> bool| -> Vec<usize> {
        (0..trace.len()).filter(|t| pred(*t)).collect()
    };
    let conf = instants_where(&|t| trace.facts(t).conf.contains_key(&(g.clone(), kphi.clone())));
    let dabl = instants_where(&|t| trace.facts(t).dabl.contains(&(g.clone(), kphi.clone())));
    let task = instants_where(&|t| {
        trace
            .facts(t)
            .tasks
            .contains(&(g.clone(), kphi.clone(), kpsi.clone()))
    });
    let agree = instants_where(&|t| {
        trace
            .facts(t)
            .agrees
            .contains(&(g.clone(), kphi.clone(), kpsi.clone()))
    });
    let disc = instants_where(&|t| trace.facts(t).disc.contains_key(&(g.clone(), kphi.clone())));

    lines.push(format!("check Conf{g} {phi} at {}", fmt_window(&conf)));
    lines.push(format!("check Dabl{g} {phi} holds on {}", fmt_window(&dabl)));
    lines.push(format!(
        "check Task{g}({phi}; {psi}) active on {}",
        fmt_window(&task)
    ));
    lines.push(format!(
        "check Agree{g}({phi}; {psi}) at {}",
        fmt_window(&agree)
    ));
    lines.push(format!("check Disc{g} {phi} at {}", fmt_window(&disc)));

    conf == [0]
        && dabl == (0..5).collect::<Vec<_>>()
        && task == (1..5).collect::<Vec<_>>()
        && agree == [1]
        && disc == [5]
}

/// Renders a set of instants: a single instant as `{t}`, a contiguous run
/// as a half-open window, anything else as a braced list.
fn fmt_window(instants: &[usize]) -> String {
    match instants {
        [] => "never".to_string(),
        [t] => format!("{{{t}}}"),
        _ => {
            let contiguous = instants.windows(2).all(|w| w[1] == w[0] + 1);
            if contiguous {
                format!("[{},{})", instants[0], instants[instants.len() - 1] + 1)
            } else {
                let items: Vec<String> = instants.iter().map(|t| t.to_string()).collect();
                format!("{{{}}}", items.join(","))
            }
        }
    }
}
