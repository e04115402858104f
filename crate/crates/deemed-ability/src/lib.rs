//! A toolkit for the logic of deemed ability.
//!
//! Groups of agents are *deemed able* to bring about objectives. Abilities
//! are confirmed by observed success or by managerial decision, and revoked
//! by observed failure; between those events they persist by default. This
//! crate provides:
//!
//! * [`syntax`]: the static modal language (`Dabl`, `Conf`, `Disc`, `E`,
//!   `Att`, `Task`, `Agree`) and its temporalisation with strict
//!   until/since, with parsers and printers;
//! * [`canonical`]: truth-table keys that identify propositional objectives
//!   up to classical equivalence;
//! * [`static_model`]: finite neighborhood models, evaluation and
//!   validation;
//! * [`temporal_model`]: traces of pointed models, temporal evaluation,
//!   and the persistence constraints that make a trace a deemed-ability
//!   model;
//! * [`engine`]: derivation of per-instant ability facts from grounded
//!   event logs, with provenance;
//! * [`harness`]: randomized soundness suites and scripted replays;
//! * [`oracle`]: deliberately naive reference evaluators the test suites
//!   compare against.

pub mod bitset;
pub mod canonical;
pub mod engine;
pub mod harness;
pub mod oracle;
pub mod static_model;
pub mod syntax;
pub mod temporal_model;

pub use syntax::{
    parse_static, parse_temporal, AgentId, Group, ParseError, StaticFormula, TemporalFormula,
};
