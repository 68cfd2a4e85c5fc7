//! Fuzzy-logic toolkit: membership functions, connectives, rule parsing and
//! validation, Mamdani / zeroth-order Takagi-Sugeno inference, 1D fuzzy
//! c-means fitting, and the three-stage fall-decision hierarchy.

pub mod connectives;
pub mod fcm;
pub mod hierarchy;
pub mod mf;
pub mod rules;
pub mod system;

pub use connectives::{Implication, Negation, SNorm, TNorm};
pub use fcm::{fcm_1d, fit_three_terms};
pub use hierarchy::{FallFuzzy, FuzzyDecision};
pub use mf::Mf;
pub use rules::{
    complete_static_rules, parse_rules, validate_rulebase, Rule, RulebaseReport, Term, Variable,
};
pub use system::{MamdaniSystem, TskSystem, DEFUZZ_GRID};
