//! Three-stage fall decision: a Mamdani pose stage, a Mamdani transition
//! stage, and a zeroth-order Takagi-Sugeno decision stage combining their
//! crisp outputs.

use crate::config::Config;
use crate::error::{Error, Result};
use crate::features::{DynamicFeatures, StaticFeatures};
use crate::fuzzy::connectives::{SNorm, TNorm};
use crate::fuzzy::mf::Mf;
use crate::fuzzy::rules::{complete_static_rules, parse_rules, Term, Variable};
use crate::fuzzy::system::{MamdaniSystem, TskSystem};

const TRANSITION_RULES: &str = include_str!("../../data/transition.rules");
const DECISION_RULES: &str = include_str!("../../data/decision.rules");

/// Outcome of one evaluation of the hierarchy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FuzzyDecision {
    /// Crisp pose stage output in [0, 1]; higher means more lying-like.
    pub pose: f64,
    /// Crisp transition-speed output in [0, 1]; higher means faster.
    pub transition: f64,
    /// Takagi-Sugeno fall score in [0, 1].
    pub score: f64,
    pub fall: bool,
}

/// The configured three-stage system.
#[derive(Debug, Clone)]
pub struct FallFuzzy {
    pub static_sys: MamdaniSystem,
    pub transition_sys: MamdaniSystem,
    pub decision_sys: TskSystem,
    pub threshold: f64,
}

/// Build a linguistic variable from `mf.<system>.<var>.*` config keys.
pub fn variable_from_config(cfg: &Config, system: &str, var: &str) -> Result<Variable> {
    let prefix = format!("mf.{system}.{var}.");
    let uni = cfg.get_f64_list(&format!("{prefix}universe"))?;
    if uni.len() != 2 || uni[0] >= uni[1] {
        return Err(Error::Config(format!("{prefix}universe must be `lo hi`")));
    }
    let mut terms = Vec::new();
    for key in cfg.keys_with_prefix(&prefix) {
        let name = &key[prefix.len()..];
        if name == "universe" || name.contains('.') {
            continue;
        }
        terms.push(Term { name: name.to_string(), mf: Mf::parse(cfg.get_str(key)?)? });
    }
    if terms.is_empty() {
        return Err(Error::Config(format!("no terms configured under {prefix}")));
    }
    Ok(Variable { name: var.to_string(), lo: uni[0], hi: uni[1], terms })
}

impl FallFuzzy {
    pub fn from_config(cfg: &Config) -> Result<Self> {
        let tnorm = TNorm::from_name(cfg.get_str("fuzzy.tnorm").unwrap_or("min"))?;
        let snorm = SNorm::from_name(cfg.get_str("fuzzy.snorm").unwrap_or("max"))?;
        let var = |sys: &str, name: &str| variable_from_config(cfg, sys, name);

        let static_sys = MamdaniSystem::new(
            vec![
                var("static", "h_w")?,
                var("static", "h_hmax")?,
                var("static", "max_sigma")?,
                var("static", "p40")?,
            ],
            var("static", "pose")?,
            &complete_static_rules(),
            tnorm,
            snorm,
        )?;
        let transition_sys = MamdaniSystem::new(
            vec![
                var("transition", "h_ratio")?,
                var("transition", "d_ratio")?,
                var("transition", "sv_total")?,
            ],
            var("transition", "transition")?,
            &parse_rules(TRANSITION_RULES)?,
            tnorm,
            snorm,
        )?;
        let decision_sys = TskSystem::new(
            vec![var("decision", "static")?, var("decision", "transition")?],
            var("decision", "decision")?,
            &parse_rules(DECISION_RULES)?,
            tnorm,
        )?;
        Ok(Self {
            static_sys,
            transition_sys,
            decision_sys,
            threshold: cfg.get_f64("det.tsk_threshold")?,
        })
    }

    /// Pose stage only (also used by the overhead pipeline).
    pub fn evaluate_pose(&self, s: &StaticFeatures) -> Result<f64> {
        self.static_sys.infer(&[s.hw, s.h_hmax, s.max_sigma, s.p40])
    }

    pub fn evaluate_transition(&self, d: &DynamicFeatures) -> Result<f64> {
        self.transition_sys.infer(&[d.h_ratio, d.d_ratio, d.sv_total])
    }

    /// Full three-stage evaluation.
    pub fn evaluate(&self, s: &StaticFeatures, d: &DynamicFeatures) -> Result<FuzzyDecision> {
        let pose = self.evaluate_pose(s)?;
        let transition = self.evaluate_transition(d)?;
        self.decide(pose, transition)
    }

    /// Decision stage from crisp stage outputs.
    pub fn decide(&self, pose: f64, transition: f64) -> Result<FuzzyDecision> {
        let score = self.decision_sys.infer(&[pose, transition])?;
        Ok(FuzzyDecision { pose, transition, score, fall: score >= self.threshold })
    }
}
