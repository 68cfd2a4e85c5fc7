//! Linguistic variables, rule-text parsing, rule-base generation and
//! validation.

use crate::error::{Error, Result};
use crate::fuzzy::mf::Mf;
use std::fmt;

/// A named term of a linguistic variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub name: String,
    pub mf: Mf,
}

/// A linguistic variable: a universe of discourse and its terms.
#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub terms: Vec<Term>,
}

impl Variable {
    pub fn new(name: &str, lo: f64, hi: f64, terms: Vec<(&str, Mf)>) -> Self {
        Self {
            name: name.into(),
            lo,
            hi,
            terms: terms
                .into_iter()
                .map(|(n, mf)| Term { name: n.into(), mf })
                .collect(),
        }
    }

    pub fn term(&self, name: &str) -> Option<&Mf> {
        self.terms.iter().find(|t| t.name == name).map(|t| &t.mf)
    }
}

/// `IF a IS x AND b IS y ... THEN c IS z`, stored as (variable, term) names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub antecedents: Vec<(String, String)>,
    pub consequent: (String, String),
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IF ")?;
        for (i, (var, term)) in self.antecedents.iter().enumerate() {
            if i > 0 {
                write!(f, " AND ")?;
            }
            write!(f, "{var} IS {term}")?;
        }
        write!(f, " THEN {} IS {}", self.consequent.0, self.consequent.1)
    }
}

/// Parse one rule line.
pub fn parse_rule(line: &str) -> Result<Rule> {
    let bad = |msg: &str| Error::Format(format!("rule {line:?}: {msg}"));
    let rest = line.trim().strip_prefix("IF ").ok_or_else(|| bad("must start with IF"))?;
    let (ante, cons) = rest.split_once(" THEN ").ok_or_else(|| bad("missing THEN"))?;
    let atom = |s: &str| -> Result<(String, String)> {
        let (var, term) = s.trim().split_once(" IS ").ok_or_else(|| bad("missing IS"))?;
        let (var, term) = (var.trim(), term.trim());
        if var.is_empty() || term.is_empty() || var.contains(' ') || term.contains(' ') {
            return Err(bad("variable and term must be single words"));
        }
        Ok((var.into(), term.into()))
    };
    let antecedents = ante.split(" AND ").map(atom).collect::<Result<Vec<_>>>()?;
    if antecedents.is_empty() {
        return Err(bad("empty antecedent"));
    }
    Ok(Rule { antecedents, consequent: atom(cons)? })
}

/// Parse a rule file; `#` comments and blank lines are skipped.
pub fn parse_rules(text: &str) -> Result<Vec<Rule>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(parse_rule)
        .collect()
}

/// The full 81-rule static pose base. Each input contributes a lying score
/// (2 = most lying-like); the consequent follows the score sum: <= 2 notLy,
/// 3..=5 mayLy, >= 6 isLy.
pub fn complete_static_rules() -> Vec<Rule> {
    let grades = ["Lo", "Me", "Hi"];
    // (variable, term score in grade order Lo/Me/Hi).
    let score = |var: &str, g: usize| match var {
        "p40" | "max_sigma" => g,     // Lo=0 .. Hi=2
        "h_w" | "h_hmax" => 2 - g,    // Hi=0 .. Lo=2
        _ => unreachable!(),
    };
    let mut rules = Vec::with_capacity(81);
    for gp in 0..3 {
        for gw in 0..3 {
            for gs in 0..3 {
                for gh in 0..3 {
                    let s = score("p40", gp)
                        + score("h_w", gw)
                        + score("max_sigma", gs)
                        + score("h_hmax", gh);
                    let cons = if s <= 2 {
                        "notLy"
                    } else if s <= 5 {
                        "mayLy"
                    } else {
                        "isLy"
                    };
                    rules.push(Rule {
                        antecedents: vec![
                            ("p40".into(), grades[gp].into()),
                            ("h_w".into(), grades[gw].into()),
                            ("max_sigma".into(), grades[gs].into()),
                            ("h_hmax".into(), grades[gh].into()),
                        ],
                        consequent: ("pose".into(), cons.into()),
                    });
                }
            }
        }
    }
    rules
}

/// Rule-base health report.
#[derive(Debug, Clone, PartialEq)]
pub struct RulebaseReport {
    /// Every sampled input point fires at least one rule.
    pub complete: bool,
    /// Pairs of rule indices with equal antecedents but different consequents.
    pub conflicts: Vec<(usize, usize)>,
    /// Pairs of rule indices that are exact duplicates.
    pub redundant: Vec<(usize, usize)>,
    /// Antecedent-adjacent rule pairs whose consequents do not overlap.
    pub discontinuities: Vec<(usize, usize)>,
}

impl RulebaseReport {
    pub fn ok(&self) -> bool {
        self.complete
            && self.conflicts.is_empty()
            && self.redundant.is_empty()
            && self.discontinuities.is_empty()
    }
}

fn sorted_antecedents(r: &Rule) -> Vec<(String, String)> {
    let mut a = r.antecedents.clone();
    a.sort();
    a
}

/// Supremum of min(f, g) over a sampled interval — a positive value means the
/// two fuzzy sets overlap.
fn overlap(a: &Mf, b: &Mf, lo: f64, hi: f64) -> f64 {
    const N: usize = 201;
    let mut best = 0.0f64;
    for i in 0..N {
        let x = lo + (hi - lo) * i as f64 / (N - 1) as f64;
        best = best.max(a.eval(x).min(b.eval(x)));
    }
    best
}

/// Validate a rule base against its variables: completeness (grid sampling of
/// the input space), conflicts, duplicates and continuity (rules that differ
/// in a single antecedent term must have overlapping consequent sets).
pub fn validate_rulebase(
    inputs: &[Variable],
    output: &Variable,
    rules: &[Rule],
) -> Result<RulebaseReport> {
    for (ri, r) in rules.iter().enumerate() {
        for (var, term) in &r.antecedents {
            let v = inputs
                .iter()
                .find(|v| &v.name == var)
                .ok_or_else(|| Error::Invalid(format!("rule {ri}: unknown variable {var}")))?;
            if v.term(term).is_none() {
                return Err(Error::Invalid(format!("rule {ri}: unknown term {var}.{term}")));
            }
        }
        if r.consequent.0 != output.name || output.term(&r.consequent.1).is_none() {
            return Err(Error::Invalid(format!("rule {ri}: bad consequent")));
        }
    }

    // Completeness: every point of a coarse grid must fire some rule.
    const G: usize = 9;
    let n = inputs.len();
    let mut complete = true;
    let mut idx = vec![0usize; n];
    'grid: loop {
        let x: Vec<f64> = idx
            .iter()
            .zip(inputs)
            .map(|(&i, v)| v.lo + (v.hi - v.lo) * i as f64 / (G - 1) as f64)
            .collect();
        let fired = rules.iter().any(|r| {
            r.antecedents.iter().all(|(var, term)| {
                let vi = inputs.iter().position(|v| &v.name == var).unwrap();
                inputs[vi].term(term).unwrap().eval(x[vi]) > 0.0
            })
        });
        if !fired {
            complete = false;
            break;
        }
        for d in 0..n {
            idx[d] += 1;
            if idx[d] < G {
                continue 'grid;
            }
            idx[d] = 0;
        }
        break;
    }

    let keys: Vec<Vec<(String, String)>> = rules.iter().map(sorted_antecedents).collect();
    let mut conflicts = Vec::new();
    let mut redundant = Vec::new();
    let mut discontinuities = Vec::new();
    for i in 0..rules.len() {
        for j in i + 1..rules.len() {
            if keys[i] == keys[j] {
                if rules[i].consequent == rules[j].consequent {
                    redundant.push((i, j));
                } else {
                    conflicts.push((i, j));
                }
                continue;
            }
            // Adjacent: same variables, exactly one differing term whose
            // membership functions overlap.
            if keys[i].len() == keys[j].len() {
                let diffs: Vec<usize> = (0..keys[i].len())
                    .filter(|&k| keys[i][k] != keys[j][k])
                    .collect();
                let same_vars = (0..keys[i].len()).all(|k| keys[i][k].0 == keys[j][k].0);
                if same_vars && diffs.len() == 1 {
                    let k = diffs[0];
                    let var = inputs.iter().find(|v| v.name == keys[i][k].0).unwrap();
                    let a = var.term(&keys[i][k].1).unwrap();
                    let b = var.term(&keys[j][k].1).unwrap();
                    if overlap(a, b, var.lo, var.hi) > 0.0 {
                        let ca = output.term(&rules[i].consequent.1).unwrap();
                        let cb = output.term(&rules[j].consequent.1).unwrap();
                        let cons_overlap = rules[i].consequent.1 == rules[j].consequent.1
                            || overlap(ca, cb, output.lo, output.hi) > 0.0;
                        if !cons_overlap {
                            discontinuities.push((i, j));
                        }
                    }
                }
            }
        }
    }
    Ok(RulebaseReport { complete, conflicts, redundant, discontinuities })
}
