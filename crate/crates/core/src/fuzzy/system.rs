//! Mamdani and zeroth-order Takagi-Sugeno inference engines.

use crate::error::{Error, Result};
use crate::fuzzy::connectives::{SNorm, TNorm};
use crate::fuzzy::rules::{Rule, Variable};

/// Number of samples of the output universe used for aggregation and
/// centroid defuzzification.
pub const DEFUZZ_GRID: usize = 201;

/// A rule with antecedent atoms resolved to (input index, term index).
#[derive(Debug, Clone)]
struct CompiledRule {
    atoms: Vec<(usize, usize)>,
    /// Term index in the output variable (Mamdani) or crisp level (TSK).
    cons_term: usize,
    cons_crisp: f64,
}

fn compile(
    inputs: &[Variable],
    output: &Variable,
    rules: &[Rule],
    need_crisp: bool,
) -> Result<Vec<CompiledRule>> {
    rules
        .iter()
        .map(|r| {
            let atoms = r
                .antecedents
                .iter()
                .map(|(var, term)| {
                    let vi = inputs
                        .iter()
                        .position(|v| &v.name == var)
                        .ok_or_else(|| Error::Invalid(format!("unknown input {var:?}")))?;
                    let ti = inputs[vi]
                        .terms
                        .iter()
                        .position(|t| &t.name == term)
                        .ok_or_else(|| Error::Invalid(format!("unknown term {var}.{term}")))?;
                    Ok((vi, ti))
                })
                .collect::<Result<Vec<_>>>()?;
            if r.consequent.0 != output.name {
                return Err(Error::Invalid(format!(
                    "consequent variable {:?} is not the output {:?}",
                    r.consequent.0, output.name
                )));
            }
            let cons_term = output
                .terms
                .iter()
                .position(|t| t.name == r.consequent.1)
                .ok_or_else(|| {
                    Error::Invalid(format!("unknown output term {:?}", r.consequent.1))
                })?;
            let cons_crisp = if need_crisp {
                output.terms[cons_term].mf.crisp().ok_or_else(|| {
                    Error::Invalid(format!(
                        "output term {:?} is not a crisp singleton/constant",
                        r.consequent.1
                    ))
                })?
            } else {
                0.0
            };
            Ok(CompiledRule { atoms, cons_term, cons_crisp })
        })
        .collect()
}

fn firing(inputs: &[Variable], rule: &CompiledRule, x: &[f64], tnorm: TNorm) -> f64 {
    rule.atoms.iter().fold(1.0, |acc, &(vi, ti)| {
        tnorm.apply(acc, inputs[vi].terms[ti].mf.eval(x[vi]))
    })
}

/// Mamdani system: min implication (clip), configurable conjunction and
/// aggregation, centroid defuzzification on a sampled output universe.
#[derive(Debug, Clone)]
pub struct MamdaniSystem {
    pub inputs: Vec<Variable>,
    pub output: Variable,
    pub tnorm: TNorm,
    pub snorm: SNorm,
    rules: Vec<CompiledRule>,
}

impl MamdaniSystem {
    pub fn new(
        inputs: Vec<Variable>,
        output: Variable,
        rules: &[Rule],
        tnorm: TNorm,
        snorm: SNorm,
    ) -> Result<Self> {
        if rules.is_empty() {
            return Err(Error::Invalid("empty rule base".into()));
        }
        let rules = compile(&inputs, &output, rules, false)?;
        Ok(Self { inputs, output, tnorm, snorm, rules })
    }

    /// Crisp inference; `x` is ordered like `self.inputs`. Fails when no rule
    /// fires (zero aggregated area).
    pub fn infer(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.inputs.len() {
            return Err(Error::Dimension(format!(
                "expected {} inputs, got {}",
                self.inputs.len(),
                x.len()
            )));
        }
        let strengths: Vec<f64> =
            self.rules.iter().map(|r| firing(&self.inputs, r, x, self.tnorm)).collect();
        let (lo, hi) = (self.output.lo, self.output.hi);
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..DEFUZZ_GRID {
            let y = lo + (hi - lo) * i as f64 / (DEFUZZ_GRID - 1) as f64;
            let mut agg = 0.0;
            for (r, &s) in self.rules.iter().zip(&strengths) {
                if s > 0.0 {
                    let clipped = s.min(self.output.terms[r.cons_term].mf.eval(y));
                    agg = self.snorm.apply(agg, clipped);
                }
            }
            num += y * agg;
            den += agg;
        }
        if den <= 0.0 {
            return Err(Error::Degenerate("no rule fired".into()));
        }
        Ok(num / den)
    }
}

/// Zeroth-order Takagi-Sugeno system: crisp consequent levels combined by the
/// firing-strength-weighted average.
#[derive(Debug, Clone)]
pub struct TskSystem {
    pub inputs: Vec<Variable>,
    pub output: Variable,
    pub tnorm: TNorm,
    rules: Vec<CompiledRule>,
}

impl TskSystem {
    pub fn new(
        inputs: Vec<Variable>,
        output: Variable,
        rules: &[Rule],
        tnorm: TNorm,
    ) -> Result<Self> {
        if rules.is_empty() {
            return Err(Error::Invalid("empty rule base".into()));
        }
        let rules = compile(&inputs, &output, rules, true)?;
        Ok(Self { inputs, output, tnorm, rules })
    }

    pub fn infer(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.inputs.len() {
            return Err(Error::Dimension(format!(
                "expected {} inputs, got {}",
                self.inputs.len(),
                x.len()
            )));
        }
        let mut num = 0.0;
        let mut den = 0.0;
        for r in &self.rules {
            let s = firing(&self.inputs, r, x, self.tnorm);
            num += s * r.cons_crisp;
            den += s;
        }
        if den <= 0.0 {
            return Err(Error::Degenerate("no rule fired".into()));
        }
        Ok(num / den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuzzy::mf::Mf;
    use crate::fuzzy::rules::parse_rules;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn heater() -> MamdaniSystem {
        let temp = Variable::new(
            "temp",
            0.0,
            40.0,
            vec![
                ("Cold", Mf::L { a: 10.0, b: 20.0 }),
                ("Warm", Mf::Tri { a: 10.0, b: 20.0, c: 30.0 }),
                ("Hot", Mf::Gamma { a: 20.0, b: 30.0 }),
            ],
        );
        let power = Variable::new(
            "power",
            0.0,
            1.0,
            vec![
                ("Low", Mf::Tri { a: 0.0, b: 1.0 / 6.0, c: 0.5 }),
                ("Mid", Mf::Tri { a: 1.0 / 6.0, b: 0.5, c: 5.0 / 6.0 }),
                ("High", Mf::Tri { a: 0.5, b: 5.0 / 6.0, c: 1.0 }),
            ],
        );
        let rules = parse_rules(
            "IF temp IS Hot THEN power IS Low\n\
             IF temp IS Warm THEN power IS Mid\n\
             IF temp IS Cold THEN power IS High\n",
        )
        .unwrap();
        MamdaniSystem::new(vec![temp], power, &rules, TNorm::Min, SNorm::Max).unwrap()
    }

    #[test]
    fn single_full_rule_centroid() {
        let sys = heater();
        // Only "Cold" fires at full strength: centroid of tri(0.5, 5/6, 1).
        let y = sys.infer(&[0.0]).unwrap();
        assert_relative_eq!(y, (0.5 + 5.0 / 6.0 + 1.0) / 3.0, epsilon = 2e-3);
        // Only "Warm" fires: symmetric triangle centred at 0.5.
        assert_relative_eq!(sys.infer(&[20.0]).unwrap(), 0.5, epsilon = 1e-9);
    }

    #[test]
    fn output_is_monotone_in_temperature() {
        let sys = heater();
        let mut prev = f64::INFINITY;
        for i in 0..=40 {
            let y = sys.infer(&[i as f64]).unwrap();
            assert!(y <= prev + 1e-9, "power rose with temperature at {i}");
            prev = y;
        }
    }

    #[test]
    fn centroid_stays_in_universe() {
        let sys = heater();
        for i in 0..=80 {
            let y = sys.infer(&[i as f64 * 0.5]).unwrap();
            assert!((sys.output.lo..=sys.output.hi).contains(&y));
        }
    }

    #[test]
    fn no_firing_is_an_error() {
        let temp = Variable::new(
            "temp",
            0.0,
            40.0,
            vec![("Cold", Mf::Tri { a: 0.0, b: 5.0, c: 10.0 })],
        );
        let power = Variable::new(
            "power",
            0.0,
            1.0,
            vec![("Low", Mf::Tri { a: 0.0, b: 0.5, c: 1.0 })],
        );
        let rules = parse_rules("IF temp IS Cold THEN power IS Low\n").unwrap();
        let sys = MamdaniSystem::new(vec![temp], power, &rules, TNorm::Min, SNorm::Max).unwrap();
        assert!(sys.infer(&[30.0]).is_err());
    }

    #[test]
    fn wrong_arity_is_an_error() {
        let sys = heater();
        assert!(sys.infer(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn unknown_rule_names_fail_construction() {
        let temp = Variable::new("temp", 0.0, 1.0, vec![("A", Mf::Const { v: 1.0 })]);
        let out = Variable::new("y", 0.0, 1.0, vec![("B", Mf::Const { v: 1.0 })]);
        let rules = parse_rules("IF temp IS Zz THEN y IS B\n").unwrap();
        assert!(
            MamdaniSystem::new(vec![temp], out, &rules, TNorm::Min, SNorm::Max).is_err()
        );
    }

    fn tsk_gate() -> TskSystem {
        let x = Variable::new(
            "x",
            0.0,
            1.0,
            vec![
                ("Lo", Mf::L { a: 0.2, b: 0.8 }),
                ("Hi", Mf::Gamma { a: 0.2, b: 0.8 }),
            ],
        );
        let y = Variable::new(
            "y",
            0.0,
            1.0,
            vec![("Off", Mf::Const { v: 0.0 }), ("On", Mf::Const { v: 1.0 })],
        );
        let rules = parse_rules("IF x IS Lo THEN y IS Off\nIF x IS Hi THEN y IS On\n").unwrap();
        TskSystem::new(vec![x], y, &rules, TNorm::Min).unwrap()
    }

    #[test]
    fn tsk_weighted_average() {
        let sys = tsk_gate();
        assert_eq!(sys.infer(&[0.0]).unwrap(), 0.0);
        assert_eq!(sys.infer(&[1.0]).unwrap(), 1.0);
        assert_relative_eq!(sys.infer(&[0.5]).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn tsk_requires_crisp_consequents() {
        let x = Variable::new("x", 0.0, 1.0, vec![("Lo", Mf::Const { v: 1.0 })]);
        let y = Variable::new(
            "y",
            0.0,
            1.0,
            vec![("Fuzzy", Mf::Tri { a: 0.0, b: 0.5, c: 1.0 })],
        );
        let rules = parse_rules("IF x IS Lo THEN y IS Fuzzy\n").unwrap();
        assert!(TskSystem::new(vec![x], y, &rules, TNorm::Min).is_err());
    }

    proptest! {
        #[test]
        fn tsk_output_bounded_by_consequents(x in 0.0f64..=1.0) {
            let sys = tsk_gate();
            let y = sys.infer(&[x]).unwrap();
            prop_assert!((0.0..=1.0).contains(&y));
        }

        #[test]
        fn mamdani_centroid_in_universe(t in 0.0f64..=40.0) {
            let sys = heater();
            let y = sys.infer(&[t]).unwrap();
            prop_assert!((sys.output.lo..=sys.output.hi).contains(&y));
        }
    }
}
