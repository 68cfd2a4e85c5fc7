//! Membership function shapes with a compact text syntax.

use crate::error::{Error, Result};

/// A membership function over the reals, valued in [0, 1] (except `Const`,
/// which carries an arbitrary crisp level for zeroth-order Takagi-Sugeno
/// consequents).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mf {
    /// Triangle rising on [a, b], falling on [b, c].
    Tri { a: f64, b: f64, c: f64 },
    /// Trapezoid with plateau [b, c].
    Trap { a: f64, b: f64, c: f64, d: f64 },
    /// Gaussian bell centred at `mean`.
    Gauss { mean: f64, std: f64 },
    /// Left shoulder: 1 up to `a`, linear down to 0 at `b`.
    L { a: f64, b: f64 },
    /// Right shoulder: 0 up to `a`, linear up to 1 at `b`.
    Gamma { a: f64, b: f64 },
    /// 1 exactly at `x`, 0 elsewhere.
    Singleton { x: f64 },
    /// Constant level `v` everywhere.
    Const { v: f64 },
}

fn ramp_up(x: f64, a: f64, b: f64) -> f64 {
    if x <= a {
        0.0
    } else if x >= b {
        1.0
    } else {
        (x - a) / (b - a)
    }
}

impl Mf {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Mf::Tri { a, b, c } => {
                if x <= a || x >= c {
                    // Degenerate shoulders keep their peak value.
                    if (x == a && a == b) || (x == c && b == c) {
                        1.0
                    } else {
                        0.0
                    }
                } else if x <= b {
                    ramp_up(x, a, b).min(1.0)
                } else {
                    1.0 - ramp_up(x, b, c)
                }
            }
            Mf::Trap { a, b, c, d } => {
                if x < b {
                    ramp_up(x, a, b)
                } else if x <= c {
                    1.0
                } else {
                    1.0 - ramp_up(x, c, d)
                }
            }
            Mf::Gauss { mean, std } => (-((x - mean) / std).powi(2) / 2.0).exp(),
            Mf::L { a, b } => 1.0 - ramp_up(x, a, b),
            Mf::Gamma { a, b } => ramp_up(x, a, b),
            Mf::Singleton { x: x0 } => (x == x0) as u8 as f64,
            Mf::Const { v } => v,
        }
    }

    /// Representative crisp level, defined only for singleton/constant shapes
    /// (zeroth-order Takagi-Sugeno consequents).
    pub fn crisp(&self) -> Option<f64> {
        match *self {
            Mf::Singleton { x } => Some(x),
            Mf::Const { v } => Some(v),
            _ => None,
        }
    }

    /// Parse `"<shape> <params...>"`, e.g. `"tri 0 0.5 1"`.
    pub fn parse(text: &str) -> Result<Self> {
        let fields: Vec<&str> = text.split_whitespace().collect();
        let bad = |msg: &str| Error::Format(format!("membership function {text:?}: {msg}"));
        let num = |i: usize| -> Result<f64> {
            fields
                .get(i)
                .and_then(|f| f.parse().ok())
                .ok_or_else(|| bad("missing or non-numeric parameter"))
        };
        let arity = |n: usize| -> Result<()> {
            if fields.len() == n + 1 {
                Ok(())
            } else {
                Err(bad(&format!("expected {n} parameters")))
            }
        };
        let mf = match *fields.first().ok_or_else(|| bad("empty"))? {
            "tri" => {
                arity(3)?;
                let (a, b, c) = (num(1)?, num(2)?, num(3)?);
                if !(a <= b && b <= c && a < c) {
                    return Err(bad("requires a <= b <= c with a < c"));
                }
                Mf::Tri { a, b, c }
            }
            "trap" => {
                arity(4)?;
                let (a, b, c, d) = (num(1)?, num(2)?, num(3)?, num(4)?);
                if !(a <= b && b <= c && c <= d && a < d) {
                    return Err(bad("requires a <= b <= c <= d with a < d"));
                }
                Mf::Trap { a, b, c, d }
            }
            "gauss" => {
                arity(2)?;
                let (mean, std) = (num(1)?, num(2)?);
                if std <= 0.0 {
                    return Err(bad("std must be positive"));
                }
                Mf::Gauss { mean, std }
            }
            "l" => {
                arity(2)?;
                let (a, b) = (num(1)?, num(2)?);
                if a >= b {
                    return Err(bad("requires a < b"));
                }
                Mf::L { a, b }
            }
            "gamma" => {
                arity(2)?;
                let (a, b) = (num(1)?, num(2)?);
                if a >= b {
                    return Err(bad("requires a < b"));
                }
                Mf::Gamma { a, b }
            }
            "singleton" => {
                arity(1)?;
                Mf::Singleton { x: num(1)? }
            }
            "const" => {
                arity(1)?;
                Mf::Const { v: num(1)? }
            }
            other => return Err(bad(&format!("unknown shape {other:?}"))),
        };
        Ok(mf)
    }

    pub fn to_text(&self) -> String {
        match *self {
            Mf::Tri { a, b, c } => format!("tri {a} {b} {c}"),
            Mf::Trap { a, b, c, d } => format!("trap {a} {b} {c} {d}"),
            Mf::Gauss { mean, std } => format!("gauss {mean} {std}"),
            Mf::L { a, b } => format!("l {a} {b}"),
            Mf::Gamma { a, b } => format!("gamma {a} {b}"),
            Mf::Singleton { x } => format!("singleton {x}"),
            Mf::Const { v } => format!("const {v}"),
        }
    }
}
