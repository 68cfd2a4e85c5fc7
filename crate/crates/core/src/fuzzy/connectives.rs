//! Fuzzy connectives: t-norms, t-conorms, negations and implications.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TNorm {
    Min,
    Algebraic,
    Lukasiewicz,
    Drastic,
}

impl TNorm {
    pub fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            TNorm::Min => a.min(b),
            TNorm::Algebraic => a * b,
            TNorm::Lukasiewicz => (a + b - 1.0).max(0.0),
            TNorm::Drastic => {
                if a == 1.0 {
                    b
                } else if b == 1.0 {
                    a
                } else {
                    0.0
                }
            }
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "min" => Ok(TNorm::Min),
            "algebraic" => Ok(TNorm::Algebraic),
            "lukasiewicz" => Ok(TNorm::Lukasiewicz),
            "drastic" => Ok(TNorm::Drastic),
            other => Err(Error::Config(format!("unknown t-norm {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SNorm {
    Max,
    Algebraic,
    Lukasiewicz,
    Drastic,
}

impl SNorm {
    pub fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            SNorm::Max => a.max(b),
            SNorm::Algebraic => a + b - a * b,
            SNorm::Lukasiewicz => (a + b).min(1.0),
            SNorm::Drastic => {
                if a == 0.0 {
                    b
                } else if b == 0.0 {
                    a
                } else {
                    1.0
                }
            }
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "max" => Ok(SNorm::Max),
            "algebraic" => Ok(SNorm::Algebraic),
            "lukasiewicz" => Ok(SNorm::Lukasiewicz),
            "drastic" => Ok(SNorm::Drastic),
            other => Err(Error::Config(format!("unknown t-conorm {other:?}"))),
        }
    }

    /// The t-norm this conorm is dual to under the standard negation.
    pub fn dual(self) -> TNorm {
        match self {
            SNorm::Max => TNorm::Min,
            SNorm::Algebraic => TNorm::Algebraic,
            SNorm::Lukasiewicz => TNorm::Lukasiewicz,
            SNorm::Drastic => TNorm::Drastic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Negation {
    Zadeh,
    /// Yager class, parameter p > 0.
    Yager(f64),
    /// Sugeno class, parameter lambda > -1; lambda = 0 is the Zadeh negation.
    Sugeno(f64),
}

impl Negation {
    pub fn apply(self, a: f64) -> f64 {
        match self {
            Negation::Zadeh => 1.0 - a,
            Negation::Yager(p) => (1.0 - a.powf(p)).max(0.0).powf(1.0 / p),
            Negation::Sugeno(l) => (1.0 - a) / (1.0 + l * a),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Implication {
    KleeneDienes,
    Lukasiewicz,
    Reichenbach,
    Fodor,
    Godel,
}

impl Implication {
    pub fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            Implication::KleeneDienes => (1.0 - a).max(b),
            Implication::Lukasiewicz => (1.0 - a + b).min(1.0),
            Implication::Reichenbach => 1.0 - a + a * b,
            Implication::Fodor => {
                if a <= b {
                    1.0
                } else {
                    (1.0 - a).max(b)
                }
            }
            Implication::Godel => {
                if a <= b {
                    1.0
                } else {
                    b
                }
            }
        }
    }

    pub const ALL: [Implication; 5] = [
        Implication::KleeneDienes,
        Implication::Lukasiewicz,
        Implication::Reichenbach,
        Implication::Fodor,
        Implication::Godel,
    ];
}
