//! Supervised back-ends: k-nearest-neighbour and a linear SVM trained with
//! stochastic sub-gradient descent, both over z-score standardized features.

use crate::error::{Error, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Per-dimension z-score standardization fitted on a training set.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    /// Fit on row-major samples. Constant dimensions get unit scale so they
    /// map to zero instead of NaN.
    pub fn fit(samples: &[Vec<f64>]) -> Result<Self> {
        let n = samples.len();
        if n == 0 {
            return Err(Error::InsufficientData("no samples to standardize".into()));
        }
        let dim = samples[0].len();
        let mut mean = vec![0.0; dim];
        for s in samples {
            if s.len() != dim {
                return Err(Error::Dimension("ragged sample matrix".into()));
            }
            for (m, v) in mean.iter_mut().zip(s) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= n as f64;
        }
        let mut std = vec![0.0; dim];
        for s in samples {
            for ((sd, v), m) in std.iter_mut().zip(s).zip(&mean) {
                *sd += (v - m).powi(2);
            }
        }
        for sd in &mut std {
            *sd = (*sd / n as f64).sqrt();
            if *sd < 1e-12 {
                *sd = 1.0;
            }
        }
        Ok(Self { mean, std })
    }

    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.mean)
            .zip(&self.std)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }
}

/// k-nearest-neighbour classifier with Euclidean distance; distance ties are
/// broken by the lower training-sample index, class ties by the lower label.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    pub k: usize,
    pub standardizer: Standardizer,
    /// Standardized training samples.
    pub samples: Vec<Vec<f64>>,
    pub labels: Vec<u8>,
}

impl KnnModel {
    pub fn fit(samples: &[Vec<f64>], labels: &[u8], k: usize) -> Result<Self> {
        if samples.len() != labels.len() {
            return Err(Error::Dimension("samples/labels length mismatch".into()));
        }
        if samples.len() < k || k == 0 {
            return Err(Error::InsufficientData(format!(
                "need at least k={k} samples, got {}",
                samples.len()
            )));
        }
        let standardizer = Standardizer::fit(samples)?;
        let samples = samples.iter().map(|s| standardizer.transform(s)).collect();
        Ok(Self { k, standardizer, samples, labels: labels.to_vec() })
    }

    pub fn predict(&self, x: &[f64]) -> u8 {
        let z = self.standardizer.transform(x);
        let mut dists: Vec<(f64, usize)> = self
            .samples
            .iter()
            .enumerate()
            .map(|(i, s)| (euclidean(&z, s), i))
            .collect();
        dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut votes = std::collections::BTreeMap::new();
        for &(_, i) in dists.iter().take(self.k) {
            *votes.entry(self.labels[i]).or_insert(0usize) += 1;
        }
        // BTreeMap iteration is ordered by label, so max_by on count keeps
        // the lowest label on ties.
        votes
            .iter()
            .rev()
            .max_by_key(|(_, &c)| c)
            .map(|(&l, _)| l)
            .unwrap()
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Linear soft-margin SVM trained with the Pegasos stochastic sub-gradient
/// scheme on standardized features.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub standardizer: Standardizer,
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl SvmModel {
    /// Labels are 0/1; internally mapped to -1/+1.
    pub fn fit(
        samples: &[Vec<f64>],
        labels: &[u8],
        c: f64,
        epochs: usize,
        seed: u64,
    ) -> Result<Self> {
        if samples.len() != labels.len() {
            return Err(Error::Dimension("samples/labels length mismatch".into()));
        }
        if samples.len() < 2 {
            return Err(Error::InsufficientData("need at least two samples".into()));
        }
        let standardizer = Standardizer::fit(samples)?;
        let xs: Vec<Vec<f64>> = samples.iter().map(|s| standardizer.transform(s)).collect();
        let ys: Vec<f64> = labels.iter().map(|&l| if l == 0 { -1.0 } else { 1.0 }).collect();
        let dim = xs[0].len();
        let lambda = 1.0 / (c * xs.len() as f64);

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut w = vec![0.0; dim];
        let mut bias = 0.0;
        let mut order: Vec<usize> = (0..xs.len()).collect();
        let mut t = 0usize;
        for _ in 0..epochs {
            order.shuffle(&mut rng);
            for &i in &order {
                t += 1;
                let eta = 1.0 / (lambda * t as f64);
                let margin = ys[i] * (dot(&w, &xs[i]) + bias);
                for wj in w.iter_mut() {
                    *wj *= 1.0 - eta * lambda;
                }
                if margin < 1.0 {
                    for (wj, xj) in w.iter_mut().zip(&xs[i]) {
                        *wj += eta * ys[i] * xj;
                    }
                    bias += eta * ys[i];
                }
            }
        }
        Ok(Self { standardizer, weights: w, bias })
    }

    pub fn decision(&self, x: &[f64]) -> f64 {
        let z = self.standardizer.transform(x);
        dot(&self.weights, &z) + self.bias
    }

    pub fn predict(&self, x: &[f64]) -> u8 {
        (self.decision(x) > 0.0) as u8
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Plain-text model container; one `key value...` record per line.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Knn(KnnModel),
    Svm(SvmModel),
}

impl Model {
    pub fn predict(&self, x: &[f64]) -> u8 {
        match self {
            Model::Knn(m) => m.predict(x),
            Model::Svm(m) => m.predict(x),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let push_vec = |out: &mut String, key: &str, v: &[f64]| {
            out.push_str(key);
            for x in v {
                out.push_str(&format!(" {x:.17e}"));
            }
            out.push('\n');
        };
        match self {
            Model::Knn(m) => {
                out.push_str("model knn\n");
                out.push_str(&format!("k {}\n", m.k));
                push_vec(&mut out, "mean", &m.standardizer.mean);
                push_vec(&mut out, "std", &m.standardizer.std);
                for (s, l) in m.samples.iter().zip(&m.labels) {
                    push_vec(&mut out, &format!("sample {l}"), s);
                }
            }
            Model::Svm(m) => {
                out.push_str("model svm\n");
                push_vec(&mut out, "mean", &m.standardizer.mean);
                push_vec(&mut out, "std", &m.standardizer.std);
                push_vec(&mut out, "weights", &m.weights);
                out.push_str(&format!("bias {:.17e}\n", m.bias));
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut kind = None;
        let mut k = None;
        let (mut mean, mut std, mut weights, mut bias) = (None, None, None, None);
        let mut samples = Vec::new();
        let mut labels = Vec::new();
        let parse_vec = |fields: &[&str]| -> Result<Vec<f64>> {
            fields
                .iter()
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|e| Error::Format(format!("bad number {f:?}: {e}")))
                })
                .collect()
        };
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields[0] {
                "model" => kind = Some(fields.get(1).copied().unwrap_or("").to_string()),
                "k" => {
                    k = Some(fields.get(1).and_then(|f| f.parse().ok()).ok_or_else(
                        || Error::Parse { row: ln, msg: "bad k".into() },
                    )?)
                }
                "mean" => mean = Some(parse_vec(&fields[1..])?),
                "std" => std = Some(parse_vec(&fields[1..])?),
                "weights" => weights = Some(parse_vec(&fields[1..])?),
                "bias" => {
                    bias = Some(fields.get(1).and_then(|f| f.parse().ok()).ok_or_else(
                        || Error::Parse { row: ln, msg: "bad bias".into() },
                    )?)
                }
                "sample" => {
                    let l = fields.get(1).and_then(|f| f.parse().ok()).ok_or_else(|| {
                        Error::Parse { row: ln, msg: "bad sample label".into() }
                    })?;
                    labels.push(l);
                    samples.push(parse_vec(&fields[2..])?);
                }
                other => {
                    return Err(Error::Parse { row: ln, msg: format!("unknown key {other:?}") })
                }
            }
        }
        let standardizer = Standardizer {
            mean: mean.ok_or_else(|| Error::Format("missing mean".into()))?,
            std: std.ok_or_else(|| Error::Format("missing std".into()))?,
        };
        match kind.as_deref() {
            Some("knn") => Ok(Model::Knn(KnnModel {
                k: k.ok_or_else(|| Error::Format("missing k".into()))?,
                standardizer,
                samples,
                labels,
            })),
            Some("svm") => Ok(Model::Svm(SvmModel {
                standardizer,
                weights: weights.ok_or_else(|| Error::Format("missing weights".into()))?,
                bias: bias.ok_or_else(|| Error::Format("missing bias".into()))?,
            })),
            other => Err(Error::Format(format!("unknown model kind {other:?}"))),
        }
    }
}
