//! Confusion-matrix metrics, ROC curves and dataset-level evaluation.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    pub false_neg: u64,
    pub tn: u64,
}

impl ConfusionMatrix {
    pub fn new(tp: u64, fp: u64, false_neg: u64, tn: u64) -> Self {
        ConfusionMatrix { tp, fp, false_neg, tn }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.false_neg + self.tn
    }
}

/// Metric values as fractions in [0, 1]; `None` when the denominator is zero
/// (undefined, deliberately not reported as 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub accuracy: Option<f64>,
    pub precision: Option<f64>,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub f_beta: Option<f64>,
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    if den == 0.0 {
        None
    } else {
        Some(num / den)
    }
}

/// Classification quality metrics from a confusion matrix.
///
/// F_beta = (1+beta^2)*TP / ((1+beta^2)*TP + beta^2*FN + FP).
pub fn metrics(cm: &ConfusionMatrix, beta: f64) -> Metrics {
    let (tp, fp, fn_, tn) = (
        cm.tp as f64,
        cm.fp as f64,
        cm.false_neg as f64,
        cm.tn as f64,
    );
    let b2 = beta * beta;
    Metrics {
        accuracy: ratio(tp + tn, tp + tn + fp + fn_),
        precision: ratio(tp, tp + fp),
        sensitivity: ratio(tp, tp + fn_),
        specificity: ratio(tn, tn + fp),
        f_beta: ratio((1.0 + b2) * tp, (1.0 + b2) * tp + b2 * fn_ + fp),
    }
}

/// Round a fraction to a percentage with two decimals (report formatting).
pub fn percent2(fraction: f64) -> f64 {
    (fraction * 10000.0).round() / 100.0
}

/// ROC curve over all score thresholds plus the trapezoid-rule AUC.
///
/// Input: one `(score, is_positive)` pair per sample; higher scores mean
/// "more positive". Returns points `(1 - specificity, sensitivity)` sorted
/// from (0,0) to (1,1).
pub fn roc_curve(scores: &[(f64, bool)]) -> Result<(Vec<(f64, f64)>, f64)> {
    let pos = scores.iter().filter(|(_, l)| *l).count();
    let neg = scores.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::Invalid(
            "ROC needs both positive and negative samples".into(),
        ));
    }
    let mut sorted: Vec<(f64, bool)> = scores.to_vec();
    sorted.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());

    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut i = 0;
    while i < sorted.len() {
        // Consume all samples tied at this score before emitting a point.
        let score = sorted[i].0;
        while i < sorted.len() && sorted[i].0 == score {
            if sorted[i].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push((fp as f64 / neg as f64, tp as f64 / pos as f64));
    }

    let mut auc = 0.0;
    for w in points.windows(2) {
        let (x0, y0) = w[0];
        let (x1, y1) = w[1];
        auc += (x1 - x0) * (y0 + y1) / 2.0;
    }
    Ok((points, auc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reference_confusion_matrix() {
        let m = metrics(&ConfusionMatrix::new(30, 2, 0, 38), 1.0);
        assert_eq!(percent2(m.accuracy.unwrap()), 97.14);
        assert_eq!(percent2(m.precision.unwrap()), 93.75);
        assert_eq!(percent2(m.sensitivity.unwrap()), 100.0);
        assert_eq!(percent2(m.specificity.unwrap()), 95.0);
        assert_relative_eq!(m.f_beta.unwrap(), 60.0 / 62.0, epsilon = 1e-12);
    }

    #[test]
    fn all_ones_matrix() {
        let m = metrics(&ConfusionMatrix::new(1, 1, 1, 1), 1.0);
        assert_eq!(m.accuracy, Some(0.5));
    }

    #[test]
    fn zero_denominators_are_undefined() {
        let m = metrics(&ConfusionMatrix::new(0, 0, 0, 5), 1.0);
        assert_eq!(m.precision, None);
        assert_eq!(m.sensitivity, None);
        assert!(m.specificity.is_some());
        let m = metrics(&ConfusionMatrix::new(0, 0, 0, 0), 1.0);
        assert_eq!(m.accuracy, None);
    }

    #[test]
    fn accuracy_identity() {
        // accuracy == (sens*P + spec*N) / (P+N) whenever both are defined.
        for (tp, fp, fn_, tn) in [(3, 1, 2, 4), (10, 0, 5, 5), (1, 9, 1, 9)] {
            let cm = ConfusionMatrix::new(tp, fp, fn_, tn);
            let m = metrics(&cm, 1.0);
            let p = (tp + fn_) as f64;
            let n = (tn + fp) as f64;
            let lhs = m.accuracy.unwrap();
            let rhs = (m.sensitivity.unwrap() * p + m.specificity.unwrap() * n) / (p + n);
            assert_relative_eq!(lhs, rhs, epsilon = 1e-12);
        }
    }

    #[test]
    fn roc_perfect_and_reversed() {
        let perfect: Vec<(f64, bool)> =
            (0..20).map(|i| (i as f64, i >= 10)).collect();
        let (points, auc) = roc_curve(&perfect).unwrap();
        assert_eq!(auc, 1.0);
        assert_eq!(*points.last().unwrap(), (1.0, 1.0));

        let reversed: Vec<(f64, bool)> =
            (0..20).map(|i| (-(i as f64), i >= 10)).collect();
        let (_, auc) = roc_curve(&reversed).unwrap();
        assert_eq!(auc, 0.0);
    }

    #[test]
    fn roc_is_monotone() {
        let scores: Vec<(f64, bool)> = (0..100)
            .map(|i| (((i * 37) % 100) as f64 / 100.0, i % 3 == 0))
            .collect();
        let (points, auc) = roc_curve(&scores).unwrap();
        for w in points.windows(2) {
            assert!(w[1].0 >= w[0].0 && w[1].1 >= w[0].1);
        }
        assert!((0.0..=1.0).contains(&auc));
    }

    #[test]
    fn roc_single_class_errors() {
        let scores = vec![(0.1, true), (0.5, true)];
        assert!(roc_curve(&scores).is_err());
    }
}
