//! Classification metrics: accuracy, macro-averaged precision/recall/F1,
//! and a row-normalized confusion matrix.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub classes: Vec<String>,
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    /// confusion[true][pred], each row normalized to sum 1 (zero rows stay
    /// zero).
    pub confusion: Vec<Vec<f64>>,
    /// Classes with no true instances, excluded from the macro averages.
    pub absent_classes: Vec<String>,
}

/// Compute metrics over parallel truth/prediction label slices. `classes`
/// fixes the confusion-matrix order; predictions outside it are a bug.
pub fn evaluate(classes: &[String], truth: &[String], predicted: &[String]) -> MetricsReport {
    assert_eq!(truth.len(), predicted.len());
    let idx = |l: &String| classes.iter().position(|c| c == l).expect("unknown label");
    let e = classes.len();
    let mut counts = vec![vec![0.0_f64; e]; e];
    for (t, p) in truth.iter().zip(predicted) {
        counts[idx(t)][idx(p)] += 1.0;
    }
    let correct: f64 = (0..e).map(|c| counts[c][c]).sum();
    let accuracy = if truth.is_empty() {
        0.0
    } else {
        correct / truth.len() as f64
    };

    let mut precisions = Vec::new();
    let mut recalls = Vec::new();
    let mut f1s = Vec::new();
    let mut absent = Vec::new();
    for c in 0..e {
        let tp = counts[c][c];
        let support: f64 = counts[c].iter().sum();
        if support == 0.0 {
            absent.push(classes[c].clone());
            continue;
        }
        let predicted_c: f64 = (0..e).map(|t| counts[t][c]).sum();
        let precision = if predicted_c > 0.0 { tp / predicted_c } else { 0.0 };
        let recall = tp / support;
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        precisions.push(precision);
        recalls.push(recall);
        f1s.push(f1);
    }
    let mean = |v: &[f64]| {
        if v.is_empty() {
            0.0
        } else {
            v.iter().sum::<f64>() / v.len() as f64
        }
    };

    let confusion = counts
        .into_iter()
        .map(|row| {
            let s: f64 = row.iter().sum();
            if s > 0.0 {
                row.into_iter().map(|v| v / s).collect()
            } else {
                row
            }
        })
        .collect();

    MetricsReport {
        classes: classes.to_vec(),
        accuracy,
        macro_precision: mean(&precisions),
        macro_recall: mean(&recalls),
        macro_f1: mean(&f1s),
        confusion,
        absent_classes: absent,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn hand_computed_binary_case() {
        // truth:    a a a b b
        // predicted a a b b a
        let classes = s(&["a", "b"]);
        let r = evaluate(&classes, &s(&["a", "a", "a", "b", "b"]), &s(&["a", "a", "b", "b", "a"]));
        assert!((r.accuracy - 0.6).abs() < 1e-12);
        // a: tp 2, fp 1, fn 1 -> p 2/3, r 2/3, f1 2/3
        // b: tp 1, fp 1, fn 1 -> p 1/2, r 1/2, f1 1/2
        assert!((r.macro_precision - (2.0 / 3.0 + 0.5) / 2.0).abs() < 1e-12);
        assert!((r.macro_recall - (2.0 / 3.0 + 0.5) / 2.0).abs() < 1e-12);
        assert!((r.macro_f1 - (2.0 / 3.0 + 0.5) / 2.0).abs() < 1e-12);
        assert!((r.confusion[0][0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.confusion[1][1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn perfect_predictions() {
        let classes = s(&["x", "y", "z"]);
        let t = s(&["x", "y", "z", "x"]);
        let r = evaluate(&classes, &t, &t);
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.macro_f1, 1.0);
    }

    #[test]
    fn absent_class_excluded_from_macro() {
        let classes = s(&["a", "b", "c"]);
        let r = evaluate(&classes, &s(&["a", "b"]), &s(&["a", "b"]));
        assert_eq!(r.absent_classes, s(&["c"]));
        assert_eq!(r.macro_f1, 1.0);
    }

    #[test]
    fn confusion_rows_normalized() {
        let classes = s(&["a", "b"]);
        let r = evaluate(
            &classes,
            &s(&["a", "a", "a", "a", "b"]),
            &s(&["a", "b", "b", "b", "b"]),
        );
        for row in &r.confusion {
            let sum: f64 = row.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
    }
}
