//! The coalition value function: interventional expectation over a
//! background sample.

use crate::classifiers::{predict_proba, Table, TrainedModel};

use super::ExplainError;

/// Evaluates coalitions for one target class of one model against a fixed
/// background of reference rows.
pub struct ValueFunction<'a> {
    pub model: &'a TrainedModel,
    /// Index into `model.classes`.
    pub target_class: usize,
    /// Reference rows; columns in model order. Must be non-empty.
    pub background: &'a [Vec<f64>],
}

impl<'a> ValueFunction<'a> {
    pub fn new(
        model: &'a TrainedModel,
        target_class: usize,
        background: &'a [Vec<f64>],
    ) -> Result<ValueFunction<'a>, ExplainError> {
        if background.is_empty() {
            return Err(ExplainError::EmptyInput);
        }
        let d = model.columns.len();
        if background.iter().any(|b| b.len() != d) {
            return Err(ExplainError::SchemaMismatch {
                detail: format!("background rows must have {d} columns"),
            });
        }
        Ok(ValueFunction {
            model,
            target_class,
            background,
        })
    }

    pub fn n_cols(&self) -> usize {
        self.model.columns.len()
    }
}

/// v(S): mean over background rows of the target-class probability on the
/// hybrid sample taking `x`'s values on the member columns and the
/// background row's values elsewhere. `members[k]` marks column k in S.
pub fn coalition_value(
    vf: &ValueFunction<'_>,
    x: &[f64],
    members: &[bool],
) -> Result<f64, ExplainError> {
    let d = vf.n_cols();
    if x.len() != d || members.len() != d {
        return Err(ExplainError::SchemaMismatch {
            detail: format!("sample/mask length must be {d}"),
        });
    }
    let hybrids: Vec<Vec<f64>> = vf
        .background
        .iter()
        .map(|b| {
            (0..d)
                .map(|j| if members[j] { x[j] } else { b[j] })
                .collect()
        })
        .collect();
    let table = Table::new(vf.model.columns.clone(), hybrids);
    let proba = predict_proba(vf.model, &table).map_err(|e| ExplainError::SchemaMismatch {
        detail: e.to_string(),
    })?;
    let sum: f64 = proba.iter().map(|p| p[vf.target_class]).sum();
    Ok(sum / vf.background.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::{train, ModelKind, ModelSpec};

    pub(crate) fn stump_model() -> TrainedModel {
        // Two features; feature 0 splits the classes, feature 1 is noise.
        let x = Table::new(
            vec!["a".into(), "b".into()],
            vec![vec![0.0, 5.0], vec![1.0, -5.0], vec![10.0, 5.0], vec![11.0, -5.0]],
        );
        let y = vec!["lo".into(), "lo".into(), "hi".into(), "hi".into()];
        train(&ModelSpec::new(ModelKind::DecisionTree, 0), &x, &y).unwrap()
    }

    #[test]
    fn full_coalition_is_model_output() {
        let m = stump_model();
        let background = vec![vec![0.0, 0.0], vec![10.0, 1.0]];
        let vf = ValueFunction::new(&m, 1, &background).unwrap();
        let x = vec![10.5, 3.0];
        let v = coalition_value(&vf, &x, &[true, true]).unwrap();
        let direct = predict_proba(&m, &Table::new(m.columns.clone(), vec![x.clone()])).unwrap();
        assert_eq!(v, direct[0][1]);
    }

    #[test]
    fn empty_coalition_is_base_value() {
        let m = stump_model();
        let background = vec![vec![0.0, 0.0], vec![10.0, 1.0]];
        let vf = ValueFunction::new(&m, 1, &background).unwrap();
        let v = coalition_value(&vf, &[123.0, 456.0], &[false, false]).unwrap();
        let probs = predict_proba(&m, &Table::new(m.columns.clone(), background.clone())).unwrap();
        let base = (probs[0][1] + probs[1][1]) / 2.0;
        assert_eq!(v, base);
    }

    #[test]
    fn hand_evaluated_hybrids() {
        // Stump splits on feature 0 at threshold ~5.5. Background rows are
        // one 'lo' point and one 'hi' point. Target class "hi" sorts
        // first, index 0. Coalition {0} with x on the 'hi' side: both
        // hybrids fall on the hi side regardless of the background
        // feature-1 value, so v = 1.
        let m = stump_model();
        let background = vec![vec![0.0, 0.0], vec![10.0, 1.0]];
        let vf = ValueFunction::new(&m, 0, &background).unwrap();
        let v = coalition_value(&vf, &[10.5, 3.0], &[true, false]).unwrap();
        assert_eq!(v, 1.0);
        // Coalition {1}: feature 0 comes from the background, one hybrid
        // lands per side, so v = 0.5.
        let v = coalition_value(&vf, &[10.5, 3.0], &[false, true]).unwrap();
        assert_eq!(v, 0.5);
    }

    #[test]
    fn shape_mismatch_rejected() {
        let m = stump_model();
        let background = vec![vec![0.0, 0.0]];
        let vf = ValueFunction::new(&m, 0, &background).unwrap();
        assert!(coalition_value(&vf, &[1.0], &[true, true]).is_err());
        assert!(ValueFunction::new(&m, 0, &[]).is_err());
    }
}
