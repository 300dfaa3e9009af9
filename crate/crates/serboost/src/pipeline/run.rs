//! The full run: corpus to features, the iterative loop, final retraining
//! on train + validation, a single test evaluation, and seeded repeats.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::acoustic_features::{
    extract_feature_vector, zscore_apply, zscore_fit, FeatureManifest, FeatureMatrix,
};
use crate::classifiers::{evaluate, grid_search, predict, train, MetricsReport, ModelKind, ModelSpec, Table};
use crate::dataset_io::{load_wav, partition_counts, scan_corpus, to_canonical};
use crate::feature_boosting::{build_boosted, pca_fit, CombinationReport, PrincipalBasis};
use crate::rng;

use super::audit::AuditLog;
use super::config::{config_hash, RunConfig};
use super::iterate::{converged, run_iteration, ConvergenceDecision, IterationState, SplitFrame};
use super::stats::{compare_metric_samples, TTestResult};
use super::PipelineError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedMetrics {
    pub seed: u64,
    pub accuracy: f64,
    pub macro_f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatSummary {
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    pub mean_macro_f1: f64,
    pub std_macro_f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonBlock {
    pub accuracy: TTestResult,
    pub macro_f1: TTestResult,
}

/// One complete pipeline execution under a single split seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeedRunOutcome {
    pub seed: u64,
    pub iterations: Vec<IterationState>,
    pub convergence: ConvergenceDecision,
    /// 1-based iteration whose validation macro F1 is maximal.
    pub chosen_iteration: usize,
    pub final_spec: ModelSpec,
    pub retained_features: Vec<String>,
    pub test_metrics: MetricsReport,
    pub audit_fitting_calls: usize,
    pub leakage_ok: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub config_hash: String,
    pub base_seed: u64,
    /// Deliberate deviations and conventions, stated for the reader.
    pub notes: Vec<String>,
    /// Full detail for the base seed.
    pub detail: SeedRunOutcome,
    pub repeats: Vec<SeedMetrics>,
    pub summary: RepeatSummary,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

fn subset_rows(m: &FeatureMatrix, rows: &[usize]) -> FeatureMatrix {
    FeatureMatrix {
        manifest_version: m.manifest_version.clone(),
        columns: m.columns.clone(),
        rows: rows.iter().map(|&i| m.rows[i].clone()).collect(),
        labels: rows.iter().map(|&i| m.labels[i].clone()).collect(),
        paths: rows.iter().map(|&i| m.paths[i].clone()).collect(),
    }
}

/// Stratified 80/10/10 row split with the shared largest-remainder
/// rounding; per-class seeded shuffles.
fn split_rows(labels: &[String], seed: u64) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    use rand::seq::SliceRandom;
    let mut classes: Vec<String> = labels.to_vec();
    classes.sort();
    classes.dedup();
    let mut train = Vec::new();
    let mut val = Vec::new();
    let mut test = Vec::new();
    for (ci, class) in classes.iter().enumerate() {
        let mut members: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter(|(_, l)| *l == class)
            .map(|(i, _)| i)
            .collect();
        let mut r = rng::stage_rng(seed, "stratified_split", ci as u64);
        members.shuffle(&mut r);
        let (n_train, n_val, _) = partition_counts(members.len());
        for (i, row) in members.into_iter().enumerate() {
            if i < n_train {
                train.push(row);
            } else if i < n_train + n_val {
                val.push(row);
            } else {
                test.push(row);
            }
        }
    }
    train.sort_unstable();
    val.sort_unstable();
    test.sort_unstable();
    (train, val, test)
}

fn concat(a: &FeatureMatrix, b: &FeatureMatrix) -> FeatureMatrix {
    let mut out = a.clone();
    out.rows.extend(b.rows.iter().cloned());
    out.labels.extend(b.labels.iter().cloned());
    out.paths.extend(b.paths.iter().cloned());
    out
}

/// Run the full iterative pipeline on a prepared feature matrix. The
/// split is derived from `seed`, so repeats with different seeds
/// reshuffle the partitions.
pub fn run_on_matrix(
    config: &RunConfig,
    matrix: &FeatureMatrix,
    seed: u64,
) -> Result<SeedRunOutcome, PipelineError> {
    config.validate()?;
    let (train_idx, val_idx, test_idx) = split_rows(&matrix.labels, seed);
    let frame = SplitFrame {
        train: subset_rows(matrix, &train_idx),
        validation: subset_rows(matrix, &val_idx),
        test: subset_rows(matrix, &test_idx),
    };
    // The iterative loop derives all its randomness from the split seed
    // so each repeat is an independent end-to-end draw.
    let loop_config = RunConfig {
        seed,
        ..config.clone()
    };

    let mut audit = AuditLog::default();
    let mut history: Vec<IterationState> = Vec::new();
    let mut active: Vec<usize> = (0..matrix.n_cols()).collect();
    let mut prev_backmapped: Option<BTreeMap<String, f64>> = None;
    let convergence = loop {
        let iteration = history.len() + 1;
        let result = run_iteration(
            &frame,
            &active,
            iteration,
            prev_backmapped.as_ref(),
            &loop_config,
            &mut audit,
        );
        let state = match result {
            Ok(state) => state,
            Err(PipelineError::Boost(
                crate::feature_boosting::BoostError::NoImprovingCombination,
            )) if !history.is_empty() => {
                // The selection step found nothing to retain: record and
                // stop with the history gathered so far.
                break ConvergenceDecision {
                    rule: "selection_exhausted".into(),
                    at_iteration: iteration - 1,
                };
            }
            Err(e) => return Err(e),
        };
        prev_backmapped = state.importance.backmapped.as_ref().map(|b| {
            b.iter()
                .map(|f| (f.feature.clone(), f.importance))
                .collect()
        });
        active = state.next_active_indices.clone();
        history.push(state);
        if let Some(decision) = converged(&history, &loop_config) {
            break decision;
        }
    };

    // Chosen iteration: max validation macro F1, first on ties.
    let chosen_pos = history
        .iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| {
            a.validation_metrics
                .macro_f1
                .partial_cmp(&b.validation_metrics.macro_f1)
                .unwrap()
                .then(ib.cmp(ia))
        })
        .map(|(i, _)| i)
        .expect("at least one iteration");
    let chosen = &history[chosen_pos];

    // Final model: refit the chosen iteration's transform on train +
    // validation (test stays untouched), grid-search the winning kind,
    // train once, evaluate once on test.
    let trainval = concat(&frame.train, &frame.validation);
    let trainval_a = trainval.select_columns(&chosen.active_indices);
    let test_a = frame.test.select_columns(&chosen.active_indices);
    audit.record_fit("final_zscore_fit", &trainval_a.paths);
    let norm = zscore_fit(&trainval_a);
    let trainval_n = zscore_apply(&norm, &trainval_a);
    let test_n = zscore_apply(&norm, &test_a);

    let retained: Vec<CombinationReport> = chosen
        .combination_reports
        .iter()
        .filter(|r| r.retained)
        .cloned()
        .collect();
    audit.record_fit("final_pca_fit", &trainval_n.paths);
    let bases: Vec<PrincipalBasis> = retained
        .iter()
        .map(|r| {
            let sub: Vec<Vec<f64>> = trainval_n
                .rows
                .iter()
                .map(|row| r.combination.indices.iter().map(|&i| row[i]).collect())
                .collect();
            pca_fit(&sub)
        })
        .collect::<Result<_, _>>()?;
    let boosted_trainval = build_boosted(&trainval_n.rows, &trainval_n.labels, &retained, &bases)?;
    let boosted_test = build_boosted(&test_n.rows, &test_n.labels, &retained, &bases)?;

    let kind = chosen.best_spec.kind;
    let mut grid = config.grid.clone();
    if matches!(kind, ModelKind::ExtraTrees | ModelKind::RandomForest)
        && !grid.contains_key("n_trees")
    {
        grid.insert("n_trees".into(), vec![config.n_trees as f64]);
    }
    audit.record_fit("final_grid_search", &trainval_n.paths);
    let trainval_table = Table::new(boosted_trainval.columns.clone(), boosted_trainval.rows.clone());
    let search = grid_search(
        kind,
        &grid,
        &trainval_table,
        &trainval_n.labels,
        config.folds,
        rng::derive_seed(seed, "final_grid", 0),
        None,
    )?;
    let final_spec = search.best;
    audit.record_fit("final_train", &trainval_n.paths);
    let final_model = train(&final_spec, &trainval_table, &trainval_n.labels)?;

    // Leakage gate before the only look at the test partition.
    let leakage = audit.assert_no_leakage(&frame.test.paths);
    let leakage_ok = leakage.is_ok();
    leakage?;

    let preds = predict(
        &final_model,
        &Table::new(boosted_test.columns.clone(), boosted_test.rows.clone()),
    )?;
    let classes = trainval_n.classes();
    let test_metrics = evaluate(&classes, &test_n.labels, &preds);

    Ok(SeedRunOutcome {
        seed,
        retained_features: chosen.active_features.clone(),
        chosen_iteration: chosen.iteration,
        final_spec,
        convergence,
        iterations: history,
        test_metrics,
        audit_fitting_calls: audit.n_fitting_calls(),
        leakage_ok,
    })
}

fn summarize_repeats(repeats: &[SeedMetrics]) -> RepeatSummary {
    let n = repeats.len() as f64;
    let mean = |f: &dyn Fn(&SeedMetrics) -> f64| repeats.iter().map(|r| f(r)).sum::<f64>() / n;
    let std = |f: &dyn Fn(&SeedMetrics) -> f64, m: f64| {
        (repeats.iter().map(|r| (f(r) - m) * (f(r) - m)).sum::<f64>() / n).sqrt()
    };
    let ma = mean(&|r: &SeedMetrics| r.accuracy);
    let mf = mean(&|r: &SeedMetrics| r.macro_f1);
    RepeatSummary {
        mean_accuracy: ma,
        std_accuracy: std(&|r: &SeedMetrics| r.accuracy, ma),
        mean_macro_f1: mf,
        std_macro_f1: std(&|r: &SeedMetrics| r.macro_f1, mf),
    }
}

/// Repeat the full evaluation for seeds base..base+repeat and assemble
/// the run report (detail kept for the base seed).
pub fn run_report_on_matrix(
    config: &RunConfig,
    matrix: &FeatureMatrix,
) -> Result<RunReport, PipelineError> {
    let mut detail = None;
    let mut repeats = Vec::with_capacity(config.repeat);
    for r in 0..config.repeat {
        let seed = config.seed + r as u64;
        let outcome = run_on_matrix(config, matrix, seed)?;
        repeats.push(SeedMetrics {
            seed,
            accuracy: outcome.test_metrics.accuracy,
            macro_f1: outcome.test_metrics.macro_f1,
        });
        if r == 0 {
            detail = Some(outcome);
        }
    }
    Ok(RunReport {
        config_hash: format!("{:016x}", config_hash(config)),
        base_seed: config.seed,
        notes: vec![
            "final model is retrained on train+validation only; the test split is excluded from every fitting step".into(),
            "seeded repeats reshuffle the train/validation/test split per seed".into(),
        ],
        detail: detail.expect("repeat >= 1"),
        summary: summarize_repeats(&repeats),
        repeats,
    })
}

/// Scan the corpus, extract the 90-feature matrix, and produce the run
/// report plus on-disk artifacts in a directory named by config hash and
/// seed. Returns the report and the run directory.
pub fn run(config: &RunConfig) -> Result<(RunReport, PathBuf), PipelineError> {
    config.validate()?;
    let matrix = extract_feature_matrix(config)?;
    let report = run_report_on_matrix(config, &matrix)?;
    let run_dir = config
        .out_dir
        .join(format!("run_{}_seed{}", report.config_hash, config.seed));
    write_artifacts(&run_dir, &report)?;
    Ok((report, run_dir))
}

/// Decode every corpus item to the canonical format and extract features,
/// tolerating up to `max_skip` failures.
pub fn extract_feature_matrix(config: &RunConfig) -> Result<FeatureMatrix, PipelineError> {
    let scan = scan_corpus(&config.root, config.kind)?;
    let manifest = FeatureManifest::standard();
    let mut matrix = FeatureMatrix::new(&manifest);
    let mut failures = 0usize;
    for item in &scan.corpus.items {
        let result = load_wav(&item.path)
            .map(|w| to_canonical(&w))
            .map_err(PipelineError::from)
            .and_then(|w| extract_feature_vector(&w, &manifest).map_err(PipelineError::from));
        match result {
            Ok(values) => matrix.push(
                values,
                item.label.name.clone(),
                item.path.display().to_string(),
            ),
            Err(e) => {
                failures += 1;
                if failures > config.max_skip {
                    return Err(e);
                }
            }
        }
    }
    if matrix.n_rows() == 0 {
        return Err(crate::dataset_io::DatasetError::EmptyCorpus(
            config.root.display().to_string(),
        )
        .into());
    }
    Ok(matrix)
}

fn write_artifacts(run_dir: &Path, report: &RunReport) -> Result<(), PipelineError> {
    let io_err = |path: &Path, source: std::io::Error| PipelineError::Io {
        path: path.display().to_string(),
        source,
    };
    std::fs::create_dir_all(run_dir).map_err(|e| io_err(run_dir, e))?;
    let report_path = run_dir.join("report.json");
    std::fs::write(&report_path, report.to_json()).map_err(|e| io_err(&report_path, e))?;

    for state in &report.detail.iterations {
        let combos = run_dir.join(format!("combinations_iter{}.csv", state.iteration));
        let mut out = String::from("combination,vrc_combo,vrc_all,sigma,retained\n");
        for r in &state.combination_reports {
            out.push_str(&format!(
                "{},{:.17e},{:.17e},{:.17e},{}\n",
                r.combination.names.join("|"),
                r.vrc_combo,
                r.vrc_all,
                r.sigma,
                r.retained
            ));
        }
        std::fs::write(&combos, out).map_err(|e| io_err(&combos, e))?;

        let imp = run_dir.join(format!("importance_iter{}.csv", state.iteration));
        let mut out = String::from("feature,importance\n");
        if let Some(back) = &state.importance.backmapped {
            for f in back {
                out.push_str(&format!("{},{:.17e}\n", f.feature, f.importance));
            }
        }
        std::fs::write(&imp, out).map_err(|e| io_err(&imp, e))?;
    }
    Ok(())
}

/// Welch t-tests on accuracy and macro F1 across the two runs' per-seed
/// samples.
pub fn compare_methods(a: &RunReport, b: &RunReport) -> Result<ComparisonBlock, PipelineError> {
    let acc_a: Vec<f64> = a.repeats.iter().map(|r| r.accuracy).collect();
    let acc_b: Vec<f64> = b.repeats.iter().map(|r| r.accuracy).collect();
    let f1_a: Vec<f64> = a.repeats.iter().map(|r| r.macro_f1).collect();
    let f1_b: Vec<f64> = b.repeats.iter().map(|r| r.macro_f1).collect();
    Ok(ComparisonBlock {
        accuracy: compare_metric_samples(&acc_a, &acc_b)?,
        macro_f1: compare_metric_samples(&f1_a, &f1_b)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Planted-signal tabular set: `informative` features carry class
    /// structure, the rest are noise.
    pub(crate) fn planted_matrix(
        n_per_class: usize,
        n_classes: usize,
        informative: usize,
        noise: usize,
        seed: u64,
    ) -> FeatureMatrix {
        use rand::Rng;
        let mut r = rng::stage_rng(seed, "planted_matrix", 0);
        let d = informative + noise;
        let mut matrix = FeatureMatrix {
            manifest_version: "test-matrix".into(),
            columns: (0..d)
                .map(|j| {
                    if j < informative {
                        format!("info{j}")
                    } else {
                        format!("noise{j}")
                    }
                })
                .collect(),
            rows: Vec::new(),
            labels: Vec::new(),
            paths: Vec::new(),
        };
        for c in 0..n_classes {
            for i in 0..n_per_class {
                let row: Vec<f64> = (0..d)
                    .map(|j| {
                        if j < informative {
                            // Distinct class centers per informative axis.
                            let center = ((c + j) % n_classes) as f64 * 3.0;
                            center + r.gen_range(-0.8..0.8)
                        } else {
                            r.gen_range(-3.0..3.0)
                        }
                    })
                    .collect();
                matrix.push(row, format!("emotion{c}"), format!("row_{c}_{i}"));
            }
        }
        matrix
    }

    pub(crate) fn small_config() -> RunConfig {
        RunConfig {
            p: 3,
            m: 40,
            folds: 3,
            models: vec![ModelKind::ExtraTrees, ModelKind::GaussianNaiveBayes],
            n_trees: 30,
            shapley_permutations: 30,
            shapley_background: 20,
            shapley_samples: 10,
            max_iterations: 3,
            repeat: 1,
            ..RunConfig::default()
        }
    }

    #[test]
    fn split_rows_is_stratified_and_seeded() {
        let labels: Vec<String> = (0..50).map(|i| format!("c{}", i % 2)).collect();
        let (tr, va, te) = split_rows(&labels, 3);
        // 25 rows per class: 20 train, and the largest-remainder tie
        // between validation and test resolves toward validation.
        assert_eq!(tr.len(), 40);
        assert_eq!(va.len(), 6);
        assert_eq!(te.len(), 4);
        let mut all: Vec<usize> = tr.iter().chain(&va).chain(&te).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..50).collect::<Vec<_>>());
        assert_eq!(split_rows(&labels, 3), split_rows(&labels, 3));
        assert_ne!(split_rows(&labels, 3), split_rows(&labels, 4));
    }

    #[test]
    fn planted_signal_pipeline_keeps_informative_features() {
        let matrix = planted_matrix(40, 3, 4, 8, 1);
        let config = small_config();
        let outcome = run_on_matrix(&config, &matrix, 5).unwrap();
        assert!(outcome.leakage_ok);
        assert!(!outcome.iterations.is_empty());
        // The chosen active set keeps all informative features.
        for j in 0..4 {
            assert!(
                outcome.retained_features.contains(&format!("info{j}")),
                "info{j} missing from {:?}",
                outcome.retained_features
            );
        }
        assert!(outcome.test_metrics.macro_f1 > 0.8, "f1 {}", outcome.test_metrics.macro_f1);
    }

    #[test]
    fn reruns_are_bitwise_identical() {
        let matrix = planted_matrix(20, 2, 3, 5, 2);
        let mut config = small_config();
        config.max_iterations = 2;
        let a = run_on_matrix(&config, &matrix, 9).unwrap();
        let b = run_on_matrix(&config, &matrix, 9).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn repeat_count_controls_seed_entries() {
        let matrix = planted_matrix(20, 2, 3, 5, 3);
        let mut config = small_config();
        config.max_iterations = 1;
        config.repeat = 2;
        let report = run_report_on_matrix(&config, &matrix).unwrap();
        assert_eq!(report.repeats.len(), 2);
        assert_eq!(report.repeats[0].seed, config.seed);
        assert_eq!(report.repeats[1].seed, config.seed + 1);
    }

    #[test]
    fn self_comparison_is_null() {
        let matrix = planted_matrix(20, 2, 3, 5, 4);
        let mut config = small_config();
        config.max_iterations = 1;
        config.repeat = 2;
        let report = run_report_on_matrix(&config, &matrix).unwrap();
        let block = compare_methods(&report, &report).unwrap();
        assert_eq!(block.accuracy.t, 0.0);
        assert!((block.accuracy.p - 1.0).abs() < 1e-9 || block.accuracy.degenerate);
        assert_eq!(block.macro_f1.t, 0.0);
    }

    #[test]
    fn chosen_iteration_is_argmax_validation_f1() {
        let matrix = planted_matrix(30, 3, 4, 6, 5);
        let mut config = small_config();
        config.max_iterations = 3;
        let outcome = run_on_matrix(&config, &matrix, 7).unwrap();
        let best = outcome
            .iterations
            .iter()
            .map(|s| s.validation_metrics.macro_f1)
            .fold(f64::NEG_INFINITY, f64::max);
        let chosen = outcome
            .iterations
            .iter()
            .find(|s| s.iteration == outcome.chosen_iteration)
            .unwrap();
        assert_eq!(chosen.validation_metrics.macro_f1, best);
    }
}
