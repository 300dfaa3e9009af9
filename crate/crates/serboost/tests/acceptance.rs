//! Acceptance gate: one test per criterion, each printing a single
//! `criterion N: PASS` line (run with `--nocapture` to see them on
//! success). Every numerical claim is checked against an oracle written
//! here, independently of the library internals.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use rand::Rng;
use rand_distr::StandardNormal;

use serboost::acoustic_features::{FeatureMatrix, MANIFEST_VERSION};
use serboost::classifiers::{evaluate, train, ModelKind, ModelSpec, Table};
use serboost::dataset_io::{write_wav_pcm16, CorpusKind, Waveform};
use serboost::explainability::{
    backmap, shapley_exact, shapley_permutation, EstimatorInfo, ImportanceEntry, ImportanceReport,
    ValueFunction,
};
use serboost::feature_boosting::{
    pca_fit, score_and_select, BoostError, ColumnProvenance, FeatureCombination,
};
use serboost::pipeline::{
    compare_methods, run, run_on_matrix, run_report_on_matrix, RunConfig, RunReport, SeedMetrics,
};
use serboost::rng::stage_rng;

/// Runs the criterion body and prints exactly one PASS/FAIL line.
fn criterion<F: FnOnce() + std::panic::UnwindSafe>(n: usize, body: F) {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(()) => println!("criterion {n}: PASS"),
        Err(e) => {
            println!("criterion {n}: FAIL");
            resume_unwind(e);
        }
    }
}

fn assert_within(elapsed: std::time::Duration, bound_s: f64, what: &str) {
    assert!(
        elapsed.as_secs_f64() < bound_s,
        "{what} took {:.1}s, bound is {bound_s}s",
        elapsed.as_secs_f64()
    );
}

// ---------------------------------------------------------------------------
// Shared generators
// ---------------------------------------------------------------------------

/// Random labeled dataset: class `c` is shifted by `c * shift` on column 0
/// so the variance ratio varies across cases.
fn random_dataset(
    n: usize,
    e: usize,
    d: usize,
    shift: f64,
    seed: u64,
) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut r = stage_rng(seed, "acceptance_dataset", 0);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let c = i % e;
        let mut row: Vec<f64> = (0..d).map(|_| r.sample::<f64, _>(StandardNormal)).collect();
        row[0] += c as f64 * shift;
        rows.push(row);
        labels.push(c);
    }
    (rows, labels)
}

/// Naive transcription of the variance ratio: between-class scatter over
/// within-class scatter, each normalized by its degrees of freedom.
fn vrc_oracle(rows: &[Vec<f64>], labels: &[usize]) -> f64 {
    let n = rows.len();
    let d = rows[0].len();
    let e = labels.iter().max().unwrap() + 1;
    let mut overall = vec![0.0; d];
    for row in rows {
        for j in 0..d {
            overall[j] += row[j];
        }
    }
    for m in &mut overall {
        *m /= n as f64;
    }
    let mut class_mean = vec![vec![0.0; d]; e];
    let mut counts = vec![0usize; e];
    for (row, &c) in rows.iter().zip(labels) {
        counts[c] += 1;
        for j in 0..d {
            class_mean[c][j] += row[j];
        }
    }
    for (m, &c) in class_mean.iter_mut().zip(&counts) {
        for v in m.iter_mut() {
            *v /= c as f64;
        }
    }
    let mut ssb = 0.0;
    for c in 0..e {
        for j in 0..d {
            let diff = class_mean[c][j] - overall[j];
            ssb += counts[c] as f64 * diff * diff;
        }
    }
    let mut ssw = 0.0;
    for (row, &c) in rows.iter().zip(labels) {
        for j in 0..d {
            let diff = row[j] - class_mean[c][j];
            ssw += diff * diff;
        }
    }
    (ssb / (e - 1) as f64) / (ssw / (n - e) as f64)
}

/// Tabular matrix with `n_informative` class-separating columns followed
/// by pure noise, three classes, `n_per_class` rows each.
fn planted_matrix(
    n_per_class: usize,
    n_informative: usize,
    n_noise: usize,
    shift: f64,
    seed: u64,
) -> FeatureMatrix {
    let classes = ["calm", "happy", "sad"];
    let d = n_informative + n_noise;
    let columns: Vec<String> = (0..d).map(|j| format!("f{j:02}")).collect();
    let mut r = stage_rng(seed, "acceptance_planted", 0);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut paths = Vec::new();
    for (ci, class) in classes.iter().enumerate() {
        for i in 0..n_per_class {
            let mut row: Vec<f64> =
                (0..d).map(|_| r.sample::<f64, _>(StandardNormal)).collect();
            for (j, v) in row.iter_mut().enumerate().take(n_informative) {
                let direction = if j % 2 == 0 { 1.0 } else { -1.0 };
                *v += (ci as f64 - 1.0) * shift * direction;
            }
            rows.push(row);
            labels.push(class.to_string());
            paths.push(format!("{class}_{i:04}"));
        }
    }
    FeatureMatrix {
        manifest_version: MANIFEST_VERSION.to_string(),
        columns,
        rows,
        labels,
        paths,
    }
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

#[test]
fn criterion_01_vrc_oracle_equivalence() {
    criterion(1, || {
        let start = Instant::now();
        for case in 0..100u64 {
            let n = 20 + (case as usize * 7) % 181;
            let e = 2 + case as usize % 4;
            let d = 1 + case as usize % 12;
            let shift = 0.2 + (case % 5) as f64 * 0.4;
            let (rows, labels) = random_dataset(n, e, d, shift, 1000 + case);
            let got = serboost::feature_boosting::vrc(&rows, &labels).unwrap();
            let want = vrc_oracle(&rows, &labels);
            let rel = (got - want).abs() / want.abs().max(1.0);
            assert!(rel < 1e-10, "case {case}: got {got}, oracle {want}");
        }
        assert_within(start.elapsed(), 5.0, "VRC oracle suite");
    });
}

#[test]
fn criterion_02_selection_rule_equivalence() {
    criterion(2, || {
        let start = Instant::now();
        let epsilons = [-0.3, -0.05, 0.0, 0.05, 0.2, 5.0];
        for case in 0..50u64 {
            let n = 30 + (case as usize * 3) % 51;
            let e = 2 + case as usize % 3;
            let d = 4 + case as usize % 7;
            let (rows, labels) = random_dataset(n, e, d, 0.8, 2000 + case);
            let mut r = stage_rng(3000 + case, "acceptance_combos", 0);
            let n_combos = 5 + case as usize % 8;
            let combos: Vec<FeatureCombination> = (0..n_combos)
                .map(|_| {
                    let p = 1 + r.gen_range(0..3.min(d));
                    let mut idx: Vec<usize> = (0..d).collect();
                    for i in (1..d).rev() {
                        idx.swap(i, r.gen_range(0..=i));
                    }
                    let mut indices: Vec<usize> = idx[..p].to_vec();
                    indices.sort_unstable();
                    indices.dedup();
                    FeatureCombination {
                        names: indices.iter().map(|i| format!("f{i}")).collect(),
                        indices,
                    }
                })
                .collect();
            let epsilon = epsilons[case as usize % epsilons.len()];

            // Oracle: naive sigmas, naive threshold, naive retention.
            let vrc_all = vrc_oracle(&rows, &labels);
            let sigmas: Vec<f64> = combos
                .iter()
                .map(|c| {
                    let sub: Vec<Vec<f64>> = rows
                        .iter()
                        .map(|row| c.indices.iter().map(|&i| row[i]).collect())
                        .collect();
                    vrc_oracle(&sub, &labels) - vrc_all
                })
                .collect();
            let nonneg: Vec<f64> = sigmas.iter().copied().filter(|&s| s >= 0.0).collect();
            let outcome = score_and_select(&rows, &labels, &combos, epsilon);
            if nonneg.is_empty() {
                assert!(
                    matches!(outcome, Err(BoostError::NoImprovingCombination)),
                    "case {case}: oracle sees no improving combination"
                );
                continue;
            }
            let alpha = nonneg.iter().sum::<f64>() / nonneg.len() as f64 + epsilon;
            let mut want: Vec<Vec<usize>> = combos
                .iter()
                .zip(&sigmas)
                .filter(|(_, &s)| s >= alpha)
                .map(|(c, _)| c.indices.clone())
                .collect();
            want.sort();
            let outcome = outcome.unwrap();
            let mut got: Vec<Vec<usize>> = outcome
                .retained()
                .map(|rep| rep.combination.indices.clone())
                .collect();
            got.sort();
            assert_eq!(got, want, "case {case}: retained sets differ (ε={epsilon})");
            assert!(
                (outcome.alpha - alpha).abs() < 1e-9 * alpha.abs().max(1.0),
                "case {case}: alpha {} vs oracle {alpha}",
                outcome.alpha
            );
        }

        // Hand-built m_p = 0 scenario: only the excluded column separates
        // the classes, so every noise-only combination loses VRC.
        let (mut rows, labels) = random_dataset(60, 2, 3, 0.0, 999);
        for (row, &c) in rows.iter_mut().zip(&labels) {
            row[0] = c as f64 * 10.0 + row[0] * 0.01;
        }
        let noise_only = [
            FeatureCombination {
                indices: vec![1],
                names: vec!["f1".into()],
            },
            FeatureCombination {
                indices: vec![1, 2],
                names: vec!["f1".into(), "f2".into()],
            },
        ];
        assert!(matches!(
            score_and_select(&rows, &labels, &noise_only, 0.0),
            Err(BoostError::NoImprovingCombination)
        ));
        assert_within(start.elapsed(), 5.0, "selection oracle suite");
    });
}

#[test]
fn criterion_03_eigensolver_correctness() {
    criterion(3, || {
        let start = Instant::now();
        for case in 0..100u64 {
            let p = 1 + case as usize % 12;
            let n = 40;
            let mut r = stage_rng(4000 + case, "acceptance_pca", 0);
            let scale = 10f64.powf(r.gen_range(-1.0..1.0));
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    (0..p)
                        .map(|_| r.sample::<f64, _>(StandardNormal) * scale)
                        .collect()
                })
                .collect();
            let basis = pca_fit(&rows).unwrap();

            // Independent sample covariance of the same input.
            let means: Vec<f64> = (0..p)
                .map(|j| rows.iter().map(|row| row[j]).sum::<f64>() / n as f64)
                .collect();
            let mut cov = vec![vec![0.0; p]; p];
            for row in &rows {
                for i in 0..p {
                    for j in 0..p {
                        cov[i][j] += (row[i] - means[i]) * (row[j] - means[j]);
                    }
                }
            }
            for ci in &mut cov {
                for v in ci.iter_mut() {
                    *v /= (n - 1) as f64;
                }
            }

            for j in 0..p {
                let v: Vec<f64> = (0..p).map(|k| basis.eigenvectors[k][j]).collect();
                let lambda = basis.eigenvalues[j];
                let residual = (0..p)
                    .map(|i| {
                        let cv: f64 = (0..p).map(|k| cov[i][k] * v[k]).sum();
                        (cv - lambda * v[i]).abs()
                    })
                    .fold(0.0f64, f64::max);
                assert!(residual < 1e-8, "case {case}: residual {residual}");
                for j2 in 0..p {
                    let dot: f64 = (0..p)
                        .map(|k| basis.eigenvectors[k][j] * basis.eigenvectors[k][j2])
                        .sum();
                    let want = if j == j2 { 1.0 } else { 0.0 };
                    assert!(
                        (dot - want).abs() < 1e-8,
                        "case {case}: orthonormality defect {dot} at ({j},{j2})"
                    );
                }
            }
            let total: f64 = basis.explained.iter().sum();
            assert!(
                (total - 100.0).abs() < 1e-6,
                "case {case}: explained variance sums to {total}"
            );
        }
        assert_within(start.elapsed(), 10.0, "eigensolver suite");
    });
}

#[test]
fn criterion_04_shapley_axioms() {
    criterion(4, || {
        let start = Instant::now();
        for case in 0..30u64 {
            let mut r = stage_rng(5000 + case, "acceptance_shapley", 0);
            let d = 8;
            let n = 40;
            // Columns 5 and 6 are duplicates; column 7 is constant.
            let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
            let mut labels: Vec<String> = Vec::with_capacity(n);
            for i in 0..n {
                let c = i % 2;
                let mut row: Vec<f64> = (0..d)
                    .map(|_| r.sample::<f64, _>(StandardNormal))
                    .collect();
                row[0] += c as f64 * 2.0;
                row[1] -= c as f64 * 1.5;
                row[6] = row[5];
                row[7] = 0.5;
                rows.push(row);
                labels.push(format!("c{c}"));
            }
            let columns: Vec<String> = (0..d).map(|j| format!("x{j}")).collect();
            let table = Table::new(columns.clone(), rows.clone());
            let forest_spec = ModelSpec::new(ModelKind::ExtraTrees, 5000 + case).with("n_trees", 20.0);
            let forest = train(&forest_spec, &table, &labels).unwrap();
            let background: Vec<Vec<f64>> = rows[..10].to_vec();
            let x = rows[11].clone();

            let vf = ValueFunction::new(&forest, 0, &background).unwrap();
            let exact = shapley_exact(&vf, &x).unwrap();

            // Efficiency.
            let total: f64 = exact.phi.iter().sum();
            assert!(
                (total - (exact.model_output - exact.base_value)).abs() < 1e-10,
                "case {case}: efficiency defect"
            );
            // Null player: the constant column contributes exactly zero.
            assert_eq!(exact.phi[7], 0.0, "case {case}: null player");

            // Symmetry on the duplicated pair, under a model that treats
            // columns exchangeably.
            let gnb_spec = ModelSpec::new(ModelKind::GaussianNaiveBayes, 0);
            let gnb = train(&gnb_spec, &table, &labels).unwrap();
            let vf_gnb = ValueFunction::new(&gnb, 0, &background).unwrap();
            let sym = shapley_exact(&vf_gnb, &x).unwrap();
            assert!(
                (sym.phi[5] - sym.phi[6]).abs() < 1e-10,
                "case {case}: symmetry defect {}",
                (sym.phi[5] - sym.phi[6]).abs()
            );

            // Linearity: the value function is a mean over background rows,
            // so attributions over a pooled background equal the average of
            // the half-background attributions.
            let (b1, b2) = background.split_at(5);
            let phi1 = shapley_exact(&ValueFunction::new(&forest, 0, b1).unwrap(), &x).unwrap();
            let phi2 = shapley_exact(&ValueFunction::new(&forest, 0, b2).unwrap(), &x).unwrap();
            for j in 0..d {
                let mixed = 0.5 * (phi1.phi[j] + phi2.phi[j]);
                assert!(
                    (exact.phi[j] - mixed).abs() < 1e-10,
                    "case {case}: linearity defect at column {j}"
                );
            }

            // Permutation estimator agrees with exact within 4 standard
            // errors.
            let sampled = shapley_permutation(&vf, &x, 200, 6000 + case).unwrap();
            let ses = sampled.standard_errors.as_ref().unwrap();
            for j in 0..d {
                let tol = 4.0 * ses[j] + 1e-9;
                assert!(
                    (sampled.phi[j] - exact.phi[j]).abs() <= tol,
                    "case {case}: column {j} off by {} (tol {tol})",
                    (sampled.phi[j] - exact.phi[j]).abs()
                );
            }
        }
        assert_within(start.elapsed(), 60.0, "Shapley axiom suite");
    });
}

#[test]
fn criterion_05_backmap_conservation() {
    criterion(5, || {
        let start = Instant::now();
        for case in 0..50u64 {
            let mut r = stage_rng(7000 + case, "acceptance_backmap", 0);
            let n_features = 3 + case as usize % 8;
            let names: Vec<String> = (0..n_features).map(|i| format!("feat{i}")).collect();
            let n_combos = 1 + case as usize % 4;
            let mut provenance = BTreeMap::new();
            let mut pooled = Vec::new();
            for ci in 0..n_combos {
                let p = 1 + r.gen_range(0..3.min(n_features));
                let mut idx: Vec<usize> = (0..n_features).collect();
                for i in (1..n_features).rev() {
                    idx.swap(i, r.gen_range(0..=i));
                }
                let mut indices: Vec<usize> = idx[..p].to_vec();
                indices.sort_unstable();
                let combo = FeatureCombination {
                    names: indices.iter().map(|&i| names[i].clone()).collect(),
                    indices,
                };
                for component in 1..=p.min(2) {
                    let column = format!("PC_{}_{component}", ci + 1);
                    // Every fifth column gets a degenerate all-zero
                    // loading to exercise the equal-split branch.
                    let loading: Vec<f64> = if (ci + component) % 5 == 0 {
                        vec![0.0; p]
                    } else {
                        (0..p).map(|_| r.gen_range(-1.0..1.0)).collect()
                    };
                    provenance.insert(
                        column.clone(),
                        ColumnProvenance {
                            combination_number: ci + 1,
                            combination: combo.clone(),
                            component,
                            loading,
                            eigenvalue: r.gen_range(0.1..5.0),
                            explained_percent: 50.0,
                        },
                    );
                    pooled.push(ImportanceEntry {
                        column,
                        mean_abs_phi: r.gen_range(0.0..2.0),
                    });
                }
            }
            let report = ImportanceReport {
                per_class: BTreeMap::new(),
                ranking: pooled.iter().map(|e| e.column.clone()).collect(),
                pooled,
                backmapped: None,
                estimator: EstimatorInfo {
                    method: "exact".into(),
                    permutations: None,
                    seed: 0,
                    background_size: 1,
                },
            };
            let mapped = backmap(&report, &provenance).unwrap();
            let total_in: f64 = report.pooled.iter().map(|e| e.mean_abs_phi).sum();
            let total_out: f64 = mapped.iter().map(|f| f.importance).sum();
            assert!(
                (total_in - total_out).abs() < 1e-9,
                "case {case}: {total_in} in, {total_out} out"
            );
        }
        assert_within(start.elapsed(), 2.0, "back-mapping suite");
    });
}

fn planted_config() -> RunConfig {
    RunConfig {
        p: 5,
        m: 60,
        folds: 3,
        models: vec![ModelKind::ExtraTrees, ModelKind::GaussianNaiveBayes],
        n_trees: 40,
        shapley_permutations: 30,
        shapley_background: 20,
        shapley_samples: 10,
        max_iterations: 3,
        repeat: 1,
        ..RunConfig::default()
    }
}

#[test]
fn criterion_06_planted_signal_end_to_end() {
    criterion(6, || {
        let start = Instant::now();
        let matrix = planted_matrix(200, 5, 25, 2.0, 11);
        let config = planted_config();
        for seed in 0..5u64 {
            let outcome = run_on_matrix(&config, &matrix, seed).unwrap();
            for j in 0..5 {
                let name = format!("f{j:02}");
                assert!(
                    outcome.retained_features.contains(&name),
                    "seed {seed}: informative feature {name} was pruned"
                );
            }
            assert!(
                outcome.test_metrics.macro_f1 >= 0.9,
                "seed {seed}: test macro F1 {:.3}",
                outcome.test_metrics.macro_f1
            );
            assert!(outcome.leakage_ok, "seed {seed}: leakage audit");
        }
        assert_within(start.elapsed(), 300.0, "planted-signal suite");
    });
}

/// 3 vowel-like timbre classes with disjoint pitch ranges and distinct
/// harmonic envelopes, `n_per_class` clips each.
fn write_vowel_corpus(root: &Path, n_per_class: usize, seed: u64) {
    let sr = 16_000u32;
    let dur = 0.7;
    let n = (dur * sr as f64) as usize;
    let classes: [(&str, f64, &dyn Fn(usize) -> f64); 3] = [
        ("low", 120.0, &|k| 1.0 / k as f64),
        ("mid", 210.0, &|k| if (3..=5).contains(&k) { 1.0 } else { 0.15 }),
        ("high", 300.0, &|k| (k as f64 / 8.0).min(1.0)),
    ];
    for (name, f0_base, envelope) in classes {
        let dir = root.join(name);
        std::fs::create_dir_all(&dir).unwrap();
        for clip in 0..n_per_class {
            let mut r = stage_rng(seed, name, clip as u64);
            let f0 = f0_base * r.gen_range(0.96..1.04);
            let gain = r.gen_range(0.2..0.3);
            let samples: Vec<f64> = (0..n)
                .map(|i| {
                    let t = i as f64 / sr as f64;
                    let fade = (std::f64::consts::PI * t / dur).sin();
                    let mut s = 0.0;
                    for k in 1..=8usize {
                        s += envelope(k) * (2.0 * std::f64::consts::PI * k as f64 * f0 * t).sin();
                    }
                    let noise: f64 = r.sample::<f64, _>(StandardNormal);
                    (s / 4.0 + 0.01 * noise) * gain * fade
                })
                .collect();
            let w = Waveform::mono(samples, sr);
            write_wav_pcm16(&dir.join(format!("clip_{clip:02}.wav")), &w).unwrap();
        }
    }
}

fn vowel_config(root: &Path, out_dir: &Path) -> RunConfig {
    RunConfig {
        root: root.to_path_buf(),
        kind: CorpusKind::Generic,
        out_dir: out_dir.to_path_buf(),
        seed: 7,
        p: 8,
        m: 80,
        folds: 3,
        models: vec![ModelKind::ExtraTrees, ModelKind::GaussianNaiveBayes],
        n_trees: 60,
        shapley_permutations: 30,
        shapley_background: 30,
        shapley_samples: 12,
        max_iterations: 2,
        repeat: 1,
        ..RunConfig::default()
    }
}

#[test]
fn criterion_07_synthetic_audio_end_to_end() {
    criterion(7, || {
        let start = Instant::now();
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path().join("corpus");
        write_vowel_corpus(&root, 20, 77);
        let config = vowel_config(&root, &dir.path().join("out"));
        let (report, run_dir) = run(&config).unwrap();
        assert!(
            report.detail.test_metrics.accuracy >= 0.9,
            "test accuracy {:.3}",
            report.detail.test_metrics.accuracy
        );
        // The written artifact round-trips through the report schema.
        let text = std::fs::read_to_string(run_dir.join("report.json")).unwrap();
        let parsed: RunReport = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed.config_hash, report.config_hash);
        assert_eq!(parsed.repeats.len(), 1);
        assert_within(start.elapsed(), 300.0, "synthetic-audio suite");
    });
}

#[test]
fn criterion_08_boosting_benefit() {
    criterion(8, || {
        let start = Instant::now();
        let matrix = planted_matrix(300, 5, 65, 1.2, 88);
        let config = RunConfig {
            models: vec![ModelKind::ExtraTrees],
            repeat: 10,
            m: 100,
            prune_fraction: 0.25,
            max_iterations: 4,
            ..planted_config()
        };
        let boosted = run_report_on_matrix(&config, &matrix).unwrap();

        // Raw-feature baseline: extra trees on all 70 columns, one
        // stratified 80/10/10 split per seed, trained on train+validation.
        let classes: Vec<String> = {
            let mut c = matrix.labels.clone();
            c.sort();
            c.dedup();
            c
        };
        let baseline_repeats: Vec<SeedMetrics> = (0..10u64)
            .map(|offset| {
                let seed = config.seed + offset;
                let mut fit_idx = Vec::new();
                let mut test_idx = Vec::new();
                for (ci, class) in classes.iter().enumerate() {
                    let mut idx: Vec<usize> = (0..matrix.rows.len())
                        .filter(|&i| &matrix.labels[i] == class)
                        .collect();
                    let mut r = stage_rng(seed, "acceptance_baseline_split", ci as u64);
                    for i in (1..idx.len()).rev() {
                        idx.swap(i, r.gen_range(0..=i));
                    }
                    let n_test = (idx.len() / 10).max(1);
                    test_idx.extend_from_slice(&idx[..n_test]);
                    fit_idx.extend_from_slice(&idx[n_test..]);
                }
                let table = Table::new(
                    matrix.columns.clone(),
                    fit_idx.iter().map(|&i| matrix.rows[i].clone()).collect(),
                );
                let y: Vec<String> = fit_idx.iter().map(|&i| matrix.labels[i].clone()).collect();
                let spec = ModelSpec::new(ModelKind::ExtraTrees, seed)
                    .with("n_trees", config.n_trees as f64);
                let model = train(&spec, &table, &y).unwrap();
                let test_table = Table::new(
                    matrix.columns.clone(),
                    test_idx.iter().map(|&i| matrix.rows[i].clone()).collect(),
                );
                let truth: Vec<String> =
                    test_idx.iter().map(|&i| matrix.labels[i].clone()).collect();
                let predicted = serboost::classifiers::predict(&model, &test_table).unwrap();
                let m = evaluate(&classes, &truth, &predicted);
                SeedMetrics {
                    seed,
                    accuracy: m.accuracy,
                    macro_f1: m.macro_f1,
                }
            })
            .collect();

        let mut baseline = boosted.clone();
        baseline.repeats = baseline_repeats;

        let mean = |xs: &[SeedMetrics], f: fn(&SeedMetrics) -> f64| {
            xs.iter().map(f).sum::<f64>() / xs.len() as f64
        };
        let boosted_f1 = mean(&boosted.repeats, |m| m.macro_f1);
        let baseline_f1 = mean(&baseline.repeats, |m| m.macro_f1);
        let comparison = compare_methods(&boosted, &baseline).unwrap();
        assert!(
            boosted_f1 > baseline_f1,
            "boosted {boosted_f1:.3} does not beat baseline {baseline_f1:.3}"
        );
        assert!(
            comparison.macro_f1.p < 0.05,
            "macro F1 difference not significant: p = {:.4} (boosted {boosted_f1:.3}, baseline {baseline_f1:.3})",
            comparison.macro_f1.p
        );
        assert_within(start.elapsed(), 600.0, "boosting-benefit suite");
    });
}

#[test]
fn criterion_09_determinism_audit() {
    criterion(9, || {
        // Fast numerical stages: fingerprint two independent executions.
        let fingerprint = || {
            let mut out = String::new();
            let (rows, labels) = random_dataset(80, 3, 6, 0.7, 4242);
            out += &format!("{:.17e}\n", serboost::feature_boosting::vrc(&rows, &labels).unwrap());
            let combos = [FeatureCombination {
                indices: vec![0, 2],
                names: vec!["f0".into(), "f2".into()],
            }];
            if let Ok(sel) = score_and_select(&rows, &labels, &combos, 0.0) {
                out += &format!("{:.17e} {:.17e}\n", sel.alpha, sel.reports[0].sigma);
            }
            let basis = pca_fit(&rows).unwrap();
            out += &serde_json::to_string(&basis.eigenvalues).unwrap();
            out
        };
        assert_eq!(fingerprint(), fingerprint(), "numerical-stage fingerprints");

        // Planted-signal pipeline: identical seed, byte-identical outcome.
        let matrix = planted_matrix(200, 5, 25, 2.0, 11);
        let config = planted_config();
        let a = serde_json::to_string(&run_on_matrix(&config, &matrix, 0).unwrap()).unwrap();
        let b = serde_json::to_string(&run_on_matrix(&config, &matrix, 0).unwrap()).unwrap();
        assert_eq!(a, b, "planted-signal reports differ between reruns");

        // Audio pipeline: same corpus, same config, byte-identical report
        // artifact.
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path().join("corpus");
        write_vowel_corpus(&root, 20, 77);
        let config = vowel_config(&root, &dir.path().join("out"));
        let (_, run_dir) = run(&config).unwrap();
        let first = std::fs::read(run_dir.join("report.json")).unwrap();
        let (_, run_dir) = run(&config).unwrap();
        let second = std::fs::read(run_dir.join("report.json")).unwrap();
        assert_eq!(first, second, "audio run reports differ between reruns");
    });
}

#[test]
fn criterion_10_real_corpora_optional() {
    let tess = std::env::var_os("SERBOOST_TESS_ROOT");
    let emodb = std::env::var_os("SERBOOST_EMODB_ROOT");
    if tess.is_none() && emodb.is_none() {
        println!("criterion 10: SKIP (set SERBOOST_TESS_ROOT / SERBOOST_EMODB_ROOT to enable)");
        return;
    }
    criterion(10, || {
        let start = Instant::now();
        let check = |root: std::ffi::OsString, kind: CorpusKind, floor: f64| {
            let dir = tempfile::tempdir().unwrap();
            let config = RunConfig {
                root: root.into(),
                kind,
                out_dir: dir.path().to_path_buf(),
                seed: 42,
                m: 200,
                folds: 5,
                models: vec![ModelKind::ExtraTrees],
                n_trees: 150,
                shapley_permutations: 50,
                shapley_background: 60,
                shapley_samples: 30,
                max_iterations: 3,
                repeat: 1,
                ..RunConfig::default()
            };
            let (report, _) = run(&config).unwrap();
            assert!(
                report.detail.test_metrics.accuracy >= floor,
                "{kind:?}: accuracy {:.3} below {floor}",
                report.detail.test_metrics.accuracy
            );
        };
        if let Some(root) = tess {
            check(root, CorpusKind::Tess, 0.95);
        }
        if let Some(root) = emodb {
            check(root, CorpusKind::Emodb, 0.80);
        }
        assert_within(start.elapsed(), 7200.0, "real-corpora suite");
    });
}
