//! Command-line entry point: every pipeline stage as a subcommand plus
//! the full iterative run.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 internal
//! invariant violation.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use serboost::acoustic_features::{FeatureManifest, FeatureMatrix, N_FEATURES};
use serboost::classifiers::{
    cross_validate, train, ModelKind, ModelSpec, Table,
};
use serboost::dataset_io::{scan_corpus, stratified_split, CorpusKind};
use serboost::explainability::{backmap, global_importance};
use serboost::feature_boosting::{
    build_boosted, pca_fit, sample_combinations, score_and_select, PrincipalBasis,
};
use serboost::pipeline::{
    compare_methods, run, PipelineError, RunConfig, RunReport,
};

#[derive(Parser)]
#[command(
    name = "serboost",
    about = "Iterative explainability-driven feature boosting for speech emotion recognition",
    version
)]
struct Cli {
    /// Thread limit for parallel stages (default: available cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Emit machine-readable JSON on standard output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CorpusArgs {
    /// Corpus root directory.
    #[arg(long)]
    root: PathBuf,
    /// Corpus labeling convention: tess, emodb, ravdess, savee, generic.
    #[arg(long, default_value = "generic")]
    kind: CorpusKind,
}

#[derive(Subcommand)]
enum Command {
    /// Scan a corpus and print a split manifest plus class summary.
    Scan {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Split seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Extract the 90-feature matrix to CSV (plus a manifest JSON).
    Extract {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Decode failures tolerated before aborting.
        #[arg(long, default_value_t = 0)]
        max_skip: usize,
    },
    /// Score feature combinations and print the retention report.
    Boost {
        /// Feature CSV produced by `extract`.
        #[arg(long)]
        features: PathBuf,
        #[arg(long, default_value_t = 10)]
        p: usize,
        #[arg(long, default_value_t = 500)]
        m: usize,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Train the model registry on a boosted dataset and rank by CV.
    Train {
        #[arg(long)]
        features: PathBuf,
        #[arg(long, default_value_t = 10)]
        p: usize,
        #[arg(long, default_value_t = 500)]
        m: usize,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        #[arg(long, default_value_t = 10)]
        folds: usize,
        #[arg(long, default_value_t = 300)]
        n_trees: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Explain the best model of a boosted dataset and print importances.
    Explain {
        #[arg(long)]
        features: PathBuf,
        #[arg(long, default_value_t = 10)]
        p: usize,
        #[arg(long, default_value_t = 500)]
        m: usize,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        #[arg(long, default_value_t = 200)]
        permutations: usize,
        #[arg(long, default_value_t = 300)]
        n_trees: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Execute the full iterative pipeline from a config file.
    Run {
        /// Flat key = value config file.
        #[arg(long)]
        config: PathBuf,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the config repeat count.
        #[arg(long)]
        repeat: Option<usize>,
    },
    /// Welch t-tests between two run reports (accuracy and macro F1).
    Compare {
        /// report.json of the first run.
        #[arg(long)]
        a: PathBuf,
        /// report.json of the second run.
        #[arg(long)]
        b: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's help/version exits are successes; everything else is
            // a usage error (exit 1).
            let benign = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if benign { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
    };
    if let Some(n) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// Map error classes onto the documented exit-code contract.
fn exit_code(e: &CliError) -> u8 {
    match e {
        CliError::Usage(_) => 1,
        CliError::Pipeline(p) => match p {
            PipelineError::InvalidConfig(_) | PipelineError::UnknownConfigKey(_) => 1,
            PipelineError::Dataset(_) | PipelineError::Feature(_) | PipelineError::Io { .. } => 2,
            _ => 3,
        },
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

impl From<serboost::dataset_io::DatasetError> for CliError {
    fn from(e: serboost::dataset_io::DatasetError) -> CliError {
        CliError::Pipeline(e.into())
    }
}
impl From<serboost::acoustic_features::FeatureError> for CliError {
    fn from(e: serboost::acoustic_features::FeatureError) -> CliError {
        CliError::Pipeline(e.into())
    }
}
impl From<serboost::feature_boosting::BoostError> for CliError {
    fn from(e: serboost::feature_boosting::BoostError) -> CliError {
        CliError::Pipeline(e.into())
    }
}
impl From<serboost::classifiers::ModelError> for CliError {
    fn from(e: serboost::classifiers::ModelError) -> CliError {
        CliError::Pipeline(e.into())
    }
}
impl From<serboost::explainability::ExplainError> for CliError {
    fn from(e: serboost::explainability::ExplainError) -> CliError {
        CliError::Pipeline(e.into())
    }
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Scan { corpus, seed } => cmd_scan(corpus, *seed, cli.json),
        Command::Extract {
            corpus,
            out,
            seed,
            max_skip,
        } => cmd_extract(corpus, out, *seed, *max_skip, cli.json),
        Command::Boost {
            features,
            p,
            m,
            epsilon,
            seed,
        } => cmd_boost(features, *p, *m, *epsilon, *seed, cli.json),
        Command::Train {
            features,
            p,
            m,
            epsilon,
            folds,
            n_trees,
            seed,
        } => cmd_train(features, *p, *m, *epsilon, *folds, *n_trees, *seed, cli.json),
        Command::Explain {
            features,
            p,
            m,
            epsilon,
            permutations,
            n_trees,
            seed,
        } => cmd_explain(
            features,
            *p,
            *m,
            *epsilon,
            *permutations,
            *n_trees,
            *seed,
            cli.json,
        ),
        Command::Run {
            config,
            seed,
            repeat,
        } => cmd_run(config, *seed, *repeat, cli.json),
        Command::Compare { a, b } => cmd_compare(a, b, cli.json),
    }
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("serialization cannot fail")
    );
}

fn cmd_scan(corpus: &CorpusArgs, seed: u64, json: bool) -> Result<(), CliError> {
    let scan = scan_corpus(&corpus.root, corpus.kind)?;
    let split = stratified_split(&scan.corpus, seed)?;
    let manifest = split.manifest();
    #[derive(serde::Serialize)]
    struct Summary {
        kind: String,
        total: usize,
        classes: BTreeMap<String, usize>,
        skipped: usize,
        manifest: serboost::dataset_io::SplitManifest,
    }
    let summary = Summary {
        kind: format!("{:?}", scan.corpus.kind).to_lowercase(),
        total: scan.corpus.total(),
        classes: scan.corpus.class_counts.clone(),
        skipped: scan.skipped.len(),
        manifest,
    };
    if json {
        print_json(&summary);
    } else {
        println!("kind: {}", summary.kind);
        println!("files: {} ({} skipped)", summary.total, summary.skipped);
        println!("classes ({}):", summary.classes.len());
        for (label, count) in &summary.classes {
            println!("  {label}: {count}");
        }
    }
    Ok(())
}

fn cmd_extract(
    corpus: &CorpusArgs,
    out: &PathBuf,
    seed: u64,
    max_skip: usize,
    json: bool,
) -> Result<(), CliError> {
    let config = RunConfig {
        root: corpus.root.clone(),
        kind: corpus.kind,
        seed,
        max_skip,
        ..RunConfig::default()
    };
    let matrix = serboost::pipeline::extract_feature_matrix(&config)?;
    matrix.to_csv(out).map_err(PipelineError::from)?;
    let manifest_path = out.with_extension("manifest.json");
    std::fs::write(
        &manifest_path,
        serde_json::to_string_pretty(&FeatureManifest::standard())
            .expect("manifest serialization cannot fail"),
    )
    .map_err(|e| {
        CliError::Pipeline(PipelineError::Io {
            path: manifest_path.display().to_string(),
            source: e,
        })
    })?;
    #[derive(serde::Serialize)]
    struct Out {
        rows: usize,
        columns: usize,
        csv: String,
        manifest: String,
    }
    let summary = Out {
        rows: matrix.n_rows(),
        columns: matrix.n_cols() + 2, // + label + path
        csv: out.display().to_string(),
        manifest: manifest_path.display().to_string(),
    };
    if json {
        print_json(&summary);
    } else {
        println!(
            "wrote {} rows x {} columns to {}",
            summary.rows, summary.columns, summary.csv
        );
    }
    Ok(())
}

fn load_features(path: &PathBuf) -> Result<FeatureMatrix, CliError> {
    let manifest = FeatureManifest::standard();
    Ok(FeatureMatrix::from_csv(path, &manifest)?)
}

fn encode_labels(labels: &[String]) -> (Vec<String>, Vec<usize>) {
    let mut classes = labels.to_vec();
    classes.sort();
    classes.dedup();
    let encoded = labels
        .iter()
        .map(|l| classes.iter().position(|c| c == l).unwrap())
        .collect();
    (classes, encoded)
}

fn boost_once(
    matrix: &FeatureMatrix,
    p: usize,
    m: usize,
    epsilon: f64,
    seed: u64,
) -> Result<
    (
        serboost::feature_boosting::SelectionOutcome,
        serboost::feature_boosting::BoostedDataset,
    ),
    CliError,
> {
    let (_, labels) = encode_labels(&matrix.labels);
    let combos = sample_combinations(&matrix.columns, p, m, seed, None)?;
    let selection = score_and_select(&matrix.rows, &labels, &combos.combinations, epsilon)?;
    let retained: Vec<_> = selection.retained().cloned().collect();
    let bases: Vec<PrincipalBasis> = retained
        .iter()
        .map(|r| {
            let sub: Vec<Vec<f64>> = matrix
                .rows
                .iter()
                .map(|row| r.combination.indices.iter().map(|&i| row[i]).collect())
                .collect();
            pca_fit(&sub)
        })
        .collect::<Result<_, _>>()?;
    let boosted = build_boosted(&matrix.rows, &matrix.labels, &retained, &bases)?;
    Ok((selection, boosted))
}

fn cmd_boost(
    features: &PathBuf,
    p: usize,
    m: usize,
    epsilon: f64,
    seed: u64,
    json: bool,
) -> Result<(), CliError> {
    let matrix = load_features(features)?;
    let (selection, boosted) = boost_once(&matrix, p, m, epsilon, seed)?;
    if json {
        #[derive(serde::Serialize)]
        struct Out<'a> {
            alpha: f64,
            vrc_all: f64,
            retained: usize,
            scored: usize,
            boosted_columns: &'a [String],
        }
        print_json(&Out {
            alpha: selection.alpha,
            vrc_all: selection.vrc_all,
            retained: selection.retained().count(),
            scored: selection.reports.len(),
            boosted_columns: &boosted.columns,
        });
    } else {
        println!("vrc_all: {:.6}", selection.vrc_all);
        println!("alpha:   {:.6}", selection.alpha);
        println!(
            "retained {} of {} combinations -> {} boosted columns",
            selection.retained().count(),
            selection.reports.len(),
            boosted.columns.len()
        );
        for r in selection.retained().take(10) {
            println!("  sigma {:+.4}  [{}]", r.sigma, r.combination.names.join(", "));
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_train(
    features: &PathBuf,
    p: usize,
    m: usize,
    epsilon: f64,
    folds: usize,
    n_trees: usize,
    seed: u64,
    json: bool,
) -> Result<(), CliError> {
    let matrix = load_features(features)?;
    let (_, boosted) = boost_once(&matrix, p, m, epsilon, seed)?;
    let table = Table::new(boosted.columns.clone(), boosted.rows.clone());
    #[derive(serde::Serialize)]
    struct Row {
        model: String,
        mean_macro_f1: f64,
        mean_accuracy: f64,
        folds: usize,
    }
    let mut rows = Vec::new();
    for kind in ModelKind::REGISTRY {
        let mut spec = ModelSpec::new(kind, seed);
        if matches!(kind, ModelKind::ExtraTrees | ModelKind::RandomForest) {
            spec = spec.with("n_trees", n_trees as f64);
        }
        let report = cross_validate(&spec, &table, &boosted.labels, folds, seed)?;
        rows.push(Row {
            model: kind.name().to_string(),
            mean_macro_f1: report.mean_macro_f1,
            mean_accuracy: report.mean_accuracy,
            folds: report.folds,
        });
    }
    rows.sort_by(|a, b| b.mean_macro_f1.partial_cmp(&a.mean_macro_f1).unwrap());
    if json {
        print_json(&rows);
    } else {
        println!("{:<22} {:>9} {:>9} {:>6}", "model", "macro_f1", "accuracy", "folds");
        for r in &rows {
            println!(
                "{:<22} {:>9.4} {:>9.4} {:>6}",
                r.model, r.mean_macro_f1, r.mean_accuracy, r.folds
            );
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_explain(
    features: &PathBuf,
    p: usize,
    m: usize,
    epsilon: f64,
    permutations: usize,
    n_trees: usize,
    seed: u64,
    json: bool,
) -> Result<(), CliError> {
    let matrix = load_features(features)?;
    let (_, boosted) = boost_once(&matrix, p, m, epsilon, seed)?;
    let table = Table::new(boosted.columns.clone(), boosted.rows.clone());
    let spec = ModelSpec::new(ModelKind::ExtraTrees, seed).with("n_trees", n_trees as f64);
    let model = train(&spec, &table, &boosted.labels)?;
    let mut report = global_importance(&model, &boosted.rows, &boosted.rows, permutations, seed)?;
    report.backmapped = Some(backmap(&report, &boosted.provenance)?);
    if json {
        print_json(&report);
    } else {
        println!("top boosted columns:");
        for name in report.ranking.iter().take(10) {
            let e = report.pooled.iter().find(|e| &e.column == name).unwrap();
            println!("  {:<10} {:.6}", e.column, e.mean_abs_phi);
        }
        println!("top original features:");
        for f in report.backmapped.as_ref().unwrap().iter().take(10) {
            println!("  {:<16} {:.6}", f.feature, f.importance);
        }
    }
    Ok(())
}

fn cmd_run(
    config_path: &PathBuf,
    seed: Option<u64>,
    repeat: Option<usize>,
    json: bool,
) -> Result<(), CliError> {
    let mut config = RunConfig::from_file(config_path)?;
    if let Some(s) = seed {
        config.seed = s;
    }
    if let Some(r) = repeat {
        config.repeat = r;
    }
    config.validate()?;
    let (report, run_dir) = run(&config)?;
    if json {
        print_json(&report);
    } else {
        println!("run directory: {}", run_dir.display());
        println!(
            "converged by {} after {} iterations (chosen: {})",
            report.detail.convergence.rule,
            report.detail.iterations.len(),
            report.detail.chosen_iteration
        );
        let t = &report.detail.test_metrics;
        println!("{:<16} {:>8}", "metric", "value");
        println!("{:<16} {:>8.4}", "accuracy", t.accuracy);
        println!("{:<16} {:>8.4}", "macro_precision", t.macro_precision);
        println!("{:<16} {:>8.4}", "macro_recall", t.macro_recall);
        println!("{:<16} {:>8.4}", "macro_f1", t.macro_f1);
        println!(
            "repeats ({}): accuracy {:.4} ± {:.4}, macro F1 {:.4} ± {:.4}",
            report.repeats.len(),
            report.summary.mean_accuracy,
            report.summary.std_accuracy,
            report.summary.mean_macro_f1,
            report.summary.std_macro_f1
        );
    }
    Ok(())
}

fn cmd_compare(a: &PathBuf, b: &PathBuf, json: bool) -> Result<(), CliError> {
    let load = |p: &PathBuf| -> Result<RunReport, CliError> {
        let text = std::fs::read_to_string(p).map_err(|e| {
            CliError::Pipeline(PipelineError::Io {
                path: p.display().to_string(),
                source: e,
            })
        })?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: not a run report: {e}", p.display())))
    };
    let block = compare_methods(&load(a)?, &load(b)?)?;
    if json {
        print_json(&block);
    } else {
        println!(
            "accuracy: t = {:.4}, p = {:.6}{}",
            block.accuracy.t,
            block.accuracy.p,
            if block.accuracy.significant { " (significant)" } else { "" }
        );
        println!(
            "macro F1: t = {:.4}, p = {:.6}{}",
            block.macro_f1.t,
            block.macro_f1.p,
            if block.macro_f1.significant { " (significant)" } else { "" }
        );
    }
    Ok(())
}

// Compile-time guard that the CLI contract stays in sync with clap.
#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn feature_count_matches_extract_docs() {
        assert_eq!(N_FEATURES, 90);
    }
}
