//! `revminer` — mine early-stage revision pairs from LaTeX sources.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 backend error.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use revminer_core::agreement::{
    agreement_report, classification_metrics, derive_gold, optimize_threshold, AnnotationRecord,
    EvalReport,
};
use revminer_core::config::Config;
use revminer_core::emit::{compute_stats, export_annotation_tasks, read_jsonl, DatasetRecord};
use revminer_core::judge::{
    HttpBackend, JudgeBackend, JudgeError, JudgeMethod, JudgeOptions, JudgeVerdict, MockBackend,
    VerdictStatus,
};
use revminer_core::pipeline::{run_extract, run_ingest, run_judge, PipelineError};

#[derive(Parser)]
#[command(
    name = "revminer",
    version,
    about = "Mine early-stage revision pairs from LaTeX sources"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Filter a line-delimited metadata file by license and category.
    Ingest {
        /// Metadata file, one JSON record per line.
        #[arg(long)]
        metadata: PathBuf,
        /// File with one allowed license URI per line (default: built-in list).
        #[arg(long)]
        allow_licenses: Option<PathBuf>,
        /// Category prefix to admit.
        #[arg(long, default_value = "cs.")]
        category: String,
        /// Output directory for admitted.jsonl, skips.log and manifest.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract candidate revision pairs from a corpus of paper directories.
    Extract {
        /// Corpus root: one directory per paper.
        #[arg(long)]
        corpus: PathBuf,
        /// TOML config file (defaults apply when omitted).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output pair file (JSON lines). A manifest is written alongside.
        #[arg(long)]
        out: PathBuf,
    },
    /// Judge candidate pairs with an inference backend.
    Judge {
        /// Pair file produced by `extract`.
        #[arg(long)]
        pairs: PathBuf,
        /// Backend: `mock` or a base URL of a chat/completions service.
        #[arg(long)]
        backend: String,
        /// Model identifier for URL backends.
        #[arg(long, default_value = "default")]
        model: String,
        /// Seed for the mock backend.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = MethodArg::Pluie)]
        method: MethodArg,
        /// Decision threshold for pluie scores.
        #[arg(long, default_value_t = 0.0)]
        threshold: f64,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Kept-pair dataset output (JSON lines).
        #[arg(long)]
        out: PathBuf,
        /// Verdicts output (default: `<out dir>/verdicts.jsonl`).
        #[arg(long)]
        verdicts: Option<PathBuf>,
    },
    /// Evaluate judge verdicts against human annotations.
    Eval {
        /// Annotations file: {item_id, annotator_id, label} per line.
        #[arg(long)]
        annotations: PathBuf,
        /// Verdicts file produced by `judge`.
        #[arg(long)]
        verdicts: PathBuf,
        /// Also optimize the pluie threshold a posteriori.
        #[arg(long)]
        optimize_threshold: bool,
    },
    /// Print corpus statistics for a dataset file.
    Stats {
        #[arg(long)]
        dataset: PathBuf,
    },
    /// Export a seeded sample of pairs as annotation tasks.
    ExportTasks {
        /// Pair file produced by `extract` (or a dataset file).
        #[arg(long)]
        pairs: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Pluie,
    Generation,
}

impl From<MethodArg> for JudgeMethod {
    fn from(value: MethodArg) -> Self {
        match value {
            MethodArg::Pluie => JudgeMethod::Pluie,
            MethodArg::Generation => JudgeMethod::Generation,
        }
    }
}

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_BACKEND: u8 = 3;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are not usage errors.
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(classify(&e))
        }
    }
}

/// Backend failures exit 3; everything else that reaches here is a data
/// problem and exits 2.
fn classify(error: &anyhow::Error) -> u8 {
    for cause in error.chain() {
        if let Some(pipeline_error) = cause.downcast_ref::<PipelineError>() {
            if matches!(pipeline_error, PipelineError::Judge(JudgeError::Backend(_))) {
                return EXIT_BACKEND;
            }
        }
        if cause.downcast_ref::<JudgeError>().is_some() {
            return EXIT_BACKEND;
        }
    }
    EXIT_DATA
}

fn load_config(path: &Option<PathBuf>) -> anyhow::Result<Config> {
    Ok(match path {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    })
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Ingest {
            metadata,
            allow_licenses,
            category,
            out,
        } => {
            let mut config = Config::default();
            config.ingest.category_prefix = category;
            if let Some(path) = allow_licenses {
                let text = std::fs::read_to_string(&path)?;
                config.ingest.license_allowlist = text
                    .lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty() && !l.starts_with('#'))
                    .map(str::to_string)
                    .collect();
            }
            let (summary, _) = run_ingest(&metadata, &config, &out)?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
            Ok(())
        }
        Command::Extract {
            corpus,
            config,
            out,
        } => {
            let config = load_config(&config)?;
            let (pairs, manifest) = run_extract(&corpus, &config, &out)?;
            manifest.write(&manifest_path(&out))?;
            log::info!("wrote {} candidate pairs to {}", pairs.len(), out.display());
            println!(
                "{}",
                serde_json::to_string_pretty(&manifest.counts).expect("counts serialize")
            );
            Ok(())
        }
        Command::Judge {
            pairs,
            backend,
            model,
            seed,
            method,
            threshold,
            config,
            out,
            verdicts,
        } => {
            let config = load_config(&config)?;
            let opts = JudgeOptions {
                method: method.into(),
                threshold,
                max_inflight: config.judge.max_inflight,
                retries: config.judge.retries,
                retry_base: Duration::from_millis(config.judge.retry_base_ms),
            };
            let verdicts_path = verdicts.unwrap_or_else(|| default_verdicts_path(&out));
            let backend_impl: Box<dyn JudgeBackend> = if backend == "mock" {
                Box::new(MockBackend::seeded(seed))
            } else {
                Box::new(HttpBackend::new(&backend, &model))
            };
            let (summary, manifest) = run_judge(
                &pairs,
                backend_impl.as_ref(),
                &opts,
                config.judge.checkpoint_every,
                &out,
                &verdicts_path,
            )?;
            manifest.write(&manifest_path(&out))?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
            Ok(())
        }
        Command::Eval {
            annotations,
            verdicts,
            optimize_threshold: optimize,
        } => {
            let annotation_records: Vec<AnnotationRecord> = read_jsonl(&annotations)?;
            let verdict_records: Vec<JudgeVerdict> = read_jsonl(&verdicts)?;
            let report = eval_report(&annotation_records, &verdict_records, optimize)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(())
        }
        Command::Stats { dataset } => {
            let records: Vec<DatasetRecord> = read_jsonl(&dataset)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&compute_stats(&records))?
            );
            Ok(())
        }
        Command::ExportTasks {
            pairs,
            n,
            seed,
            out,
        } => {
            let records: Vec<DatasetRecord> = read_jsonl(&pairs)?;
            let written = export_annotation_tasks(&records, n, seed, &out)?;
            log::info!("exported {written} tasks to {}", out.display());
            Ok(())
        }
    }
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut os = out.as_os_str().to_owned();
    os.push(".manifest.json");
    PathBuf::from(os)
}

fn default_verdicts_path(out: &Path) -> PathBuf {
    out.with_file_name("verdicts.jsonl")
}

#[derive(serde::Serialize)]
struct EvalOutput {
    n_items: usize,
    n_verdicts: usize,
    n_joined: usize,
    agreement: revminer_core::agreement::AgreementReport,
    judge_eval: EvalReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    threshold_optimization: Option<ThresholdOutput>,
}

#[derive(serde::Serialize)]
struct ThresholdOutput {
    optimal_threshold: f64,
    report: EvalReport,
}

/// Joins verdicts to majority-vote gold labels on pair id and computes the
/// agreement and evaluation reports. Items are joined in sorted id order so
/// the output is stable.
fn eval_report(
    annotations: &[AnnotationRecord],
    verdicts: &[JudgeVerdict],
    optimize: bool,
) -> anyhow::Result<EvalOutput> {
    let agreement = agreement_report(annotations)?;
    let gold = derive_gold(annotations)?;

    let by_id: BTreeMap<&str, &JudgeVerdict> = verdicts
        .iter()
        .filter(|v| v.status == VerdictStatus::Ok)
        .map(|v| (v.pair_id.as_str(), v))
        .collect();

    let mut predicted = Vec::new();
    let mut reference = Vec::new();
    let mut scores = Vec::new();
    let mut all_scored = true;
    for (item, gold_label) in &gold {
        if let Some(verdict) = by_id.get(item.as_str()) {
            predicted.push(verdict.label.expect("ok verdicts carry labels"));
            reference.push(*gold_label);
            match verdict.score {
                Some(score) => scores.push(score),
                None => all_scored = false,
            }
        }
    }
    if predicted.is_empty() {
        anyhow::bail!("no verdicts matched the annotated items");
    }
    let judge_eval = classification_metrics(&predicted, &reference)?;

    let threshold_optimization = if optimize {
        if !all_scored {
            anyhow::bail!("--optimize-threshold needs pluie verdicts with scores");
        }
        let (optimal, report) = optimize_threshold(&scores, &reference)?;
        Some(ThresholdOutput {
            optimal_threshold: optimal,
            report,
        })
    } else {
        None
    };

    Ok(EvalOutput {
        n_items: gold.len(),
        n_verdicts: verdicts.len(),
        n_joined: predicted.len(),
        agreement,
        judge_eval,
        threshold_optimization,
    })
}
