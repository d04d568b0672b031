//! Orchestration: chain ingest → clean → segment → pair → judge → emit over
//! a corpus, with checkpointing and run manifests.
//!
//! A corpus root contains one directory per paper (the directory name is the
//! paper id) holding its pre-extracted source files. Files within a paper
//! are processed independently in path order; block indices continue across
//! files so pair ids stay unique within the paper.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agreement::AgreementError;
use crate::clean::clean_document;
use crate::config::Config;
use crate::diag::Diagnostics;
use crate::emit::{read_jsonl, write_jsonl, DatasetRecord, EmitError};
use crate::ingest::{select_tex_files, IngestError, PaperMeta};
use crate::judge::{judge_batch, JudgeBackend, JudgeError, JudgeOptions, JudgeVerdict};
use crate::pair::{extract_candidates, CandidatePair};
use crate::segment::segment_blocks;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Judge(#[from] JudgeError),
    #[error(transparent)]
    Emit(#[from] EmitError),
    #[error(transparent)]
    Agreement(#[from] AgreementError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Audit record of one pipeline execution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub started_at: String,
    pub finished_at: String,
    pub config: serde_json::Value,
    pub seeds: BTreeMap<String, u64>,
    pub counts: BTreeMap<String, u64>,
    pub diagnostics: Vec<String>,
}

impl RunManifest {
    fn begin(config: serde_json::Value) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            started_at: chrono::Utc::now().to_rfc3339(),
            finished_at: String::new(),
            config,
            seeds: BTreeMap::new(),
            counts: BTreeMap::new(),
            diagnostics: Vec::new(),
        }
    }

    fn finish(&mut self, diag: &Diagnostics) {
        self.finished_at = chrono::Utc::now().to_rfc3339();
        self.diagnostics = diag.lines();
    }

    pub fn write(&self, path: &Path) -> Result<(), PipelineError> {
        let mut file = File::create(path)?;
        serde_json::to_writer_pretty(&mut file, self).map_err(std::io::Error::from)?;
        file.write_all(b"\n")?;
        Ok(())
    }
}

/// Outcome of the `ingest` stage.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IngestSummary {
    pub admitted: usize,
    pub skipped_lines: usize,
}

/// Filters a metadata file and writes the admitted records plus the skip
/// log into `out_dir`.
pub fn run_ingest(
    metadata_path: &Path,
    config: &Config,
    out_dir: &Path,
) -> Result<(IngestSummary, RunManifest), PipelineError> {
    let mut manifest = RunManifest::begin(config_snapshot(config));
    let diag = Diagnostics::new();
    let allowlist = config.ingest.license_allowlist.iter().cloned().collect();
    let reader = BufReader::new(File::open(metadata_path)?);
    let admitted =
        crate::ingest::filter_metadata(reader, &allowlist, &config.ingest.category_prefix, &diag)?;

    std::fs::create_dir_all(out_dir)?;
    write_jsonl(&admitted, &out_dir.join("admitted.jsonl"))?;
    std::fs::write(out_dir.join("skips.log"), diag.lines().join("\n"))?;

    manifest
        .counts
        .insert("metadata_admitted".into(), admitted.len() as u64);
    manifest
        .counts
        .insert("metadata_skipped".into(), diag.count() as u64);
    manifest.finish(&diag);
    manifest.write(&out_dir.join("manifest.json"))?;
    Ok((
        IngestSummary {
            admitted: admitted.len(),
            skipped_lines: diag.count(),
        },
        manifest,
    ))
}

/// Re-exported for tests and tooling: parse admitted metadata back.
pub fn read_metadata(path: &Path) -> Result<Vec<PaperMeta>, PipelineError> {
    Ok(read_jsonl(path)?)
}

#[derive(Debug, Default)]
struct UnitOutcome {
    pairs: Vec<CandidatePair>,
    files_seen: u64,
    files_selected: u64,
    files_cleaned: u64,
    blocks: u64,
    commented_blocks: u64,
    final_blocks: u64,
    diagnostics: Vec<String>,
}

fn process_paper(paper_id: &str, root: &Path, config: &Config) -> Result<UnitOutcome, IngestError> {
    let diag = Diagnostics::new();
    let mut outcome = UnitOutcome::default();

    let mut tex_count = 0u64;
    for entry in walkdir::WalkDir::new(root)
        .follow_links(true)
        .into_iter()
        .flatten()
    {
        if entry.file_type().is_file() {
            let is_tex = entry
                .path()
                .extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| {
                    crate::ingest::LATEX_EXTENSIONS
                        .iter()
                        .any(|x| e.eq_ignore_ascii_case(x))
                });
            if is_tex {
                tex_count += 1;
            }
        }
    }
    outcome.files_seen = tex_count;

    let files = select_tex_files(root, &diag)?;
    outcome.files_selected = files.len() as u64;

    let policy = config.pairing.window_policy();
    let mut index_offset = 0usize;
    for file in files {
        let raw = file.lines.join("\n");
        let lines = match clean_document(&raw, &config.clean, &diag) {
            Ok(lines) => lines,
            Err(e) => {
                diag.skip(format!("{paper_id}/{}", file.relative_path.display()), e);
                continue;
            }
        };
        outcome.files_cleaned += 1;
        let mut blocks = segment_blocks(&lines);
        for block in &mut blocks {
            block.index += index_offset;
        }
        if let Some(last) = blocks.last() {
            index_offset = last.index + 1;
        }
        outcome.blocks += blocks.len() as u64;
        outcome.commented_blocks += blocks
            .iter()
            .filter(|b| b.kind == crate::segment::BlockKind::Commented)
            .count() as u64;
        outcome.final_blocks += blocks
            .iter()
            .filter(|b| b.kind == crate::segment::BlockKind::Final)
            .count() as u64;
        outcome.pairs.extend(extract_candidates(
            &blocks,
            paper_id,
            config.pairing.radius,
            config.pairing.threshold,
            &policy,
        ));
    }
    outcome.diagnostics = diag.lines();
    Ok(outcome)
}

/// Runs ingest through pair extraction over every paper directory under
/// `corpus_root`, writing the candidate pair file to `out_path`. Outputs are
/// deterministic: papers and files are processed in path order and
/// per-worker results are merged back in that order.
pub fn run_extract(
    corpus_root: &Path,
    config: &Config,
    out_path: &Path,
) -> Result<(Vec<CandidatePair>, RunManifest), PipelineError> {
    let mut manifest = RunManifest::begin(config_snapshot(config));
    let diag = Diagnostics::new();

    let mut papers: Vec<(String, PathBuf)> = Vec::new();
    let entries = std::fs::read_dir(corpus_root).map_err(|source| IngestError::UnreadableRoot {
        path: corpus_root.to_path_buf(),
        source,
    })?;
    for entry in entries {
        let entry = entry.map_err(IngestError::Io)?;
        if entry.file_type().map_err(IngestError::Io)?.is_dir() {
            papers.push((
                entry.file_name().to_string_lossy().into_owned(),
                entry.path(),
            ));
        } else {
            diag.skip(entry.path().display(), "not a paper directory");
        }
    }
    papers.sort();

    let workers = config.workers.max(1);
    let outcomes: Vec<Result<UnitOutcome, IngestError>> = if workers == 1 {
        papers
            .iter()
            .map(|(id, path)| process_paper(id, path, config))
            .collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("worker pool");
        pool.install(|| {
            use rayon::prelude::*;
            papers
                .par_iter()
                .map(|(id, path)| process_paper(id, path, config))
                .collect()
        })
    };

    let mut pairs: Vec<CandidatePair> = Vec::new();
    let mut totals = UnitOutcome::default();
    for outcome in outcomes {
        let outcome = outcome?;
        totals.files_seen += outcome.files_seen;
        totals.files_selected += outcome.files_selected;
        totals.files_cleaned += outcome.files_cleaned;
        totals.blocks += outcome.blocks;
        totals.commented_blocks += outcome.commented_blocks;
        totals.final_blocks += outcome.final_blocks;
        diag.append_raw(outcome.diagnostics);
        pairs.extend(outcome.pairs);
    }

    write_jsonl(&pairs, out_path)?;

    manifest.counts.insert("papers".into(), papers.len() as u64);
    manifest
        .counts
        .insert("tex_files".into(), totals.files_seen);
    manifest
        .counts
        .insert("files_selected".into(), totals.files_selected);
    manifest
        .counts
        .insert("files_cleaned".into(), totals.files_cleaned);
    manifest.counts.insert("blocks".into(), totals.blocks);
    manifest
        .counts
        .insert("commented_blocks".into(), totals.commented_blocks);
    manifest
        .counts
        .insert("final_blocks".into(), totals.final_blocks);
    manifest
        .counts
        .insert("candidate_pairs".into(), pairs.len() as u64);
    manifest.finish(&diag);
    Ok((pairs, manifest))
}

fn config_snapshot(config: &Config) -> serde_json::Value {
    serde_json::to_value(config).expect("config serializes")
}

/// Path of the checkpoint file used while judging.
pub fn checkpoint_path(verdicts_path: &Path) -> PathBuf {
    let mut os = verdicts_path.as_os_str().to_owned();
    os.push(".ckpt");
    PathBuf::from(os)
}

/// Outcome of the `judge` stage.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JudgeSummary {
    pub pairs_in: usize,
    pub from_checkpoint: usize,
    pub newly_judged: usize,
    pub kept: usize,
}

/// Judges a pair file with checkpointing. Verdicts are appended to
/// `<verdicts>.ckpt` every `checkpoint_every` pairs; on restart, pairs whose
/// verdicts are already checkpointed are not re-queried. The final kept and
/// verdict files are written atomically at the end and the checkpoint is
/// removed, so an interrupted-then-resumed run is byte-identical to an
/// uninterrupted one.
pub fn run_judge(
    pairs_path: &Path,
    backend: &dyn JudgeBackend,
    opts: &JudgeOptions,
    checkpoint_every: usize,
    kept_path: &Path,
    verdicts_path: &Path,
) -> Result<(JudgeSummary, RunManifest), PipelineError> {
    let mut manifest = RunManifest::begin(serde_json::json!({
        "method": opts.method,
        "model_id": backend.model_id(),
        "threshold": opts.threshold,
        "max_inflight": opts.max_inflight,
        "retries": opts.retries,
        "checkpoint_every": checkpoint_every,
    }));
    let diag = Diagnostics::new();
    let pairs: Vec<CandidatePair> = read_jsonl(pairs_path)?;

    // Abort before any writes when the backend is down.
    backend.healthcheck().map_err(JudgeError::from)?;

    let ckpt = checkpoint_path(verdicts_path);
    let mut done: BTreeMap<String, JudgeVerdict> = BTreeMap::new();
    if ckpt.exists() {
        for verdict in read_checkpoint(&ckpt)? {
            done.insert(verdict.pair_id.clone(), verdict);
        }
    }
    let from_checkpoint = done.len();

    let todo: Vec<&CandidatePair> = pairs
        .iter()
        .filter(|p| !done.contains_key(&p.pair_id))
        .collect();
    let newly_judged = todo.len();

    let mut ckpt_file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(&ckpt)?;
    for chunk in todo.chunks(checkpoint_every.max(1)) {
        let verdicts = judge_batch(chunk, backend, opts);
        for verdict in &verdicts {
            serde_json::to_writer(&mut ckpt_file, verdict).map_err(std::io::Error::from)?;
            ckpt_file.write_all(b"\n")?;
        }
        ckpt_file.sync_all()?;
        for verdict in verdicts {
            done.insert(verdict.pair_id.clone(), verdict);
        }
    }
    drop(ckpt_file);

    // Assemble in input pair order regardless of how verdicts were obtained.
    let verdicts: Vec<&JudgeVerdict> = pairs
        .iter()
        .map(|p| done.get(&p.pair_id).expect("every pair judged"))
        .collect();
    let kept: Vec<DatasetRecord> = pairs
        .iter()
        .zip(&verdicts)
        .filter(|(_, v)| v.label == Some(true))
        .map(|(p, v)| DatasetRecord::from_pair(p, Some(v)))
        .collect();

    crate::emit::write_dataset(&kept, kept_path)?;
    write_jsonl(&verdicts, verdicts_path)?;
    std::fs::remove_file(&ckpt)?;

    manifest
        .counts
        .insert("pairs_in".into(), pairs.len() as u64);
    manifest
        .counts
        .insert("from_checkpoint".into(), from_checkpoint as u64);
    manifest
        .counts
        .insert("newly_judged".into(), newly_judged as u64);
    manifest.counts.insert("kept".into(), kept.len() as u64);
    manifest.counts.insert(
        "unresolved".into(),
        verdicts
            .iter()
            .filter(|v| v.status == crate::judge::VerdictStatus::Unresolved)
            .count() as u64,
    );
    manifest.counts.insert(
        "unparseable".into(),
        verdicts
            .iter()
            .filter(|v| v.status == crate::judge::VerdictStatus::Unparseable)
            .count() as u64,
    );
    manifest.finish(&diag);
    Ok((
        JudgeSummary {
            pairs_in: pairs.len(),
            from_checkpoint,
            newly_judged,
            kept: kept.len(),
        },
        manifest,
    ))
}

fn read_checkpoint(path: &Path) -> Result<Vec<JudgeVerdict>, PipelineError> {
    let reader = BufReader::new(File::open(path)?);
    let mut verdicts = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        // A truncated trailing line (interrupted mid-write) is re-judged.
        match serde_json::from_str::<JudgeVerdict>(&line) {
            Ok(v) => verdicts.push(v),
            Err(_) => break,
        }
    }
    Ok(verdicts)
}
