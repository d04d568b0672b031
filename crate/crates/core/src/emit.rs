//! Dataset output: final record files, corpus statistics, and annotation
//! task export with pre-computed identical-span highlighting.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::judge::JudgeVerdict;
use crate::pair::{levenshtein_slices, CandidatePair};

#[derive(Debug, Error)]
pub enum EmitError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {source}")]
    Malformed {
        line: usize,
        source: serde_json::Error,
    },
    #[error("sample of {requested} requested but only {available} records available")]
    SampleTooLarge { requested: usize, available: usize },
}

/// One line of the released dataset.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DatasetRecord {
    pub pair_id: String,
    pub paper_id: String,
    pub final_text: String,
    pub commented_text: String,
    pub d_norm: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub judge_score: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub judge_label: Option<bool>,
}

impl DatasetRecord {
    pub fn from_pair(pair: &CandidatePair, verdict: Option<&JudgeVerdict>) -> Self {
        Self {
            pair_id: pair.pair_id.clone(),
            paper_id: pair.paper_id.clone(),
            final_text: pair.final_text.clone(),
            commented_text: pair.commented_text.clone(),
            d_norm: pair.d_norm,
            judge_score: verdict.and_then(|v| v.score),
            judge_label: verdict.and_then(|v| v.label),
        }
    }
}

/// Writes items as JSON lines through a temp file in the target directory,
/// renamed into place on success so failures never leave a partial file.
pub fn write_jsonl<T: Serialize>(items: &[T], path: &Path) -> Result<usize, EmitError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let tmp = match dir {
        Some(dir) => tempfile::NamedTempFile::new_in(dir)?,
        None => tempfile::NamedTempFile::new_in(".")?,
    };
    let mut writer = BufWriter::new(tmp);
    for item in items {
        serde_json::to_writer(&mut writer, item).map_err(std::io::Error::from)?;
        writer.write_all(b"\n")?;
    }
    let tmp = writer.into_inner().map_err(|e| e.into_error())?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(items.len())
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, EmitError> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line).map_err(|source| EmitError::Malformed {
                line: i + 1,
                source,
            })?,
        );
    }
    Ok(out)
}

/// Writes the dataset in pair_id order; returns the number of lines.
pub fn write_dataset(records: &[DatasetRecord], path: &Path) -> Result<usize, EmitError> {
    let mut sorted: Vec<&DatasetRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.pair_id.cmp(&b.pair_id));
    write_jsonl(&sorted, path)
}

/// Corpus-level characteristics of a dataset.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CorpusStats {
    pub n_pairs: usize,
    pub n_papers: usize,
    /// Pairs per distinct (paper, final paragraph).
    pub revs_per_paragraph: f64,
    /// Mean whitespace-token count over distinct final paragraphs.
    pub words_per_final_paragraph: f64,
    /// Mean over pairs of 100 * word-level Levenshtein / max word count.
    pub pct_word_diff: f64,
    pub empty: bool,
}

/// Word-level difference ratio of one pair, in percent.
fn word_diff_pct(final_text: &str, commented_text: &str) -> f64 {
    let f: Vec<&str> = final_text.split_whitespace().collect();
    let c: Vec<&str> = commented_text.split_whitespace().collect();
    let denominator = f.len().max(c.len());
    if denominator == 0 {
        return 0.0;
    }
    100.0 * levenshtein_slices(&f, &c) as f64 / denominator as f64
}

pub fn compute_stats(records: &[DatasetRecord]) -> CorpusStats {
    if records.is_empty() {
        return CorpusStats {
            n_pairs: 0,
            n_papers: 0,
            revs_per_paragraph: 0.0,
            words_per_final_paragraph: 0.0,
            pct_word_diff: 0.0,
            empty: true,
        };
    }
    let papers: BTreeSet<&str> = records.iter().map(|r| r.paper_id.as_str()).collect();
    let finals: BTreeSet<(&str, &str)> = records
        .iter()
        .map(|r| (r.paper_id.as_str(), r.final_text.as_str()))
        .collect();
    let total_words: usize = finals
        .iter()
        .map(|(_, text)| text.split_whitespace().count())
        .sum();
    // Summed in sorted order so the result is exactly permutation-invariant.
    let mut pct_values: Vec<f64> = records
        .iter()
        .map(|r| word_diff_pct(&r.final_text, &r.commented_text))
        .collect();
    pct_values.sort_by(f64::total_cmp);
    let pct_sum: f64 = pct_values.iter().sum();
    CorpusStats {
        n_pairs: records.len(),
        n_papers: papers.len(),
        revs_per_paragraph: records.len() as f64 / finals.len() as f64,
        words_per_final_paragraph: total_words as f64 / finals.len() as f64,
        pct_word_diff: pct_sum / records.len() as f64,
        empty: false,
    }
}

/// An identical fragment shared by both texts. Offsets and length are in
/// characters; slicing either text at its offset for `length` characters
/// yields `fragment` exactly.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct SharedSpan {
    pub fragment: String,
    pub final_offset: usize,
    pub commented_offset: usize,
    pub length: usize,
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    /// Character offset of the token start.
    start: usize,
    /// Character length of the token.
    len: usize,
}

fn tokens_with_offsets(s: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let mut char_idx = 0usize;
    let mut token_start_char = 0usize;
    let mut token_start_byte = None;
    for (byte_idx, ch) in s.char_indices() {
        if ch.is_whitespace() {
            if let Some(start_byte) = token_start_byte.take() {
                tokens.push(Token {
                    text: &s[start_byte..byte_idx],
                    start: token_start_char,
                    len: char_idx - token_start_char,
                });
            }
        } else if token_start_byte.is_none() {
            token_start_byte = Some(byte_idx);
            token_start_char = char_idx;
        }
        char_idx += 1;
    }
    if let Some(start_byte) = token_start_byte {
        tokens.push(Token {
            text: &s[start_byte..],
            start: token_start_char,
            len: char_idx - token_start_char,
        });
    }
    tokens
}

fn char_slice(s: &str, start: usize, len: usize) -> String {
    s.chars().skip(start).take(len).collect()
}

/// Longest common subsequence over whitespace tokens, merged into contiguous
/// runs. Adjacent matched tokens merge into one span only when the
/// whitespace between them is identical in both texts, which keeps the
/// fragment verbatim on both sides.
pub fn shared_spans(final_text: &str, commented_text: &str) -> Vec<SharedSpan> {
    let f = tokens_with_offsets(final_text);
    let c = tokens_with_offsets(commented_text);
    if f.is_empty() || c.is_empty() {
        return Vec::new();
    }

    // LCS table over token sequences.
    let mut dp = vec![vec![0usize; c.len() + 1]; f.len() + 1];
    for i in (0..f.len()).rev() {
        for j in (0..c.len()).rev() {
            dp[i][j] = if f[i].text == c[j].text {
                dp[i + 1][j + 1] + 1
            } else {
                dp[i + 1][j].max(dp[i][j + 1])
            };
        }
    }
    let mut matches = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < f.len() && j < c.len() {
        if f[i].text == c[j].text {
            matches.push((i, j));
            i += 1;
            j += 1;
        } else if dp[i + 1][j] >= dp[i][j + 1] {
            i += 1;
        } else {
            j += 1;
        }
    }

    // Merge runs of consecutive matches with identical inter-token gaps.
    // A run is its (first, last) matched (final, commented) token pair.
    type MatchRun = ((usize, usize), (usize, usize));
    let mut spans: Vec<SharedSpan> = Vec::new();
    let mut run: Option<MatchRun> = None;
    let flush = |run: &mut Option<MatchRun>, spans: &mut Vec<SharedSpan>| {
        if let Some(((fi0, cj0), (fi1, _))) = run.take() {
            let start = f[fi0].start;
            let end = f[fi1].start + f[fi1].len;
            spans.push(SharedSpan {
                fragment: char_slice(final_text, start, end - start),
                final_offset: start,
                commented_offset: c[cj0].start,
                length: end - start,
            });
        }
    };
    for &(fi, cj) in &matches {
        match run {
            Some((first, (last_f, last_c)))
                if fi == last_f + 1
                    && cj == last_c + 1
                    && gap(final_text, &f, last_f) == gap(commented_text, &c, last_c) =>
            {
                run = Some((first, (fi, cj)));
            }
            Some(_) => {
                flush(&mut run, &mut spans);
                run = Some(((fi, cj), (fi, cj)));
            }
            None => run = Some(((fi, cj), (fi, cj))),
        }
    }
    flush(&mut run, &mut spans);
    spans
}

/// The whitespace between token `idx` and token `idx + 1`.
fn gap(text: &str, tokens: &[Token<'_>], idx: usize) -> String {
    let from = tokens[idx].start + tokens[idx].len;
    let to = tokens[idx + 1].start;
    char_slice(text, from, to - from)
}

/// One line of the annotation task export.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AnnotationTask {
    pub id: String,
    pub data: TaskData,
    pub predictions: Vec<TaskPrediction>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TaskData {
    #[serde(rename = "final")]
    pub final_text: String,
    pub commented: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TaskPrediction {
    pub spans: Vec<SharedSpan>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ExportHeader {
    export_header: ExportHeaderBody,
}

#[derive(Debug, Serialize, Deserialize)]
struct ExportHeaderBody {
    seed: u64,
    n: usize,
    population: usize,
    generator: String,
}

pub fn task_from_record(record: &DatasetRecord) -> AnnotationTask {
    AnnotationTask {
        id: record.pair_id.clone(),
        data: TaskData {
            final_text: record.final_text.clone(),
            commented: record.commented_text.clone(),
        },
        predictions: vec![TaskPrediction {
            spans: shared_spans(&record.final_text, &record.commented_text),
        }],
    }
}

/// Exports a seeded deterministic sample of `n` records as annotation
/// tasks. The first line is a header recording the sampling parameters;
/// tasks follow in pair_id order.
pub fn export_annotation_tasks(
    records: &[DatasetRecord],
    n: usize,
    seed: u64,
    path: &Path,
) -> Result<usize, EmitError> {
    if n > records.len() {
        return Err(EmitError::SampleTooLarge {
            requested: n,
            available: records.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked: Vec<&DatasetRecord> = rand::seq::index::sample(&mut rng, records.len(), n)
        .into_iter()
        .map(|i| &records[i])
        .collect();
    picked.sort_by(|a, b| a.pair_id.cmp(&b.pair_id));

    let header = serde_json::to_value(ExportHeader {
        export_header: ExportHeaderBody {
            seed,
            n,
            population: records.len(),
            generator: "chacha8-index-sample".to_string(),
        },
    })
    .expect("header serializes");
    let mut lines = vec![header];
    for record in picked {
        lines.push(serde_json::to_value(task_from_record(record)).expect("task serializes"));
    }
    write_jsonl(&lines, path)?;
    Ok(n)
}
