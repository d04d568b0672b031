//! Classify candidate pairs as genuine revisions.
//!
//! Two methods against an abstract inference backend:
//!
//! - generation: the model answers the binary question directly and the
//!   decision is parsed from the completion;
//! - pluie: the model's mean-token log-probability of answering "Yes" minus
//!   that of "No", thresholded. Positive scores favor the revision
//!   hypothesis.
//!
//! The score is a log-perplexity ratio, sign-corrected so positive favors
//! "Yes". Absolute threshold values are therefore model- and
//! definition-dependent; the definition travels with every verdict via the
//! `threshold` field.

mod http;
mod mock;

pub use http::{HttpBackend, TOKEN_ENV};
pub use mock::{MockBackend, MockScores};

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pair::CandidatePair;

/// The instruction block sent before the paragraph pair, stored as a
/// versioned resource so the wording is bit-exact across runs.
pub const PROMPT_INSTRUCTIONS: &str = include_str!("judge/prompt.txt");

#[derive(Debug, Error)]
pub enum BackendError {
    #[error("backend unreachable: {0}")]
    Unreachable(String),
    #[error("backend request failed: {0}")]
    Transient(String),
    #[error("backend protocol error: {0}")]
    Protocol(String),
}

impl BackendError {
    fn is_retryable(&self) -> bool {
        matches!(self, BackendError::Transient(_))
    }
}

#[derive(Debug, Error)]
pub enum JudgeError {
    #[error("unparseable judge answer: {0:?}")]
    UnparseableAnswer(String),
    #[error(transparent)]
    Backend(#[from] BackendError),
}

/// Log-probability of a forced continuation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuationScore {
    pub total_logprob: f64,
    pub token_count: usize,
}

impl ContinuationScore {
    pub fn mean_token_logprob(&self) -> f64 {
        self.total_logprob / self.token_count as f64
    }
}

/// What a judging backend must provide: deterministic completion and
/// forced-continuation scoring. Determinism means identical inputs produce
/// identical outputs — completions are generated with sampling disabled.
pub trait JudgeBackend: Sync {
    fn model_id(&self) -> &str;

    fn complete(&self, prompt: &str) -> Result<String, BackendError>;

    fn score_continuation(
        &self,
        prompt: &str,
        continuation: &str,
    ) -> Result<ContinuationScore, BackendError>;

    /// Cheap reachability probe, called once before a judging run.
    fn healthcheck(&self) -> Result<(), BackendError> {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JudgeMethod {
    Generation,
    Pluie,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictStatus {
    /// A decision was reached; `label` is set.
    Ok,
    /// The completion was neither "Yes" nor "No"; routed to rejects.
    Unparseable,
    /// The backend failed after bounded retries.
    Unresolved,
}

/// One judging record. Every input pair produces exactly one verdict,
/// including failures; pluie verdicts carry the score and threshold,
/// generation verdicts carry neither.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct JudgeVerdict {
    pub pair_id: String,
    pub method: JudgeMethod,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub score: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub label: Option<bool>,
    pub model_id: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub threshold: Option<f64>,
    pub status: VerdictStatus,
    /// Raw completion (unparseable) or error text (unresolved).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
}

/// Retry and concurrency settings for a judging run.
#[derive(Debug, Clone, Copy)]
pub struct JudgeOptions {
    pub method: JudgeMethod,
    pub threshold: f64,
    pub max_inflight: usize,
    pub retries: u32,
    pub retry_base: Duration,
}

impl Default for JudgeOptions {
    fn default() -> Self {
        Self {
            method: JudgeMethod::Pluie,
            threshold: 0.0,
            max_inflight: 4,
            retries: 3,
            retry_base: Duration::from_millis(200),
        }
    }
}

/// Builds the judging prompt: the instruction block verbatim, then the
/// suspected original as `P1:` and the final paragraph as `P2:`.
pub fn build_prompt(pair: &CandidatePair) -> String {
    format!(
        "{}\n\nP1: {}\n\nP2: {}\n",
        PROMPT_INSTRUCTIONS.trim_end(),
        pair.commented_text,
        pair.final_text
    )
}

fn with_retries<T>(
    retries: u32,
    base: Duration,
    mut call: impl FnMut() -> Result<T, BackendError>,
) -> Result<T, BackendError> {
    let mut attempt = 0;
    loop {
        match call() {
            Ok(value) => return Ok(value),
            Err(e) if e.is_retryable() && attempt < retries => {
                let delay = base * 2u32.saturating_pow(attempt);
                if !delay.is_zero() {
                    std::thread::sleep(delay);
                }
                attempt += 1;
            }
            Err(e) => return Err(e),
        }
    }
}

/// Asks the backend the binary question directly. The trimmed, case-folded
/// completion must begin with "yes" or "no".
pub fn judge_by_generation(
    backend: &dyn JudgeBackend,
    pair: &CandidatePair,
    opts: &JudgeOptions,
) -> Result<JudgeVerdict, JudgeError> {
    let prompt = build_prompt(pair);
    let completion = with_retries(opts.retries, opts.retry_base, || backend.complete(&prompt))?;
    let folded = completion.trim().to_lowercase();
    let label = if folded.starts_with("yes") {
        true
    } else if folded.starts_with("no") {
        false
    } else {
        return Err(JudgeError::UnparseableAnswer(completion));
    };
    Ok(JudgeVerdict {
        pair_id: pair.pair_id.clone(),
        method: JudgeMethod::Generation,
        score: None,
        label: Some(label),
        model_id: backend.model_id().to_string(),
        threshold: None,
        status: VerdictStatus::Ok,
        detail: None,
    })
}

/// Mean-token log-probability of "Yes" minus that of "No" after the prompt.
pub fn pluie_score(
    backend: &dyn JudgeBackend,
    pair: &CandidatePair,
    opts: &JudgeOptions,
) -> Result<f64, JudgeError> {
    let prompt = build_prompt(pair);
    let yes = with_retries(opts.retries, opts.retry_base, || {
        backend.score_continuation(&prompt, "Yes")
    })?;
    let no = with_retries(opts.retries, opts.retry_base, || {
        backend.score_continuation(&prompt, "No")
    })?;
    Ok(yes.mean_token_logprob() - no.mean_token_logprob())
}

/// Strictly-greater thresholding; a tie at the threshold is rejected, so the
/// default threshold 0 drops perfectly ambivalent scores.
pub fn threshold_decision(score: f64, threshold: f64) -> bool {
    score > threshold
}

/// Judges one pair; failures are folded into the verdict status instead of
/// being dropped.
pub fn judge_pair(
    backend: &dyn JudgeBackend,
    pair: &CandidatePair,
    opts: &JudgeOptions,
) -> JudgeVerdict {
    let failed = |status: VerdictStatus, detail: String| JudgeVerdict {
        pair_id: pair.pair_id.clone(),
        method: opts.method,
        score: None,
        label: None,
        model_id: backend.model_id().to_string(),
        threshold: None,
        status,
        detail: Some(detail),
    };
    match opts.method {
        JudgeMethod::Generation => match judge_by_generation(backend, pair, opts) {
            Ok(verdict) => verdict,
            Err(JudgeError::UnparseableAnswer(raw)) => failed(VerdictStatus::Unparseable, raw),
            Err(JudgeError::Backend(e)) => failed(VerdictStatus::Unresolved, e.to_string()),
        },
        JudgeMethod::Pluie => match pluie_score(backend, pair, opts) {
            Ok(score) => JudgeVerdict {
                pair_id: pair.pair_id.clone(),
                method: JudgeMethod::Pluie,
                score: Some(score),
                label: Some(threshold_decision(score, opts.threshold)),
                model_id: backend.model_id().to_string(),
                threshold: Some(opts.threshold),
                status: VerdictStatus::Ok,
                detail: None,
            },
            Err(JudgeError::Backend(e)) => failed(VerdictStatus::Unresolved, e.to_string()),
            Err(JudgeError::UnparseableAnswer(raw)) => failed(VerdictStatus::Unparseable, raw),
        },
    }
}

/// Judges a batch, issuing requests concurrently up to `max_inflight` and
/// re-ordering results to input order so output is schedule-independent.
pub(crate) fn judge_batch(
    pairs: &[&CandidatePair],
    backend: &dyn JudgeBackend,
    opts: &JudgeOptions,
) -> Vec<JudgeVerdict> {
    let workers = opts.max_inflight.max(1).min(pairs.len().max(1));
    if workers <= 1 {
        return pairs.iter().map(|p| judge_pair(backend, p, opts)).collect();
    }
    let cursor = std::sync::atomic::AtomicUsize::new(0);
    let slots: Vec<std::sync::Mutex<Option<JudgeVerdict>>> = (0..pairs.len())
        .map(|_| std::sync::Mutex::new(None))
        .collect();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = cursor.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= pairs.len() {
                    break;
                }
                let verdict = judge_pair(backend, pairs[i], opts);
                *slots[i].lock().unwrap() = Some(verdict);
            });
        }
    });
    slots
        .into_iter()
        .map(|s| s.into_inner().unwrap().expect("worker filled every slot"))
        .collect()
}

/// Judges every pair and splits the kept ones out. Aborts only when the
/// backend is unreachable before any work starts; per-pair failures are
/// recorded in their verdicts. The kept list preserves input order.
pub fn filter_pairs(
    pairs: &[CandidatePair],
    backend: &dyn JudgeBackend,
    opts: &JudgeOptions,
) -> Result<(Vec<CandidatePair>, Vec<JudgeVerdict>), JudgeError> {
    backend.healthcheck()?;
    let refs: Vec<&CandidatePair> = pairs.iter().collect();
    let verdicts = judge_batch(&refs, backend, opts);
    let kept = pairs
        .iter()
        .zip(&verdicts)
        .filter(|(_, v)| v.label == Some(true))
        .map(|(p, _)| p.clone())
        .collect();
    Ok((kept, verdicts))
}
