//! Candidate revision pair extraction.
//!
//! For each commented block we look at the final blocks up to `radius`
//! positions away and compute a normalized difference ratio
//! `lev(f, c) / max(|f|, |c|)` over character lengths. Because a revision
//! may affect only part of a paragraph, the ratio is minimized over a
//! sliding window of substrings of the final text. Pairs below the
//! threshold are candidate revisions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::segment::{Block, BlockKind};

pub const DEFAULT_RADIUS: usize = 5;
pub const DEFAULT_THRESHOLD: f64 = 0.7;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PairError {
    #[error("texts must be non-empty")]
    EmptyText,
}

/// Levenshtein distance between two strings, counted in characters.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    levenshtein_slices(&a, &b)
}

/// Levenshtein distance over arbitrary element slices (single-element
/// insertions, deletions, substitutions).
pub fn levenshtein_slices<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    // Trimming the common prefix and suffix is exact and cheap.
    let prefix = a.iter().zip(b.iter()).take_while(|(x, y)| x == y).count();
    let (a, b) = (&a[prefix..], &b[prefix..]);
    let suffix = a
        .iter()
        .rev()
        .zip(b.iter().rev())
        .take_while(|(x, y)| x == y)
        .count();
    let (a, b) = (&a[..a.len() - suffix], &b[..b.len() - suffix]);

    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }

    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let cost = usize::from(x != y);
            cur[j + 1] = (cur[j] + 1).min(prev[j + 1] + 1).min(prev[j] + cost);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Sliding-window geometry for [`windowed_norm_distance`].
///
/// Windows have length `min(|f|, |c|)` and start at offsets spaced by
/// `max(1, floor(len * stride_fraction))`; the window flush with the end of
/// the final text is always included, and `include_full` adds the whole
/// final text as one more candidate.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct WindowPolicy {
    pub stride_fraction: f64,
    pub include_full: bool,
}

impl Default for WindowPolicy {
    fn default() -> Self {
        Self {
            stride_fraction: 0.25,
            include_full: true,
        }
    }
}

impl WindowPolicy {
    /// A policy whose stride is one character, enumerating every offset.
    pub fn exhaustive() -> Self {
        Self {
            stride_fraction: 1e-9,
            include_full: true,
        }
    }

    fn stride(&self, window_len: usize) -> usize {
        ((window_len as f64) * self.stride_fraction)
            .floor()
            .max(1.0) as usize
    }
}

/// The arg-min window of a sliding-window comparison, in characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub offset: usize,
    pub length: usize,
}

/// Minimum normalized difference ratio between `commented` and the
/// enumerated windows of `final_text`, with the window that attains it.
/// Ties go to the earliest enumerated window (smallest offset; the
/// stride-length window before the full text).
pub fn windowed_norm_distance(
    final_text: &str,
    commented: &str,
    policy: &WindowPolicy,
) -> Result<(f64, Window), PairError> {
    if final_text.is_empty() || commented.is_empty() {
        return Err(PairError::EmptyText);
    }
    let f: Vec<char> = final_text.chars().collect();
    let c: Vec<char> = commented.chars().collect();
    let len = f.len().min(c.len());
    let stride = policy.stride(len);

    let mut best: Option<(f64, Window)> = None;
    let consider = |offset: usize, length: usize, best: &mut Option<(f64, Window)>| {
        let window = &f[offset..offset + length];
        let d = levenshtein_slices(window, &c) as f64 / length.max(c.len()) as f64;
        if best.is_none_or(|(bd, _)| d < bd) {
            *best = Some((d, Window { offset, length }));
        }
    };

    let mut offset = 0;
    while offset + len <= f.len() {
        consider(offset, len, &mut best);
        offset += stride;
    }
    // The window flush with the end of the text.
    consider(f.len() - len, len, &mut best);
    if policy.include_full && len < f.len() {
        consider(0, f.len(), &mut best);
    }
    Ok(best.expect("at least one window considered"))
}

/// A (final paragraph, commented paragraph) candidate revision pair.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CandidatePair {
    /// `<paper_id>:<final block index>:<commented block index>` — stable
    /// across runs for reproducible joins.
    pub pair_id: String,
    pub paper_id: String,
    pub final_text: String,
    pub commented_text: String,
    pub d_norm: f64,
    pub best_window: Window,
    /// Position of the commented block relative to the final block
    /// (negative: the comment precedes the final paragraph).
    pub block_distance: i64,
}

/// Emits a candidate pair for every (final, commented) block combination
/// within `radius` whose windowed ratio is strictly below `threshold`.
/// All qualifying commented candidates per final paragraph are retained.
/// Output is sorted by (final block index, commented block index).
pub fn extract_candidates(
    blocks: &[Block],
    paper_id: &str,
    radius: usize,
    threshold: f64,
    policy: &WindowPolicy,
) -> Vec<CandidatePair> {
    let mut keyed: Vec<(usize, usize, CandidatePair)> = Vec::new();
    for c in blocks.iter().filter(|b| b.kind == BlockKind::Commented) {
        for f in blocks.iter().filter(|b| b.kind == BlockKind::Final) {
            let distance = f.index.abs_diff(c.index);
            if distance == 0 || distance > radius {
                continue;
            }
            let (d_norm, best_window) = windowed_norm_distance(&f.text, &c.text, policy)
                .expect("block text is non-empty by construction");
            if d_norm < threshold {
                keyed.push((
                    f.index,
                    c.index,
                    CandidatePair {
                        pair_id: format!("{paper_id}:{}:{}", f.index, c.index),
                        paper_id: paper_id.to_string(),
                        final_text: f.text.clone(),
                        commented_text: c.text.clone(),
                        d_norm,
                        best_window,
                        block_distance: c.index as i64 - f.index as i64,
                    },
                ));
            }
        }
    }
    keyed.sort_by_key(|(f, c, _)| (*f, *c));
    keyed.into_iter().map(|(_, _, p)| p).collect()
}
