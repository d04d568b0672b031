//! Deterministic in-process backend so the whole pipeline runs offline.

use std::collections::HashMap;

use super::{BackendError, ContinuationScore, JudgeBackend};

/// Table entry: log-probabilities for the "Yes" / "No" continuations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MockScores {
    pub yes_logprob: f64,
    pub no_logprob: f64,
    pub yes_tokens: usize,
    pub no_tokens: usize,
}

impl MockScores {
    fn pluie(&self) -> f64 {
        self.yes_logprob / self.yes_tokens as f64 - self.no_logprob / self.no_tokens as f64
    }
}

/// Table-driven mock keyed by a stable prompt hash. Prompts without a table
/// entry get a pseudo-score derived deterministically from the hash and the
/// seed, so arbitrary pair files can be judged reproducibly without a model.
pub struct MockBackend {
    model_id: String,
    seed: u64,
    table: HashMap<u64, MockScores>,
}

impl MockBackend {
    pub fn new(model_id: &str) -> Self {
        Self {
            model_id: model_id.to_string(),
            seed: 0,
            table: HashMap::new(),
        }
    }

    pub fn seeded(seed: u64) -> Self {
        Self {
            model_id: format!("mock-{seed}"),
            seed,
            table: HashMap::new(),
        }
    }

    pub fn with_entry(mut self, prompt: &str, scores: MockScores) -> Self {
        self.table.insert(fnv1a(prompt.as_bytes()), scores);
        self
    }

    /// Convenience: single-token entry whose pluie score equals `score`.
    pub fn with_pluie_entry(self, prompt: &str, score: f64) -> Self {
        self.with_entry(
            prompt,
            MockScores {
                yes_logprob: -1.0 + score / 2.0,
                no_logprob: -1.0 - score / 2.0,
                yes_tokens: 1,
                no_tokens: 1,
            },
        )
    }

    fn scores_for(&self, prompt: &str) -> MockScores {
        let hash = fnv1a(prompt.as_bytes());
        if let Some(entry) = self.table.get(&hash) {
            return *entry;
        }
        // Derived pseudo-score in [-3, 3], stable for (prompt, seed).
        let mixed = splitmix64(hash ^ self.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let score = (mixed % 6001) as f64 / 1000.0 - 3.0;
        MockScores {
            yes_logprob: -1.0 + score / 2.0,
            no_logprob: -1.0 - score / 2.0,
            yes_tokens: 1,
            no_tokens: 1,
        }
    }
}

impl JudgeBackend for MockBackend {
    fn model_id(&self) -> &str {
        &self.model_id
    }

    fn complete(&self, prompt: &str) -> Result<String, BackendError> {
        let scores = self.scores_for(prompt);
        Ok(if scores.pluie() > 0.0 { "Yes" } else { "No" }.to_string())
    }

    fn score_continuation(
        &self,
        prompt: &str,
        continuation: &str,
    ) -> Result<ContinuationScore, BackendError> {
        let scores = self.scores_for(prompt);
        match continuation {
            "Yes" => Ok(ContinuationScore {
                total_logprob: scores.yes_logprob,
                token_count: scores.yes_tokens,
            }),
            "No" => Ok(ContinuationScore {
                total_logprob: scores.no_logprob,
                token_count: scores.no_tokens,
            }),
            other => Err(BackendError::Protocol(format!(
                "mock backend only scores Yes/No, got {other:?}"
            ))),
        }
    }
}

/// FNV-1a, stable across runs and platforms.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for b in bytes {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}
