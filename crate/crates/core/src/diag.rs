//! Diagnostics sink shared by all pipeline stages.

use std::fmt::Display;
use std::sync::Mutex;

/// Collects `SKIP <subject> <reason>` lines for items dropped along the way.
///
/// Appends are safe from multiple threads; the pipeline merges per-file
/// sinks in path order so diagnostic output stays deterministic.
#[derive(Debug, Default)]
pub struct Diagnostics {
    lines: Mutex<Vec<String>>,
}

impl Diagnostics {
    pub fn new() -> Self {
        Self::default()
    }

    /// Record a skipped item. `subject` is a path or a `line:<n>` marker.
    pub fn skip(&self, subject: impl Display, reason: impl Display) {
        let line = format!("SKIP {subject} {reason}");
        log::warn!("{line}");
        self.lines.lock().unwrap().push(line);
    }

    pub fn count(&self) -> usize {
        self.lines.lock().unwrap().len()
    }

    pub fn lines(&self) -> Vec<String> {
        self.lines.lock().unwrap().clone()
    }

    /// Move all lines out of `other` into this sink, preserving their order.
    pub fn absorb(&self, other: Diagnostics) {
        self.append_raw(other.lines.into_inner().unwrap());
    }

    /// Append already-formatted diagnostic lines.
    pub fn append_raw(&self, lines: Vec<String>) {
        self.lines.lock().unwrap().extend(lines);
    }
}
