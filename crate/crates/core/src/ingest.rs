//! Metadata filtering and LaTeX source file selection.
//!
//! Metadata arrives as line-delimited records with at least `id`, `license`
//! and `categories` fields, mirroring the arXiv metadata snapshot schema
//! (`categories` may be a JSON array or one space-separated string). Source
//! archives are assumed pre-extracted to directories.

use std::collections::BTreeSet;
use std::io::BufRead;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;
use walkdir::WalkDir;

use crate::clean::leading_comment_payload;
use crate::diag::Diagnostics;

/// License URIs admitted by default. arXiv adds license variants over time,
/// so the list is overridable via config.
pub const DEFAULT_LICENSE_ALLOWLIST: [&str; 7] = [
    "http://creativecommons.org/licenses/by-nc-sa/4.0/",
    "http://creativecommons.org/licenses/by-sa/4.0/",
    "http://creativecommons.org/licenses/by/4.0/",
    "http://creativecommons.org/licenses/publicdomain/",
    "http://creativecommons.org/licenses/by-nc-sa/3.0/",
    "http://creativecommons.org/licenses/by/3.0/",
    "http://creativecommons.org/publicdomain/zero/1.0/",
];

/// Prefix matching covers subcategories (cs.CL, cs.LG, ...) without
/// enumeration.
pub const DEFAULT_CATEGORY_PREFIX: &str = "cs.";

/// File extensions treated as LaTeX documents.
pub const LATEX_EXTENSIONS: [&str; 2] = ["tex", "ltx"];

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read corpus root {path}: {source}")]
    UnreadableRoot {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One arXiv metadata record.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct PaperMeta {
    #[serde(rename = "id")]
    pub paper_id: String,
    #[serde(default)]
    pub license: Option<String>,
    #[serde(default, deserialize_with = "categories_field")]
    pub categories: Vec<String>,
}

fn categories_field<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Vec<String>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Joined(String),
        List(Vec<String>),
    }
    Ok(match Option::<Raw>::deserialize(deserializer)? {
        Some(Raw::Joined(s)) => s.split_whitespace().map(str::to_string).collect(),
        Some(Raw::List(v)) => v,
        None => Vec::new(),
    })
}

/// True when the record's license is in the allowlist and at least one
/// category starts with the prefix.
pub fn admits(meta: &PaperMeta, allowlist: &BTreeSet<String>, category_prefix: &str) -> bool {
    meta.license
        .as_deref()
        .is_some_and(|l| allowlist.contains(l))
        && meta
            .categories
            .iter()
            .any(|c| c.starts_with(category_prefix))
}

/// Filters a line-delimited metadata stream. Malformed lines are skipped
/// with a diagnostic and never abort the stream; input order is preserved.
pub fn filter_metadata<R: BufRead>(
    reader: R,
    allowlist: &BTreeSet<String>,
    category_prefix: &str,
    diag: &Diagnostics,
) -> Result<Vec<PaperMeta>, IngestError> {
    let mut kept = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<PaperMeta>(&line) {
            Ok(meta) if meta.paper_id.is_empty() => {
                diag.skip(format!("line:{}", idx + 1), "empty id");
            }
            Ok(meta) => {
                if admits(&meta, allowlist, category_prefix) {
                    kept.push(meta);
                }
            }
            Err(e) => diag.skip(format!("line:{}", idx + 1), e),
        }
    }
    Ok(kept)
}

/// Record-level filtering, for callers that already hold parsed metadata.
pub fn filter_records(
    records: Vec<PaperMeta>,
    allowlist: &BTreeSet<String>,
    category_prefix: &str,
) -> Vec<PaperMeta> {
    records
        .into_iter()
        .filter(|m| admits(m, allowlist, category_prefix))
        .collect()
}

/// A LaTeX source file with its lines in source order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceFile {
    pub relative_path: PathBuf,
    pub lines: Vec<String>,
}

fn line_has_meaningful_comment(line: &str) -> bool {
    match leading_comment_payload(line) {
        Some(payload) => matches!(payload.trim_start().chars().next(), Some(c) if c != '\\'),
        None => false,
    }
}

/// True when at least one line is a comment whose payload starts with
/// something other than a backslash — i.e. the file may contain previous
/// versions of sentences rather than only commented-out commands.
pub fn has_meaningful_comments(file: &SourceFile) -> bool {
    file.lines.iter().any(|l| line_has_meaningful_comment(l))
}

fn has_latex_extension(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| LATEX_EXTENSIONS.iter().any(|x| e.eq_ignore_ascii_case(x)))
}

/// Collects every LaTeX file under `archive_root` that passes
/// [`has_meaningful_comments`], ordered by path. Files are decoded lossily:
/// real-world sources are not reliably UTF-8. Unreadable files are skipped
/// with a diagnostic; an unreadable root is a hard error.
pub fn select_tex_files(
    archive_root: &Path,
    diag: &Diagnostics,
) -> Result<Vec<SourceFile>, IngestError> {
    std::fs::read_dir(archive_root).map_err(|source| IngestError::UnreadableRoot {
        path: archive_root.to_path_buf(),
        source,
    })?;

    let mut paths: Vec<PathBuf> = Vec::new();
    for entry in WalkDir::new(archive_root)
        .follow_links(true)
        .sort_by_file_name()
    {
        match entry {
            Ok(entry) => {
                if entry.file_type().is_file() && has_latex_extension(entry.path()) {
                    paths.push(entry.path().to_path_buf());
                }
            }
            Err(e) => {
                let subject = e
                    .path()
                    .map(|p| p.display().to_string())
                    .unwrap_or_else(|| archive_root.display().to_string());
                diag.skip(subject, e);
            }
        }
    }
    paths.sort();

    let mut selected = Vec::new();
    for path in paths {
        let bytes = match std::fs::read(&path) {
            Ok(bytes) => bytes,
            Err(e) => {
                diag.skip(path.display(), e);
                continue;
            }
        };
        let text = String::from_utf8_lossy(&bytes);
        let relative_path = path
            .strip_prefix(archive_root)
            .unwrap_or(&path)
            .to_path_buf();
        let file = SourceFile {
            relative_path,
            lines: text.lines().map(str::to_string).collect(),
        };
        if has_meaningful_comments(&file) {
            selected.push(file);
        }
    }
    Ok(selected)
}
