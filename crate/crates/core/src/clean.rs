//! LaTeX cleanup: reduce a raw source file to natural-language-dominant lines.
//!
//! The cleaning steps run in a fixed order: document body extraction, removal
//! of non-textual environments, display-math tokenization, removal of
//! non-textual commands. Comment lines are cleaned with the same rules as
//! final lines so that both sides of a revision pair are normalized
//! identically before comparison.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diag::Diagnostics;

/// Placeholder substituted for display-math spans.
pub const EQUATION_TOKEN: &str = "[EQUATION]";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CleanError {
    /// `\begin{document}` / `\end{document}` missing or inverted.
    #[error("no document environment found")]
    MissingDocumentEnv,
}

/// One line of cleaned text, tagged with where it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CleanLine {
    pub text: String,
    /// True when the payload originated behind a line-leading percent sign.
    pub was_commented: bool,
}

/// Cleaning configuration: the `clean` section of the config file.
///
/// The environment and command sets are non-exhaustive defaults and can be
/// extended per corpus. `keep_structural` wins over `cmd_remove` when a name
/// appears in both.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(default)]
pub struct CleanConfig {
    pub env_remove: Vec<String>,
    pub cmd_remove: Vec<String>,
    pub keep_structural: Vec<String>,
}

impl Default for CleanConfig {
    fn default() -> Self {
        Self {
            env_remove: [
                "table",
                "table*",
                "figure",
                "figure*",
                "align",
                "align*",
                "tikzpicture",
                "algorithm",
                "algorithmic",
                "verbatim",
                "verbatim*",
                "lstlisting",
            ]
            .map(String::from)
            .to_vec(),
            cmd_remove: [
                "vspace",
                "hspace",
                "appendix",
                "newpage",
                "clearpage",
                "noindent",
                "label",
                "pagebreak",
                "centering",
                "smallskip",
                "medskip",
                "bigskip",
            ]
            .map(String::from)
            .to_vec(),
            keep_structural: ["section", "subsection", "subsubsection", "paragraph"]
                .map(String::from)
                .to_vec(),
        }
    }
}

impl CleanConfig {
    pub fn env_set(&self) -> BTreeSet<String> {
        self.env_remove.iter().cloned().collect()
    }

    /// Commands to strip: the denylist minus anything declared structural.
    pub fn effective_cmd_set(&self) -> BTreeSet<String> {
        let keep: BTreeSet<&str> = self.keep_structural.iter().map(String::as_str).collect();
        self.cmd_remove
            .iter()
            .filter(|c| !keep.contains(c.as_str()))
            .cloned()
            .collect()
    }
}

/// If `line` is a comment line (first non-whitespace character is `%`),
/// returns the payload after the leading run of percent signs.
///
/// A `%` preceded only by whitespace cannot be escaped, so no escape check
/// is needed at the line head.
pub fn leading_comment_payload(line: &str) -> Option<&str> {
    let trimmed = line.trim_start();
    if trimmed.starts_with('%') {
        Some(trimmed.trim_start_matches('%'))
    } else {
        None
    }
}

/// Returns the content strictly between the first `\begin{document}` and the
/// last `\end{document}`.
pub fn extract_document_body(text: &str) -> Result<&str, CleanError> {
    const BEGIN: &str = "\\begin{document}";
    const END: &str = "\\end{document}";
    let start = text.find(BEGIN).ok_or(CleanError::MissingDocumentEnv)? + BEGIN.len();
    let end = text.rfind(END).ok_or(CleanError::MissingDocumentEnv)?;
    if end < start {
        return Err(CleanError::MissingDocumentEnv);
    }
    Ok(&text[start..end])
}

/// True when the backslash at byte `idx` starts a command, i.e. it is not
/// itself escaped by a preceding odd run of backslashes.
fn is_command_start(text: &str, idx: usize) -> bool {
    let mut backslashes = 0;
    for b in text.as_bytes()[..idx].iter().rev() {
        if *b == b'\\' {
            backslashes += 1;
        } else {
            break;
        }
    }
    backslashes % 2 == 0
}

/// Finds the next `\begin{<name>}` or `\end{<name>}` at or after `from`,
/// returning (match start, match end, name, is_begin).
fn next_env_marker(text: &str, from: usize) -> Option<(usize, usize, &str, bool)> {
    let mut pos = from;
    while pos < text.len() {
        let rel = text[pos..].find('\\')?;
        let start = pos + rel;
        pos = start + 1;
        if !is_command_start(text, start) {
            continue;
        }
        let rest = &text[start..];
        let (kw_len, is_begin) = if rest.starts_with("\\begin{") {
            (7, true)
        } else if rest.starts_with("\\end{") {
            (5, false)
        } else {
            continue;
        };
        let name_start = start + kw_len;
        if let Some(close) = text[name_start..].find('}') {
            let name = &text[name_start..name_start + close];
            return Some((start, name_start + close + 1, name, is_begin));
        }
    }
    None
}

/// Removes every environment whose name is in `env_remove`, spanning from its
/// `\begin{...}` to the matching `\end{...}` inclusive. Unbalanced markers are
/// removed to end of input (dangling `\begin`) or dropped in place (stray
/// `\end`), each with a diagnostic.
pub fn strip_nontextual_environments(
    text: &str,
    env_remove: &BTreeSet<String>,
    diag: &Diagnostics,
) -> String {
    let mut out = String::with_capacity(text.len());
    let mut cursor = 0;
    let mut scan = 0;
    while let Some((start, end, name, is_begin)) = next_env_marker(text, scan) {
        if !env_remove.contains(name) {
            scan = end;
            continue;
        }
        out.push_str(&text[cursor..start]);
        if is_begin {
            match find_matching_env_end(text, end, name) {
                Some(span_end) => {
                    cursor = span_end;
                    scan = span_end;
                }
                None => {
                    diag.skip(
                        format!("env:{name}"),
                        "unbalanced \\begin, removed to end of input",
                    );
                    return out;
                }
            }
        } else {
            diag.skip(format!("env:{name}"), "stray \\end removed");
            cursor = end;
            scan = end;
        }
    }
    out.push_str(&text[cursor..]);
    out
}

/// Scans for the `\end{name}` matching a `\begin{name}` whose body starts at
/// `from`, tracking same-name nesting. Returns the index just past it.
fn find_matching_env_end(text: &str, from: usize, name: &str) -> Option<usize> {
    let mut depth = 1usize;
    let mut scan = from;
    while let Some((_, end, found, is_begin)) = next_env_marker(text, scan) {
        scan = end;
        if found != name {
            continue;
        }
        if is_begin {
            depth += 1;
        } else {
            depth -= 1;
            if depth == 0 {
                return Some(end);
            }
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MathMarker {
    BeginEquation { starred: bool },
    EndEquation { starred: bool },
    OpenBracket,
    CloseBracket,
}

fn next_math_marker(text: &str, from: usize) -> Option<(usize, usize, MathMarker)> {
    let mut pos = from;
    while pos < text.len() {
        let rel = text[pos..].find('\\')?;
        let start = pos + rel;
        pos = start + 1;
        if !is_command_start(text, start) {
            continue;
        }
        let rest = &text[start..];
        let marker = if rest.starts_with("\\begin{equation*}") {
            Some((17, MathMarker::BeginEquation { starred: true }))
        } else if rest.starts_with("\\begin{equation}") {
            Some((16, MathMarker::BeginEquation { starred: false }))
        } else if rest.starts_with("\\end{equation*}") {
            Some((15, MathMarker::EndEquation { starred: true }))
        } else if rest.starts_with("\\end{equation}") {
            Some((14, MathMarker::EndEquation { starred: false }))
        } else if rest.starts_with("\\[") {
            Some((2, MathMarker::OpenBracket))
        } else if rest.starts_with("\\]") {
            Some((2, MathMarker::CloseBracket))
        } else {
            None
        };
        if let Some((len, m)) = marker {
            return Some((start, start + len, m));
        }
    }
    None
}

/// Replaces each display-math span (`equation`/`equation*` environments and
/// `\[ ... \]`) with [`EQUATION_TOKEN`]. Inline `$...$` math is preserved.
/// An opener with no closer is replaced up to end of line; a stray closer is
/// dropped. Both cases emit a diagnostic.
pub fn tokenize_equations(text: &str, diag: &Diagnostics) -> String {
    let mut out = String::with_capacity(text.len());
    let mut cursor = 0;
    while let Some((start, end, marker)) = next_math_marker(text, cursor) {
        out.push_str(&text[cursor..start]);
        let closer = match marker {
            MathMarker::BeginEquation { starred } => Some(MathMarker::EndEquation { starred }),
            MathMarker::OpenBracket => Some(MathMarker::CloseBracket),
            MathMarker::EndEquation { .. } | MathMarker::CloseBracket => None,
        };
        match closer {
            Some(want) => {
                out.push_str(EQUATION_TOKEN);
                match find_math_closer(text, end, want) {
                    Some(span_end) => cursor = span_end,
                    None => {
                        diag.skip("math", "unbalanced delimiter, tokenized to end of line");
                        cursor = text[end..]
                            .find('\n')
                            .map(|p| end + p)
                            .unwrap_or(text.len());
                    }
                }
            }
            None => {
                diag.skip("math", "stray closing delimiter removed");
                cursor = end;
            }
        }
    }
    out.push_str(&text[cursor..]);
    out
}

fn find_math_closer(text: &str, from: usize, want: MathMarker) -> Option<usize> {
    let mut scan = from;
    while let Some((_, end, marker)) = next_math_marker(text, scan) {
        if marker == want {
            return Some(end);
        }
        scan = end;
    }
    None
}

/// Removes each command in `cmd_remove` together with its star form and any
/// immediately following `[...]` / `{...}` argument groups. Commands not in
/// the set (structural commands included) are left untouched.
pub fn strip_nontextual_commands(text: &str, cmd_remove: &BTreeSet<String>) -> String {
    let mut out = String::with_capacity(text.len());
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < text.len() {
        if bytes[i] == b'\\' && i + 1 < text.len() {
            let next = bytes[i + 1];
            if next.is_ascii_alphabetic() {
                let mut name_end = i + 1;
                while name_end < text.len() && bytes[name_end].is_ascii_alphabetic() {
                    name_end += 1;
                }
                let name = &text[i + 1..name_end];
                if cmd_remove.contains(name) {
                    i = skip_command_args(text, name_end);
                    continue;
                }
                out.push_str(&text[i..name_end]);
                i = name_end;
                continue;
            }
            // Control symbol (\\, \%, \{, ...): copy the pair verbatim so the
            // escaped character is never re-interpreted.
            let sym_end = i + 1 + text[i + 1..].chars().next().map_or(0, char::len_utf8);
            out.push_str(&text[i..sym_end]);
            i = sym_end;
            continue;
        }
        let ch_end = i + text[i..].chars().next().map_or(1, char::len_utf8);
        out.push_str(&text[i..ch_end]);
        i = ch_end;
    }
    out
}

/// Consumes an optional `*` and any directly adjacent argument groups after a
/// command name ending at `from`. An unclosed group is consumed only to the
/// end of its line.
fn skip_command_args(text: &str, from: usize) -> usize {
    let bytes = text.as_bytes();
    let mut i = from;
    if i < text.len() && bytes[i] == b'*' {
        i += 1;
    }
    loop {
        match bytes.get(i) {
            Some(b'[') => i = skip_group(text, i, b'[', b']'),
            Some(b'{') => i = skip_group(text, i, b'{', b'}'),
            _ => return i,
        }
    }
}

fn skip_group(text: &str, open_idx: usize, open: u8, close: u8) -> usize {
    let bytes = text.as_bytes();
    let mut depth = 0usize;
    let mut i = open_idx;
    while i < text.len() {
        match bytes[i] {
            b'\\' => {
                // Skip the escaped character.
                i += 1 + text[i + 1..].chars().next().map_or(0, char::len_utf8);
                continue;
            }
            b if b == open => depth += 1,
            b if b == close => {
                depth -= 1;
                if depth == 0 {
                    return i + 1;
                }
            }
            b'\n' if depth > 0 && !group_closes_later(bytes, i, open, close, depth) => {
                // Unclosed group: stop consuming at end of line.
                return i;
            }
            _ => {}
        }
        i += 1;
    }
    text.len()
}

fn group_closes_later(bytes: &[u8], from: usize, open: u8, close: u8, mut depth: usize) -> bool {
    let mut i = from;
    while i < bytes.len() {
        let b = bytes[i];
        if b == b'\\' {
            i += 2;
            continue;
        }
        if b == open {
            depth += 1;
        } else if b == close {
            depth -= 1;
            if depth == 0 {
                return true;
            }
        }
        i += 1;
    }
    false
}

/// Truncates `line` at the first unescaped `%`. Escaped `\%` is kept.
/// The caller guarantees the line is not itself comment-leading.
pub fn strip_inline_trailing_comment(line: &str) -> &str {
    let mut chars = line.char_indices();
    while let Some((idx, ch)) = chars.next() {
        match ch {
            '\\' => {
                chars.next();
            }
            '%' => return &line[..idx],
            _ => {}
        }
    }
    line
}

/// Applies the full cleaning sequence to a raw file body and returns the
/// cleaned line list.
///
/// Lines are grouped into maximal runs of the same kind (commented, final,
/// blank); each run is cleaned as one unit so environments and display math
/// may span lines. Comment payloads and inline-comment-stripped final lines
/// go through the identical environment/equation/command steps.
pub fn clean_document(
    raw: &str,
    cfg: &CleanConfig,
    diag: &Diagnostics,
) -> Result<Vec<CleanLine>, CleanError> {
    use crate::segment::{classify_line, LineKind};

    let body = extract_document_body(raw)?;
    let env_set = cfg.env_set();
    let cmd_set = cfg.effective_cmd_set();
    let lines: Vec<&str> = body.lines().collect();
    let mut out = Vec::with_capacity(lines.len());

    let mut i = 0;
    while i < lines.len() {
        let kind = classify_line(lines[i]);
        let mut j = i;
        while j < lines.len() && classify_line(lines[j]) == kind {
            j += 1;
        }
        match kind {
            LineKind::Blank => {
                for _ in i..j {
                    out.push(CleanLine {
                        text: String::new(),
                        was_commented: false,
                    });
                }
            }
            LineKind::Commented => {
                let joined = lines[i..j]
                    .iter()
                    .map(|l| {
                        leading_comment_payload(l)
                            .expect("run classified as commented")
                            .trim_start()
                    })
                    .collect::<Vec<_>>()
                    .join("\n");
                push_cleaned_run(&joined, true, &env_set, &cmd_set, diag, &mut out);
            }
            LineKind::Final => {
                let joined = lines[i..j]
                    .iter()
                    .map(|l| strip_inline_trailing_comment(l))
                    .collect::<Vec<_>>()
                    .join("\n");
                push_cleaned_run(&joined, false, &env_set, &cmd_set, diag, &mut out);
            }
        }
        i = j;
    }
    Ok(out)
}

fn push_cleaned_run(
    text: &str,
    was_commented: bool,
    env_set: &BTreeSet<String>,
    cmd_set: &BTreeSet<String>,
    diag: &Diagnostics,
    out: &mut Vec<CleanLine>,
) {
    let cleaned = strip_nontextual_environments(text, env_set, diag);
    let cleaned = tokenize_equations(&cleaned, diag);
    let cleaned = strip_nontextual_commands(&cleaned, cmd_set);
    for line in cleaned.split('\n') {
        out.push(CleanLine {
            text: line.to_string(),
            was_commented,
        });
    }
}
