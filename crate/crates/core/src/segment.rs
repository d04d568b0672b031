//! Split cleaned lines into maximal homogeneous blocks of commented or
//! final text. A block is a run of consecutive same-kind lines, not
//! interrupted by a blank line or a line of the other kind.

use serde::{Deserialize, Serialize};

use crate::clean::{leading_comment_payload, CleanLine};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineKind {
    Commented,
    Final,
    Blank,
}

/// Classifies a raw line. Lines that are empty after trimming are blank;
/// lines whose first non-whitespace character is a percent sign are
/// commented; everything else is final text.
pub fn classify_line(line: &str) -> LineKind {
    if line.trim().is_empty() {
        LineKind::Blank
    } else if leading_comment_payload(line).is_some() {
        LineKind::Commented
    } else {
        LineKind::Final
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockKind {
    Commented,
    Final,
}

/// A maximal run of same-kind cleaned lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub kind: BlockKind,
    /// Inclusive start/end indices into the cleaned line list.
    pub line_span: (usize, usize),
    /// Line texts trimmed and joined with single spaces, with internal
    /// whitespace collapsed, so comparisons are insensitive to line wrapping.
    pub text: String,
    /// Ordinal position among the emitted blocks.
    pub index: usize,
}

/// Effective kind of a cleaned line. A line whose cleaned text is empty
/// counts as blank regardless of origin: it contributes nothing to the
/// compiled document.
fn effective_kind(line: &CleanLine) -> LineKind {
    if line.text.trim().is_empty() {
        LineKind::Blank
    } else if line.was_commented {
        LineKind::Commented
    } else {
        LineKind::Final
    }
}

fn collapse_join(lines: &[CleanLine]) -> String {
    lines
        .iter()
        .flat_map(|l| l.text.split_whitespace())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Segments cleaned lines into blocks. Blank lines and kind changes both
/// terminate a block; blocks whose joined text is empty are dropped.
pub fn segment_blocks(lines: &[CleanLine]) -> Vec<Block> {
    let mut blocks = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        let kind = effective_kind(&lines[i]);
        let mut j = i;
        while j < lines.len() && effective_kind(&lines[j]) == kind {
            j += 1;
        }
        if kind != LineKind::Blank {
            let text = collapse_join(&lines[i..j]);
            if !text.is_empty() {
                blocks.push(Block {
                    kind: if kind == LineKind::Commented {
                        BlockKind::Commented
                    } else {
                        BlockKind::Final
                    },
                    line_span: (i, j - 1),
                    text,
                    index: blocks.len(),
                });
            }
        }
        i = j;
    }
    blocks
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line(text: &str, commented: bool) -> CleanLine {
        CleanLine {
            text: text.to_string(),
            was_commented: commented,
        }
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_line("% old sentence"), LineKind::Commented);
        assert_eq!(classify_line("   "), LineKind::Blank);
        assert_eq!(classify_line("We propose…"), LineKind::Final);
    }

    #[test]
    fn segments_blank_and_kind_changes() {
        // kinds [C,C,Blank,F,F,C] -> [C(0-1), F(3-4), C(5)]
        let lines = vec![
            line("old a", true),
            line("old b", true),
            line("", false),
            line("new a", false),
            line("new b", false),
            line("older", true),
        ];
        let blocks = segment_blocks(&lines);
        assert_eq!(blocks.len(), 3);
        assert_eq!(blocks[0].kind, BlockKind::Commented);
        assert_eq!(blocks[0].line_span, (0, 1));
        assert_eq!(blocks[0].text, "old a old b");
        assert_eq!(blocks[1].kind, BlockKind::Final);
        assert_eq!(blocks[1].line_span, (3, 4));
        assert_eq!(blocks[2].kind, BlockKind::Commented);
        assert_eq!(blocks[2].line_span, (5, 5));
        assert_eq!(
            blocks.iter().map(|b| b.index).collect::<Vec<_>>(),
            vec![0, 1, 2]
        );
    }

    #[test]
    fn single_run_is_one_block() {
        let lines = vec![line("a", false), line("b", false), line("c", false)];
        let blocks = segment_blocks(&lines);
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].text, "a b c");
    }

    #[test]
    fn every_kind_change_splits() {
        let lines = vec![
            line("c1", true),
            line("f1", false),
            line("c2", true),
            line("f2", false),
        ];
        let blocks = segment_blocks(&lines);
        assert_eq!(blocks.len(), 4);
        assert!(blocks.windows(2).all(|w| w[0].kind != w[1].kind));
    }

    #[test]
    fn cleaned_empty_line_counts_as_blank() {
        // A commented line whose payload cleaned away splits the run.
        let lines = vec![line("old a", true), line("   ", true), line("old b", true)];
        let blocks = segment_blocks(&lines);
        assert_eq!(blocks.len(), 2);
        assert_eq!(blocks[0].text, "old a");
        assert_eq!(blocks[1].text, "old b");
    }

    #[test]
    fn whitespace_collapsed_in_join() {
        let lines = vec![line("  a\t b ", false), line(" c  d", false)];
        let blocks = segment_blocks(&lines);
        assert_eq!(blocks[0].text, "a b c d");
    }

    fn arb_lines() -> impl Strategy<Value = Vec<CleanLine>> {
        prop::collection::vec(
            ("[a-c ]{0,6}", any::<bool>()).prop_map(|(t, c)| CleanLine {
                text: t,
                was_commented: c,
            }),
            0..24,
        )
    }

    proptest! {
        /// Concatenating block texts in order reconstructs all non-blank
        /// cleaned content.
        #[test]
        fn block_texts_reconstruct_content(lines in arb_lines()) {
            let blocks = segment_blocks(&lines);
            let from_blocks = blocks
                .iter()
                .map(|b| b.text.as_str())
                .collect::<Vec<_>>()
                .join(" ");
            let from_lines = lines
                .iter()
                .flat_map(|l| l.text.split_whitespace())
                .collect::<Vec<_>>()
                .join(" ");
            prop_assert_eq!(from_blocks, from_lines);
        }

        /// Adjacent same-kind blocks only occur across a blank line.
        #[test]
        fn same_kind_neighbors_are_blank_separated(lines in arb_lines()) {
            let blocks = segment_blocks(&lines);
            for w in blocks.windows(2) {
                if w[0].kind == w[1].kind {
                    let gap = (w[0].line_span.1 + 1)..w[1].line_span.0;
                    prop_assert!(gap
                        .clone()
                        .any(|i| lines[i].text.trim().is_empty()));
                }
            }
        }

        /// Spans are disjoint, increasing, and indices are ordinals.
        #[test]
        fn spans_and_indices_are_ordered(lines in arb_lines()) {
            let blocks = segment_blocks(&lines);
            for (i, b) in blocks.iter().enumerate() {
                prop_assert_eq!(b.index, i);
                prop_assert!(b.line_span.0 <= b.line_span.1);
            }
            for w in blocks.windows(2) {
                prop_assert!(w[0].line_span.1 < w[1].line_span.0);
            }
        }
    }
}
