//! Mine early-stage revision pairs from the comments of LaTeX source files.
//!
//! Authors frequently leave previous versions of sentences and paragraphs
//! commented out in their sources. This crate turns a directory of extracted
//! source archives into a dataset of (final paragraph, commented paragraph)
//! candidate revision pairs, filters them with an LLM judge, and evaluates
//! judge quality against human annotations.
//!
//! The pipeline stages, in order:
//!
//! - [`ingest`] — metadata license/category filtering and source file selection
//! - [`clean`] — LaTeX cleanup (document body, environments, equations, commands)
//! - [`segment`] — splitting cleaned lines into commented/final blocks
//! - [`pair`] — Levenshtein-based candidate pair extraction with a sliding window
//! - [`judge`] — generation and perplexity-based revision classification
//! - [`agreement`] — inter-annotator agreement and judge evaluation metrics
//! - [`emit`] — dataset files, corpus statistics, annotation task export
//! - [`pipeline`] — orchestration, checkpointing, run manifests

pub mod agreement;
pub mod clean;
pub mod config;
pub mod diag;
pub mod emit;
pub mod ingest;
pub mod judge;
pub mod pair;
pub mod pipeline;
pub mod segment;

pub use config::Config;
pub use diag::Diagnostics;
pub use pair::{CandidatePair, WindowPolicy};
