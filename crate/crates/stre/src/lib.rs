//! Edit-quality prediction for revision histories.
//!
//! The crate covers the full pipeline: ingesting revision histories (XML or
//! JSONL), extracting sentence-level edit pairs, scoring edits with a
//! Levenshtein-based survival metric, mining identity reverts, and training
//! a dual character/word attentive recurrent encoder to classify edits as
//! good-faith or damaging, including a frozen-encoder transfer-learning
//! path. See the `examples/` directory for runnable entry points into each
//! capability; `src/bin/stre.rs` exposes the same pipeline as subcommands.

pub mod cli;
pub mod corpus;
pub mod model;
pub mod nn;
pub mod quality;
pub mod synth;
pub mod train;
