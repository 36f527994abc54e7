//! Data-level tooling for adapting language models to underrepresented
//! languages.
//!
//! The crate is organised by pipeline stage:
//!
//! * [`corpus`] ingests and normalizes raw text and task datasets.
//! * [`tokenizer`] trains byte-level BPE vocabularies and measures fertility.
//! * [`vocab_adapt`] remaps embedding tables onto a new vocabulary by
//!   subword averaging.
//! * [`collection`] renders prompt templates into an instruction corpus and
//!   applies upsampling and phase partitioning.
//! * [`metrics`] scores model outputs (weighted F1, chrF++, BLEU, ROUGE-L,
//!   MC1 accuracy, safety preference).
//!
//! Inner loops run on rayon when the `parallel` feature is enabled (the
//! default). Results never depend on the thread count.

pub mod collection;
pub mod corpus;
mod error;
pub mod metrics;
pub mod par;
pub mod tokenizer;
pub mod vocab_adapt;

pub use error::{Error, Result};

/// Toolkit version recorded in manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
