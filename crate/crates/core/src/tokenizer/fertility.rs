use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::encode::encode;
use super::model::TokenizerModel;
use crate::corpus::{CorpusDocument, LanguageStats};
use crate::{par, Error, Result};

/// Average token counts of one tokenizer on one language.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FertilityReport {
    pub language: String,
    pub doc_count: u64,
    pub total_tokens: u64,
    pub tokens_per_doc: f64,
    pub tokens_per_word: f64,
}

impl FertilityReport {
    pub fn from_counts(language: impl Into<String>, docs: u64, tokens: u64, words: u64) -> Self {
        let ratio = |n: u64, d: u64| if d == 0 { 0.0 } else { n as f64 / d as f64 };
        FertilityReport {
            language: language.into(),
            doc_count: docs,
            total_tokens: tokens,
            tokens_per_doc: ratio(tokens, docs),
            tokens_per_word: ratio(tokens, words),
        }
    }
}

/// Per-language token efficiency of `model` over `docs`, sorted by language.
///
/// Words are maximal non-whitespace runs, as in [`crate::corpus::corpus_stats`].
pub fn fertility(model: &TokenizerModel, docs: &[CorpusDocument]) -> Result<Vec<FertilityReport>> {
    if docs.is_empty() {
        return Err(Error::Parameter("fertility needs at least one document".into()));
    }
    let counts = par::map(docs, |d| {
        (
            encode(model, &d.text).len() as u64,
            LanguageStats::of_text(&d.text).whitespace_word_count,
        )
    });
    let mut by_lang: BTreeMap<&str, (u64, u64, u64)> = BTreeMap::new();
    for (doc, (tokens, words)) in docs.iter().zip(counts) {
        let e = by_lang.entry(doc.language.as_str()).or_default();
        e.0 += 1;
        e.1 += tokens;
        e.2 += words;
    }
    Ok(by_lang
        .into_iter()
        .map(|(lang, (d, t, w))| FertilityReport::from_counts(lang, d, t, w))
        .collect())
}

/// Percentage by which `adapted` is lower than `original`.
pub fn relative_improvement(adapted: f64, original: f64) -> Result<f64> {
    if original.is_nan() || original <= 0.0 {
        return Err(Error::Parameter(format!(
            "baseline fertility must be positive, got {original}"
        )));
    }
    Ok((original - adapted) / original * 100.0)
}

/// Relative tokens-per-document improvement of `adapted` over `original`,
/// in percent. Positive when the adapted tokenizer emits fewer tokens.
pub fn compare_fertility(adapted: &FertilityReport, original: &FertilityReport) -> Result<f64> {
    if adapted.language != original.language {
        return Err(Error::Parameter(format!(
            "cannot compare fertility of `{}` against `{}`",
            adapted.language, original.language
        )));
    }
    relative_improvement(adapted.tokens_per_doc, original.tokens_per_doc)
}
