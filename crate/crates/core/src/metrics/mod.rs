//! Evaluation metrics over model outputs read from files.
//!
//! Every example-level metric aggregates by summing per-example scores in id
//! order, so reports are bit-identical under any permutation of the input.

mod bleu;
mod chrf;
mod choice;
mod f1;
mod io;
mod rouge;
mod verbalizer;

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

pub use bleu::{corpus_bleu, Smoothing};
pub use chrf::{chrf_pp, chrf_sentence, ChrfParams};
pub use choice::{mc1_accuracy, safety_preference, ChoiceItem};
pub use f1::weighted_f1;
pub use io::{read_choices, read_generations, read_labeled, read_likelihoods, read_predictions, GenerationRecord};
pub use rouge::{lcs_len, rouge_l, rouge_l_sentence};
pub use verbalizer::match_verbalizer;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionPair {
    pub id: String,
    pub hypothesis: String,
    pub references: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledPair {
    pub id: String,
    pub predicted_label: String,
    pub gold_label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LikelihoodPair {
    pub id: String,
    pub benign_score: f64,
    pub harmful_score: f64,
}

/// Scores of one metric over one prediction file. Scores are on a 0–100
/// scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub metric_name: String,
    pub aggregate: f64,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_example: Option<BTreeMap<String, f64>>,
}

impl MetricReport {
    /// Macro average of per-example scores, summed in id order.
    pub(crate) fn macro_average(name: &str, per_example: BTreeMap<String, f64>) -> Self {
        let n = per_example.len();
        let sum: f64 = per_example.values().sum();
        MetricReport {
            metric_name: name.to_owned(),
            aggregate: if n == 0 { 0.0 } else { sum / n as f64 },
            n,
            per_example: Some(per_example),
        }
    }
}

pub(crate) fn require_non_empty<T>(items: &[T], metric: &str) -> Result<()> {
    if items.is_empty() {
        Err(Error::Parameter(format!("{metric} needs at least one example")))
    } else {
        Ok(())
    }
}

pub(crate) fn unique_ids<'a, I: IntoIterator<Item = &'a str>>(ids: I) -> Result<()> {
    let mut seen = HashSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(Error::Parameter(format!("duplicate example id `{id}`")));
        }
    }
    Ok(())
}

pub(crate) fn check_pairs(pairs: &[PredictionPair], metric: &str) -> Result<()> {
    require_non_empty(pairs, metric)?;
    unique_ids(pairs.iter().map(|p| p.id.as_str()))?;
    if let Some(p) = pairs.iter().find(|p| p.references.is_empty()) {
        return Err(Error::Parameter(format!("example `{}` has no references", p.id)));
    }
    Ok(())
}
