use std::collections::BTreeMap;

use super::{require_non_empty, unique_ids, LabeledPair, MetricReport};
use crate::Result;

#[derive(Default)]
struct ClassCounts {
    tp: u64,
    fp: u64,
    fn_: u64,
}

/// Support-weighted mean of one-vs-rest F1 over the gold classes, ×100.
///
/// Labels that only ever appear as predictions have zero support and so
/// zero weight, though they still count as false positives elsewhere.
pub fn weighted_f1(pairs: &[LabeledPair]) -> Result<MetricReport> {
    require_non_empty(pairs, "weighted_f1")?;
    unique_ids(pairs.iter().map(|p| p.id.as_str()))?;
    let mut classes: BTreeMap<&str, ClassCounts> = BTreeMap::new();
    for p in pairs {
        if p.predicted_label == p.gold_label {
            classes.entry(&p.gold_label).or_default().tp += 1;
        } else {
            classes.entry(&p.gold_label).or_default().fn_ += 1;
            classes.entry(&p.predicted_label).or_default().fp += 1;
        }
    }
    let n = pairs.len() as f64;
    let mut weighted = 0.0;
    for c in classes.values() {
        let support = c.tp + c.fn_;
        if support == 0 || c.tp == 0 {
            continue;
        }
        let precision = c.tp as f64 / (c.tp + c.fp) as f64;
        let recall = c.tp as f64 / support as f64;
        let f1 = 2.0 * precision * recall / (precision + recall);
        weighted += support as f64 / n * f1;
    }
    let per_example = pairs
        .iter()
        .map(|p| {
            let hit = if p.predicted_label == p.gold_label { 100.0 } else { 0.0 };
            (p.id.clone(), hit)
        })
        .collect();
    Ok(MetricReport {
        metric_name: "weighted_f1".into(),
        aggregate: weighted * 100.0,
        n: pairs.len(),
        per_example: Some(per_example),
    })
}
