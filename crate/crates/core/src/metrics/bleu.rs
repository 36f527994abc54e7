use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{check_pairs, MetricReport, PredictionPair};
use crate::corpus::normalize;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Smoothing {
    None,
    /// Zero-match precisions become `1 / (2 · hypothesis n-grams)`.
    #[default]
    AddEpsExp,
}

fn tokens(text: &str) -> Vec<String> {
    normalize(text).split(' ').filter(|t| !t.is_empty()).map(str::to_owned).collect()
}

fn counts(toks: &[String], n: usize) -> HashMap<&[String], u64> {
    let mut out = HashMap::new();
    if toks.len() >= n {
        for g in toks.windows(n) {
            *out.entry(g).or_insert(0) += 1;
        }
    }
    out
}

/// Corpus BLEU on a 0–100 scale.
///
/// Tokens are whitespace-separated after [`normalize`]. Each hypothesis
/// n-gram count is clipped by its maximum count in any reference; the
/// reference length is the one closest to the hypothesis (shorter on ties).
/// Orders for which the corpus has no hypothesis n-grams are left out of the
/// geometric mean.
pub fn corpus_bleu(pairs: &[PredictionPair], max_order: usize, smoothing: Smoothing) -> Result<MetricReport> {
    check_pairs(pairs, "corpus_bleu")?;
    if max_order == 0 {
        return Err(Error::Parameter("BLEU max_order must be at least 1".into()));
    }
    let mut matches = vec![0u64; max_order];
    let mut totals = vec![0u64; max_order];
    let (mut hyp_len, mut ref_len) = (0u64, 0u64);
    for p in pairs {
        let hyp = tokens(&p.hypothesis);
        let refs: Vec<Vec<String>> = p.references.iter().map(|r| tokens(r)).collect();
        let h = hyp.len() as i64;
        let closest = refs
            .iter()
            .map(|r| r.len() as i64)
            .min_by_key(|&r| ((r - h).abs(), r))
            .expect("references are non-empty");
        hyp_len += h as u64;
        ref_len += closest as u64;
        for n in 1..=max_order {
            let hyp_counts = counts(&hyp, n);
            let ref_counts: Vec<_> = refs.iter().map(|r| counts(r, n)).collect();
            for (g, c) in hyp_counts {
                let max_ref = ref_counts.iter().map(|rc| rc.get(g).copied().unwrap_or(0)).max().unwrap_or(0);
                matches[n - 1] += c.min(max_ref);
                totals[n - 1] += c;
            }
        }
    }

    let report = |aggregate: f64| MetricReport {
        metric_name: "corpus_bleu".into(),
        aggregate,
        n: pairs.len(),
        per_example: None,
    };
    if hyp_len == 0 {
        return Ok(report(0.0));
    }
    let mut log_sum = 0.0;
    let mut orders = 0usize;
    for (&m, &t) in matches.iter().zip(&totals) {
        if t == 0 {
            continue;
        }
        let p = if m > 0 {
            m as f64 / t as f64
        } else {
            match smoothing {
                Smoothing::None => return Ok(report(0.0)),
                Smoothing::AddEpsExp => 1.0 / (2.0 * t as f64),
            }
        };
        log_sum += p.ln();
        orders += 1;
    }
    let brevity = if hyp_len < ref_len {
        (1.0 - ref_len as f64 / hyp_len as f64).exp()
    } else {
        1.0
    };
    Ok(report(100.0 * brevity * (log_sum / orders as f64).exp()))
}
