use std::collections::HashMap;
use std::hash::Hash;

use super::{check_pairs, MetricReport, PredictionPair};
use crate::{par, Error, Result};

/// chrF++ parameters. Defaults are the usual chrF++ settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChrfParams {
    pub char_order: usize,
    pub word_order: usize,
    pub beta: f64,
}

impl Default for ChrfParams {
    fn default() -> Self {
        ChrfParams {
            char_order: 6,
            word_order: 2,
            beta: 2.0,
        }
    }
}

impl ChrfParams {
    fn validate(&self) -> Result<()> {
        if self.char_order == 0 || self.word_order == 0 {
            return Err(Error::Parameter("chrF n-gram orders must be at least 1".into()));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::Parameter(format!("chrF beta must be positive, got {}", self.beta)));
        }
        Ok(())
    }
}

/// (hypothesis n-grams, reference n-grams, clipped matches) for one order.
type OrderStats = (usize, usize, usize);

fn ngram_counts<T: Eq + Hash>(seq: &[T], n: usize) -> HashMap<&[T], usize> {
    let mut counts = HashMap::new();
    if seq.len() >= n {
        for g in seq.windows(n) {
            *counts.entry(g).or_insert(0) += 1;
        }
    }
    counts
}

fn order_stats<T: Eq + Hash>(hyp: &[T], reference: &[T], n: usize) -> OrderStats {
    let h = ngram_counts(hyp, n);
    let r = ngram_counts(reference, n);
    let matches = h
        .iter()
        .map(|(g, &c)| c.min(r.get(g).copied().unwrap_or(0)))
        .sum();
    (ngram_total(hyp.len(), n), ngram_total(reference.len(), n), matches)
}

fn ngram_total(len: usize, n: usize) -> usize {
    if len >= n {
        len - n + 1
    } else {
        0
    }
}

struct Prepared<'a> {
    chars: Vec<char>,
    words: Vec<&'a str>,
}

impl<'a> Prepared<'a> {
    fn new(text: &'a str) -> Self {
        Prepared {
            chars: text.chars().filter(|c| !c.is_whitespace()).collect(),
            words: text.split_whitespace().collect(),
        }
    }
}

/// Averages precision and recall over the orders where both sides have
/// n-grams, then combines them into F-beta on a 0–100 scale.
fn f_score(stats: &[OrderStats], beta: f64) -> f64 {
    let effective: Vec<_> = stats.iter().filter(|(h, r, _)| *h > 0 && *r > 0).collect();
    if effective.is_empty() {
        return 0.0;
    }
    let k = effective.len() as f64;
    let precision = effective.iter().map(|(h, _, m)| *m as f64 / *h as f64).sum::<f64>() / k;
    let recall = effective.iter().map(|(_, r, m)| *m as f64 / *r as f64).sum::<f64>() / k;
    let b2 = beta * beta;
    let denom = b2 * precision + recall;
    if denom == 0.0 {
        0.0
    } else {
        100.0 * (1.0 + b2) * precision * recall / denom
    }
}

fn score_against(hyp: &Prepared, reference: &Prepared, params: &ChrfParams) -> f64 {
    match (hyp.chars.is_empty(), reference.chars.is_empty()) {
        (true, true) => return 100.0,
        (true, false) | (false, true) => return 0.0,
        _ => {}
    }
    let mut stats = Vec::with_capacity(params.char_order + params.word_order);
    for n in 1..=params.char_order {
        stats.push(order_stats(&hyp.chars, &reference.chars, n));
    }
    for n in 1..=params.word_order {
        stats.push(order_stats(&hyp.words, &reference.words, n));
    }
    f_score(&stats, params.beta)
}

/// chrF++ of one hypothesis against its best-matching reference.
pub fn chrf_sentence(hypothesis: &str, references: &[String], params: &ChrfParams) -> f64 {
    let hyp = Prepared::new(hypothesis);
    references
        .iter()
        .map(|r| score_against(&hyp, &Prepared::new(r), params))
        .fold(0.0, f64::max)
}

/// Macro-averaged sentence chrF++. Whitespace is excluded from character
/// n-grams; word n-grams are whitespace tokens.
pub fn chrf_pp(pairs: &[PredictionPair], params: ChrfParams) -> Result<MetricReport> {
    check_pairs(pairs, "chrf_pp")?;
    params.validate()?;
    let scores = par::map(pairs, |p| chrf_sentence(&p.hypothesis, &p.references, &params));
    let per_example = pairs.iter().map(|p| p.id.clone()).zip(scores).collect();
    Ok(MetricReport::macro_average("chrf_pp", per_example))
}
