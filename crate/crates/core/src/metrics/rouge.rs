use super::{check_pairs, MetricReport, PredictionPair};
use crate::{par, Error, Result};

/// Length of the longest common subsequence of two token sequences.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// ROUGE-L F-measure of one hypothesis against its best reference, 0–100.
///
/// F = (1 + β²)·P·R / (R + β²·P) with P = LCS/|hyp| and R = LCS/|ref| over
/// whitespace tokens.
pub fn rouge_l_sentence(hypothesis: &str, references: &[String], beta: f64) -> f64 {
    let hyp: Vec<&str> = hypothesis.split_whitespace().collect();
    if hyp.is_empty() {
        return 0.0;
    }
    let b2 = beta * beta;
    references
        .iter()
        .map(|r| {
            let reference: Vec<&str> = r.split_whitespace().collect();
            let lcs = lcs_len(&hyp, &reference);
            if lcs == 0 {
                return 0.0;
            }
            let p = lcs as f64 / hyp.len() as f64;
            let r = lcs as f64 / reference.len() as f64;
            100.0 * (1.0 + b2) * p * r / (r + b2 * p)
        })
        .fold(0.0, f64::max)
}

pub fn rouge_l(pairs: &[PredictionPair], beta: f64) -> Result<MetricReport> {
    check_pairs(pairs, "rouge_l")?;
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Parameter(format!("ROUGE-L beta must be positive, got {beta}")));
    }
    let scores = par::map(pairs, |p| rouge_l_sentence(&p.hypothesis, &p.references, beta));
    let per_example = pairs.iter().map(|p| p.id.clone()).zip(scores).collect();
    Ok(MetricReport::macro_average("rouge_l", per_example))
}
