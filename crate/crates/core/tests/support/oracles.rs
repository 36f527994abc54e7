//! Brute-force metric references.

use std::collections::HashMap;

/// chrF++ by explicit n-gram lists and greedy one-to-one matching.
pub fn chrf(hyp: &str, reference: &str, char_order: usize, word_order: usize, beta: f64) -> f64 {
    let hc: Vec<char> = hyp.chars().filter(|c| !c.is_whitespace()).collect();
    let rc: Vec<char> = reference.chars().filter(|c| !c.is_whitespace()).collect();
    if hc.is_empty() && rc.is_empty() {
        return 100.0;
    }
    if hc.is_empty() || rc.is_empty() {
        return 0.0;
    }
    let hw: Vec<String> = hyp.split_whitespace().map(String::from).collect();
    let rw: Vec<String> = reference.split_whitespace().map(String::from).collect();
    let hc: Vec<String> = hc.iter().map(|c| c.to_string()).collect();
    let rc: Vec<String> = rc.iter().map(|c| c.to_string()).collect();

    let grams = |seq: &[String], n: usize, sep: &str| -> Vec<String> {
        let mut v = Vec::new();
        let mut i = 0;
        while i + n <= seq.len() {
            v.push(seq[i..i + n].join(sep));
            i += 1;
        }
        v
    };
    let mut precisions = Vec::new();
    let mut recalls = Vec::new();
    let mut orders: Vec<(Vec<String>, Vec<String>)> = Vec::new();
    for n in 1..=char_order {
        orders.push((grams(&hc, n, ""), grams(&rc, n, "")));
    }
    for n in 1..=word_order {
        orders.push((grams(&hw, n, "\u{1}"), grams(&rw, n, "\u{1}")));
    }
    for (h, r) in orders {
        if h.is_empty() || r.is_empty() {
            continue;
        }
        let mut used = vec![false; r.len()];
        let mut m = 0usize;
        for g in &h {
            if let Some(j) = (0..r.len()).find(|&j| !used[j] && &r[j] == g) {
                used[j] = true;
                m += 1;
            }
        }
        precisions.push(m as f64 / h.len() as f64);
        recalls.push(m as f64 / r.len() as f64);
    }
    if precisions.is_empty() {
        return 0.0;
    }
    let p: f64 = precisions.iter().sum::<f64>() / precisions.len() as f64;
    let r: f64 = recalls.iter().sum::<f64>() / recalls.len() as f64;
    if p + r == 0.0 {
        return 0.0;
    }
    let b2 = beta * beta;
    100.0 * (1.0 + b2) * p * r / (b2 * p + r)
}

/// LCS by top-down recursion with memoization.
pub fn lcs(a: &[&str], b: &[&str]) -> usize {
    fn go(a: &[&str], b: &[&str], i: usize, j: usize, memo: &mut HashMap<(usize, usize), usize>) -> usize {
        if i == a.len() || j == b.len() {
            return 0;
        }
        if let Some(&v) = memo.get(&(i, j)) {
            return v;
        }
        let v = if a[i] == b[j] {
            1 + go(a, b, i + 1, j + 1, memo)
        } else {
            go(a, b, i + 1, j, memo).max(go(a, b, i, j + 1, memo))
        };
        memo.insert((i, j), v);
        v
    }
    go(a, b, 0, 0, &mut HashMap::new())
}

pub fn rouge_l(hyp: &str, reference: &str, beta: f64) -> f64 {
    let h: Vec<&str> = hyp.split_whitespace().collect();
    let r: Vec<&str> = reference.split_whitespace().collect();
    if h.is_empty() || r.is_empty() {
        return 0.0;
    }
    let l = lcs(&h, &r) as f64;
    if l == 0.0 {
        return 0.0;
    }
    let p = l / h.len() as f64;
    let rec = l / r.len() as f64;
    let b2 = beta * beta;
    100.0 * (1.0 + b2) * p * rec / (rec + b2 * p)
}

/// Percentage of items where the first maximal score sits at `gold`.
pub fn mc1(items: &[(Vec<f64>, usize)]) -> f64 {
    let mut hits = 0;
    for (scores, gold) in items {
        let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let first = scores.iter().position(|&s| s == max).unwrap();
        if first == *gold {
            hits += 1;
        }
    }
    100.0 * hits as f64 / items.len() as f64
}

pub fn safety(pairs: &[(f64, f64)]) -> f64 {
    100.0 * pairs.iter().filter(|(b, h)| b > h).count() as f64 / pairs.len() as f64
}
