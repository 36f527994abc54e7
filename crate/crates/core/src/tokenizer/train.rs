use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};

use super::model::{base_layout, Pair, TokenId, TokenizerModel};
use super::segments;
use crate::corpus::CorpusDocument;
use crate::{par, Error, Result};

/// Whitespace-free segments of a corpus with their occurrence counts.
pub type WordCounts = HashMap<Vec<u8>, u64>;

/// Counts whitespace-free segments across `docs`, in parallel shards.
pub fn count_words(docs: &[CorpusDocument]) -> WordCounts {
    par::fold_merge(
        docs,
        WordCounts::new,
        |mut acc, doc| {
            for seg in segments(doc.text.as_bytes()) {
                if seg.len() < 2 {
                    // single bytes (including whitespace) never form a pair
                    continue;
                }
                match acc.get_mut(seg) {
                    Some(c) => *c += 1,
                    None => {
                        acc.insert(seg.to_vec(), 1);
                    }
                }
            }
            acc
        },
        |a, b| {
            if a.len() < b.len() {
                merge_counts(b, a)
            } else {
                merge_counts(a, b)
            }
        },
    )
}

fn merge_counts(mut a: WordCounts, b: WordCounts) -> WordCounts {
    for (w, c) in b {
        *a.entry(w).or_insert(0) += c;
    }
    a
}

/// Learns a byte-level BPE vocabulary.
///
/// Repeatedly merges the most frequent adjacent pair (ties: lower left id,
/// then lower right id) until the vocabulary holds `vocab_size` pieces or no
/// pair occurs at least twice. Merges never cross whitespace bytes.
///
/// `seed` exists for interface symmetry with the other pipeline stages and
/// does not influence the result; training is fully deterministic.
pub fn train_bpe<S: AsRef<str>>(
    docs: &[CorpusDocument],
    vocab_size: usize,
    special_names: &[S],
    seed: u64,
) -> Result<TokenizerModel> {
    check_size(vocab_size, special_names.len())?;
    if docs.is_empty() {
        return Err(Error::Parameter("cannot train on an empty corpus".into()));
    }
    train_bpe_from_counts(count_words(docs), vocab_size, special_names, seed)
}

fn check_size(vocab_size: usize, n_special: usize) -> Result<()> {
    let min = 256 + n_special;
    if vocab_size < min {
        return Err(Error::Parameter(format!(
            "vocab_size {vocab_size} is below the minimum {min} (256 bytes + {n_special} specials)"
        )));
    }
    Ok(())
}

#[derive(PartialEq, Eq)]
struct Candidate {
    count: i64,
    pair: Pair,
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.count, Reverse(self.pair.0), Reverse(self.pair.1)).cmp(&(
            other.count,
            Reverse(other.pair.0),
            Reverse(other.pair.1),
        ))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

type PairStats = (HashMap<Pair, i64>, HashMap<Pair, Vec<u32>>);

/// [`train_bpe`] over precomputed segment counts.
pub fn train_bpe_from_counts<S: AsRef<str>>(
    counts: WordCounts,
    vocab_size: usize,
    special_names: &[S],
    _seed: u64,
) -> Result<TokenizerModel> {
    check_size(vocab_size, special_names.len())?;
    let (mut pieces, specials) = base_layout(special_names)?;
    let n_special = specials.len();
    let byte_id = |b: u8| (n_special + b as usize) as TokenId;

    let mut types: Vec<(Vec<u8>, u64)> = counts.into_iter().collect();
    types.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    let freqs: Vec<i64> = types.iter().map(|(_, c)| *c as i64).collect();
    let mut words: Vec<Vec<TokenId>> = types
        .into_iter()
        .map(|(w, _)| w.into_iter().map(byte_id).collect())
        .collect();

    let indices: Vec<u32> = (0..words.len() as u32).collect();
    let (mut pair_counts, mut locations): PairStats = par::fold_merge(
        &indices,
        PairStats::default,
        |(mut counts, mut locs), &w| {
            let word = &words[w as usize];
            for p in word.windows(2) {
                let pair = (p[0], p[1]);
                *counts.entry(pair).or_insert(0) += freqs[w as usize];
                locs.entry(pair).or_default().push(w);
            }
            (counts, locs)
        },
        |(mut ca, mut la), (cb, lb)| {
            for (p, c) in cb {
                *ca.entry(p).or_insert(0) += c;
            }
            for (p, v) in lb {
                la.entry(p).or_default().extend(v);
            }
            (ca, la)
        },
    );

    let mut heap: BinaryHeap<Candidate> = pair_counts
        .iter()
        .filter(|(_, &c)| c >= 2)
        .map(|(&pair, &count)| Candidate { count, pair })
        .collect();

    let mut piece_index: HashMap<Vec<u8>, TokenId> = (0..=255u8)
        .map(|b| (vec![b], byte_id(b)))
        .collect();
    let mut merges: Vec<Pair> = Vec::new();
    let mut delta: HashMap<Pair, i64> = HashMap::new();

    while pieces.len() < vocab_size {
        let Some(top) = heap.pop() else { break };
        let current = pair_counts.get(&top.pair).copied().unwrap_or(0);
        if current != top.count {
            continue;
        }
        if current < 2 {
            break;
        }
        let (left, right) = top.pair;
        let mut bytes = pieces[left as usize].clone();
        bytes.extend_from_slice(&pieces[right as usize]);
        let merged = match piece_index.get(&bytes) {
            Some(&id) => id,
            None => {
                let id = pieces.len() as TokenId;
                piece_index.insert(bytes.clone(), id);
                pieces.push(bytes);
                id
            }
        };
        merges.push(top.pair);

        let mut affected = locations.remove(&top.pair).unwrap_or_default();
        affected.sort_unstable();
        affected.dedup();
        delta.clear();
        for w in affected {
            let word = &mut words[w as usize];
            let freq = freqs[w as usize];
            if !word.windows(2).any(|p| p[0] == left && p[1] == right) {
                continue;
            }
            for p in word.windows(2) {
                *delta.entry((p[0], p[1])).or_insert(0) -= freq;
            }
            let mut next = Vec::with_capacity(word.len());
            let mut i = 0;
            while i < word.len() {
                if i + 1 < word.len() && word[i] == left && word[i + 1] == right {
                    next.push(merged);
                    i += 2;
                } else {
                    next.push(word[i]);
                    i += 1;
                }
            }
            for p in next.windows(2) {
                let pair = (p[0], p[1]);
                *delta.entry(pair).or_insert(0) += freq;
                if pair.0 == merged || pair.1 == merged {
                    locations.entry(pair).or_default().push(w);
                }
            }
            *word = next;
        }
        for (&pair, &d) in &delta {
            if d == 0 {
                continue;
            }
            let c = pair_counts.entry(pair).or_insert(0);
            *c += d;
            if *c >= 2 {
                heap.push(Candidate { count: *c, pair });
            }
        }
    }

    TokenizerModel::from_parts(pieces, merges, specials)
}
