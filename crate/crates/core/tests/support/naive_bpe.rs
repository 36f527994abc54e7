//! Reference BPE trainer and encoder written for clarity, not speed.
//!
//! Works on byte strings rather than ids and rescans the whole corpus for
//! every merge.

pub struct NaiveBpe {
    pub pieces: Vec<Vec<u8>>,
    pub merges: Vec<(u32, u32)>,
}

fn is_space(b: u8) -> bool {
    matches!(b, b' ' | b'\t' | b'\n' | b'\r' | 0x0c)
}

/// Every whitespace-free word occurrence, each byte as its own symbol.
fn words(texts: &[&str]) -> Vec<Vec<Vec<u8>>> {
    let mut out = Vec::new();
    for t in texts {
        let mut cur: Vec<Vec<u8>> = Vec::new();
        for &b in t.as_bytes() {
            if is_space(b) {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            } else {
                cur.push(vec![b]);
            }
        }
        if !cur.is_empty() {
            out.push(cur);
        }
    }
    out
}

fn id_of(pieces: &[Vec<u8>], n_special: usize, bytes: &[u8]) -> Option<u32> {
    pieces
        .iter()
        .enumerate()
        .skip(n_special)
        .find(|(_, p)| p.as_slice() == bytes)
        .map(|(i, _)| i as u32)
}

pub fn train(texts: &[&str], vocab_size: usize, specials: &[&str]) -> NaiveBpe {
    let n_special = specials.len();
    let mut pieces: Vec<Vec<u8>> = specials.iter().map(|s| s.as_bytes().to_vec()).collect();
    for b in 0..=255u8 {
        pieces.push(vec![b]);
    }
    let mut merges = Vec::new();
    let mut corpus = words(texts);
    while pieces.len() < vocab_size {
        // (left id, right id) -> count, kept as a flat list
        let mut counts: Vec<((u32, u32), u64)> = Vec::new();
        for w in &corpus {
            for i in 0..w.len().saturating_sub(1) {
                let l = id_of(&pieces, n_special, &w[i]).unwrap();
                let r = id_of(&pieces, n_special, &w[i + 1]).unwrap();
                match counts.iter_mut().find(|(p, _)| *p == (l, r)) {
                    Some((_, c)) => *c += 1,
                    None => counts.push(((l, r), 1)),
                }
            }
        }
        let mut best: Option<((u32, u32), u64)> = None;
        for &(pair, c) in &counts {
            best = match best {
                None => Some((pair, c)),
                Some((bp, bc)) => {
                    if c > bc || (c == bc && pair < bp) {
                        Some((pair, c))
                    } else {
                        Some((bp, bc))
                    }
                }
            };
        }
        let Some(((l, r), c)) = best else { break };
        if c < 2 {
            break;
        }
        let left = pieces[l as usize].clone();
        let right = pieces[r as usize].clone();
        let mut joined = left.clone();
        joined.extend_from_slice(&right);
        if id_of(&pieces, n_special, &joined).is_none() {
            pieces.push(joined.clone());
        }
        merges.push((l, r));
        for w in corpus.iter_mut() {
            let mut out = Vec::new();
            let mut i = 0;
            while i < w.len() {
                if i + 1 < w.len() && w[i] == left && w[i + 1] == right {
                    out.push(joined.clone());
                    i += 2;
                } else {
                    out.push(w[i].clone());
                    i += 1;
                }
            }
            *w = out;
        }
    }
    NaiveBpe { pieces, merges }
}

/// Encodes by replaying every merge of `model` in order over each word.
pub fn replay_encode(model: &langadapt::tokenizer::TokenizerModel, bytes: &[u8]) -> Vec<u32> {
    let mut ids = Vec::new();
    let flush = |word: &mut Vec<Vec<u8>>, ids: &mut Vec<u32>| {
        for &(l, r) in model.merges() {
            let left = model.piece(l).unwrap();
            let right = model.piece(r).unwrap();
            let mut out = Vec::new();
            let mut i = 0;
            while i < word.len() {
                if i + 1 < word.len() && word[i] == left && word[i + 1] == right {
                    let mut j = word[i].clone();
                    j.extend_from_slice(&word[i + 1]);
                    out.push(j);
                    i += 2;
                } else {
                    out.push(word[i].clone());
                    i += 1;
                }
            }
            *word = out;
        }
        for sym in word.drain(..) {
            ids.push(model.lookup(&sym).unwrap());
        }
    };
    let mut word: Vec<Vec<u8>> = Vec::new();
    for &b in bytes {
        if is_space(b) {
            flush(&mut word, &mut ids);
            ids.push(model.lookup(&[b]).unwrap());
        } else {
            word.push(vec![b]);
        }
    }
    flush(&mut word, &mut ids);
    ids
}
