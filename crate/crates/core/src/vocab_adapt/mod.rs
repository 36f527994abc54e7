//! Embedding remapping onto a new vocabulary by subword averaging.
//!
//! Every piece of the new vocabulary gets a row derived from the old table:
//!
//! 1. pieces that exist verbatim in the old vocabulary copy their row;
//! 2. other pieces are encoded with the old tokenizer and take the mean of
//!    the resulting rows (accumulated in `f64`, left to right);
//! 3. pieces that encode to nothing take the global mean row.
//!
//! Special tokens copy the old row of the same name, otherwise the global
//! mean.

mod embedding;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use embedding::{EmbeddingMatrix, MAGIC};

use crate::tokenizer::{encode_bytes, TokenId, TokenizerModel};
use crate::{par, Error, Result};

/// How one new row was initialized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Copied,
    Averaged { subtokens: usize },
    Fallback,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdaptationReport {
    pub copied: usize,
    pub averaged: usize,
    pub fallback: usize,
    pub per_piece_provenance: BTreeMap<TokenId, Provenance>,
}

impl AdaptationReport {
    pub fn total(&self) -> usize {
        self.copied + self.averaged + self.fallback
    }
}

fn mean_of_rows<I: IntoIterator<Item = usize>>(emb: &EmbeddingMatrix, rows: I) -> Vec<f32> {
    let mut acc = vec![0f64; emb.dims()];
    let mut n = 0usize;
    for r in rows {
        for (a, &v) in acc.iter_mut().zip(emb.row(r)) {
            *a += v as f64;
        }
        n += 1;
    }
    acc.into_iter().map(|a| (a / n as f64) as f32).collect()
}

/// Initializes an embedding table for `new_tok` from `old_emb`.
///
/// `old_emb` must be bound to `old_tok`. The result is bound to `new_tok`.
pub fn adapt_embeddings(
    old_tok: &TokenizerModel,
    old_emb: &EmbeddingMatrix,
    new_tok: &TokenizerModel,
) -> Result<(EmbeddingMatrix, AdaptationReport)> {
    let expected = old_tok.vocab_hash();
    if old_emb.vocab_hash() != expected {
        return Err(Error::Binding {
            expected,
            found: old_emb.vocab_hash().to_owned(),
        });
    }
    if old_emb.rows() != old_tok.vocab_size() {
        return Err(Error::Data(format!(
            "embedding has {} rows, tokenizer has {} pieces",
            old_emb.rows(),
            old_tok.vocab_size()
        )));
    }
    old_emb.check_finite()?;

    let global_mean = mean_of_rows(old_emb, 0..old_emb.rows());
    let old_names: BTreeMap<TokenId, &str> = new_tok
        .special_tokens()
        .iter()
        .map(|(name, &id)| (id, name.as_str()))
        .collect();

    let rows = par::map_range(new_tok.vocab_size(), |i| {
        let id = i as TokenId;
        let piece = new_tok.piece(id).expect("id in range");
        if new_tok.is_special(id) {
            return match old_tok.special_tokens().get(old_names[&id]) {
                Some(&old) => (old_emb.row(old as usize).to_vec(), Provenance::Copied),
                None => (global_mean.clone(), Provenance::Fallback),
            };
        }
        if let Some(old) = old_tok.lookup(piece) {
            return (old_emb.row(old as usize).to_vec(), Provenance::Copied);
        }
        let ids: Vec<usize> = encode_bytes(old_tok, piece)
            .into_iter()
            .filter(|&t| !old_tok.is_special(t))
            .map(|t| t as usize)
            .collect();
        if ids.is_empty() {
            (global_mean.clone(), Provenance::Fallback)
        } else {
            let n = ids.len();
            (mean_of_rows(old_emb, ids), Provenance::Averaged { subtokens: n })
        }
    });

    let mut data = Vec::with_capacity(new_tok.vocab_size() * old_emb.dims());
    let mut report = AdaptationReport {
        copied: 0,
        averaged: 0,
        fallback: 0,
        per_piece_provenance: BTreeMap::new(),
    };
    for (i, (row, prov)) in rows.into_iter().enumerate() {
        data.extend_from_slice(&row);
        match prov {
            Provenance::Copied => report.copied += 1,
            Provenance::Averaged { .. } => report.averaged += 1,
            Provenance::Fallback => report.fallback += 1,
        }
        report.per_piece_provenance.insert(i as TokenId, prov);
    }
    let matrix = EmbeddingMatrix::for_tokenizer(new_tok, old_emb.dims(), data)?;
    Ok((matrix, report))
}
