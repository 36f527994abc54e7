use super::model::{TokenId, TokenizerModel};
use super::segments;
use crate::{Error, Result};

/// Encodes UTF-8 text into token ids.
pub fn encode(model: &TokenizerModel, text: &str) -> Vec<TokenId> {
    encode_bytes(model, text.as_bytes())
}

/// Encodes an arbitrary byte string. Never fails: every byte has a base piece.
pub fn encode_bytes(model: &TokenizerModel, bytes: &[u8]) -> Vec<TokenId> {
    let mut out = Vec::with_capacity(bytes.len());
    for seg in segments(bytes) {
        if seg.len() == 1 {
            out.push(model.byte_id(seg[0]));
        } else {
            encode_word(model, seg, &mut out);
        }
    }
    out
}

/// Applies merges to one whitespace-free segment, lowest rank first.
fn encode_word(model: &TokenizerModel, word: &[u8], out: &mut Vec<TokenId>) {
    let mut symbols: Vec<TokenId> = word.iter().map(|&b| model.byte_id(b)).collect();
    loop {
        let best = symbols
            .windows(2)
            .filter_map(|w| model.merge_rank((w[0], w[1])).map(|(rank, id)| (rank, w[0], w[1], id)))
            .min();
        let Some((_, left, right, merged)) = best else {
            break;
        };
        let mut next = Vec::with_capacity(symbols.len());
        let mut i = 0;
        while i < symbols.len() {
            if i + 1 < symbols.len() && symbols[i] == left && symbols[i + 1] == right {
                next.push(merged);
                i += 2;
            } else {
                next.push(symbols[i]);
                i += 1;
            }
        }
        symbols = next;
    }
    out.extend_from_slice(&symbols);
}

/// Concatenates piece bytes and decodes them as UTF-8.
pub fn decode(model: &TokenizerModel, ids: &[TokenId]) -> Result<String> {
    let mut bytes = Vec::with_capacity(ids.len() * 2);
    for &id in ids {
        let piece = model.piece(id).ok_or(Error::TokenRange {
            id,
            size: model.vocab_size(),
        })?;
        if model.is_special(id) {
            return Err(Error::Parameter(format!("cannot decode special token id {id}")));
        }
        bytes.extend_from_slice(piece);
    }
    String::from_utf8(bytes).map_err(|e| Error::Utf8(e.utf8_error()))
}
