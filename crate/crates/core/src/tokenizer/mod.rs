//! Byte-level BPE: training, encoding and token-efficiency measurement.
//!
//! Text is segmented at ASCII whitespace bytes before merges are learned or
//! applied, so no learned piece ever contains whitespace. Each whitespace
//! byte is emitted as its own byte token, which keeps encoding lossless.

mod encode;
mod fertility;
mod model;
mod train;

pub use encode::{decode, encode, encode_bytes};
pub use fertility::{compare_fertility, fertility, relative_improvement, FertilityReport};
pub use model::{
    vocab_hash_of_bytes, Pair, TokenId, TokenizerModel, DEFAULT_SPECIALS, FORMAT_VERSION,
    VOCAB_HASH_LEN,
};
pub use train::{count_words, train_bpe, train_bpe_from_counts, WordCounts};

/// Splits `bytes` into alternating segments: maximal runs of non-whitespace
/// bytes, and single ASCII whitespace bytes.
pub(crate) fn segments(bytes: &[u8]) -> impl Iterator<Item = &[u8]> {
    let mut rest = bytes;
    std::iter::from_fn(move || {
        let first = *rest.first()?;
        let len = if first.is_ascii_whitespace() {
            1
        } else {
            rest.iter()
                .position(u8::is_ascii_whitespace)
                .unwrap_or(rest.len())
        };
        let (head, tail) = rest.split_at(len);
        rest = tail;
        Some(head)
    })
}
