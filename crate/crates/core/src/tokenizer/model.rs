use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

pub type TokenId = u32;
pub type Pair = (TokenId, TokenId);

/// Current model file format version.
pub const FORMAT_VERSION: u32 = 1;

/// Special tokens reserved by default, in id order.
pub const DEFAULT_SPECIALS: [&str; 3] = ["<pad>", "<eos>", "<unk>"];

/// Number of hex characters kept from the SHA-256 vocabulary fingerprint.
pub const VOCAB_HASH_LEN: usize = 32;

/// A trained byte-level BPE vocabulary.
///
/// Layout: special tokens occupy the first ids, followed by the 256 single
/// bytes, followed by learned pieces in merge order. The struct is immutable
/// once built; lookup tables are derived from `pieces` and `merges`.
#[derive(Debug, Clone)]
pub struct TokenizerModel {
    pieces: Vec<Vec<u8>>,
    merges: Vec<Pair>,
    special_tokens: BTreeMap<String, TokenId>,
    is_special: Vec<bool>,
    byte_ids: [TokenId; 256],
    piece_index: HashMap<Vec<u8>, TokenId>,
    merge_ranks: HashMap<Pair, (u32, TokenId)>,
}

impl PartialEq for TokenizerModel {
    fn eq(&self, other: &Self) -> bool {
        self.pieces == other.pieces
            && self.merges == other.merges
            && self.special_tokens == other.special_tokens
    }
}

impl Eq for TokenizerModel {}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    version: u32,
    special_tokens: BTreeMap<String, TokenId>,
    pieces: Vec<String>,
    merges: Vec<[TokenId; 2]>,
}

impl TokenizerModel {
    /// Builds and validates a model from its serialized parts.
    ///
    /// Checks that the special ids come first, that the next 256 pieces are
    /// the distinct single bytes, that every merge only references ids known
    /// at that point, and that replaying the merges reproduces exactly the
    /// learned part of `pieces`.
    pub fn from_parts(
        pieces: Vec<Vec<u8>>,
        merges: Vec<Pair>,
        special_tokens: BTreeMap<String, TokenId>,
    ) -> Result<Self> {
        let n_special = special_tokens.len();
        let mut is_special = vec![false; pieces.len()];
        for (name, &id) in &special_tokens {
            let id = id as usize;
            if id >= n_special || id >= pieces.len() || is_special[id] {
                return Err(Error::Model(format!(
                    "special token `{name}` must have a unique id below {n_special}"
                )));
            }
            is_special[id] = true;
        }
        if pieces.len() < n_special + 256 {
            return Err(Error::Model(format!(
                "{} pieces is fewer than {n_special} specials plus 256 bytes",
                pieces.len()
            )));
        }

        let mut byte_ids = [TokenId::MAX; 256];
        for (offset, piece) in pieces[n_special..n_special + 256].iter().enumerate() {
            let id = (n_special + offset) as TokenId;
            match piece.as_slice() {
                [b] if byte_ids[*b as usize] == TokenId::MAX => byte_ids[*b as usize] = id,
                _ => {
                    return Err(Error::Model(format!(
                        "piece {id} must be a distinct single byte"
                    )))
                }
            }
        }

        let mut piece_index: HashMap<Vec<u8>, TokenId> = HashMap::with_capacity(pieces.len());
        for (b, &id) in byte_ids.iter().enumerate() {
            piece_index.insert(vec![b as u8], id);
        }

        let mut merge_ranks = HashMap::with_capacity(merges.len());
        let mut known = n_special + 256;
        for (rank, &(left, right)) in merges.iter().enumerate() {
            for side in [left, right] {
                let side = side as usize;
                if side < n_special || side >= known {
                    return Err(Error::Model(format!(
                        "merge {rank} references id {side} before it is defined"
                    )));
                }
            }
            let mut bytes = pieces[left as usize].clone();
            bytes.extend_from_slice(&pieces[right as usize]);
            let result = match piece_index.get(&bytes) {
                Some(&id) => id,
                None => {
                    if known >= pieces.len() || pieces[known] != bytes {
                        return Err(Error::Model(format!(
                            "merge {rank} does not reproduce piece {known}"
                        )));
                    }
                    piece_index.insert(bytes, known as TokenId);
                    known += 1;
                    (known - 1) as TokenId
                }
            };
            merge_ranks.entry((left, right)).or_insert((rank as u32, result));
        }
        if known != pieces.len() {
            return Err(Error::Model(format!(
                "{} pieces are not produced by any merge",
                pieces.len() - known
            )));
        }

        Ok(TokenizerModel {
            pieces,
            merges,
            special_tokens,
            is_special,
            byte_ids,
            piece_index,
            merge_ranks,
        })
    }

    /// A model with the given specials and no learned merges.
    pub fn base<S: AsRef<str>>(special_names: &[S]) -> Result<Self> {
        let (pieces, specials) = base_layout(special_names)?;
        Self::from_parts(pieces, Vec::new(), specials)
    }

    pub fn vocab_size(&self) -> usize {
        self.pieces.len()
    }

    pub fn pieces(&self) -> &[Vec<u8>] {
        &self.pieces
    }

    pub fn piece(&self, id: TokenId) -> Option<&[u8]> {
        self.pieces.get(id as usize).map(Vec::as_slice)
    }

    pub fn merges(&self) -> &[Pair] {
        &self.merges
    }

    pub fn special_tokens(&self) -> &BTreeMap<String, TokenId> {
        &self.special_tokens
    }

    pub fn special_count(&self) -> usize {
        self.special_tokens.len()
    }

    pub fn is_special(&self, id: TokenId) -> bool {
        self.is_special.get(id as usize).copied().unwrap_or(false)
    }

    pub fn byte_id(&self, byte: u8) -> TokenId {
        self.byte_ids[byte as usize]
    }

    /// Id of the non-special piece with exactly these bytes.
    pub fn lookup(&self, bytes: &[u8]) -> Option<TokenId> {
        self.piece_index.get(bytes).copied()
    }

    /// Rank and result id of a merge, if `pair` was learned.
    pub fn merge_rank(&self, pair: Pair) -> Option<(u32, TokenId)> {
        self.merge_ranks.get(&pair).copied()
    }

    /// Canonical JSON serialization (pretty-printed, LF line endings,
    /// trailing newline).
    pub fn to_json(&self) -> String {
        let file = ModelFile {
            version: FORMAT_VERSION,
            special_tokens: self.special_tokens.clone(),
            pieces: self.pieces.iter().map(|p| BASE64.encode(p)).collect(),
            merges: self.merges.iter().map(|&(l, r)| [l, r]).collect(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(json)?;
        if file.version != FORMAT_VERSION {
            return Err(Error::Model(format!(
                "unsupported format version {}",
                file.version
            )));
        }
        let pieces = file
            .pieces
            .iter()
            .enumerate()
            .map(|(i, p)| {
                BASE64
                    .decode(p)
                    .map_err(|e| Error::Model(format!("piece {i}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let merges = file.merges.into_iter().map(|[l, r]| (l, r)).collect();
        Self::from_parts(pieces, merges, file.special_tokens)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let json = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&json).map_err(|e| match e {
            Error::Json(e) => Error::Parse {
                path: path.to_path_buf(),
                line: e.line(),
                message: e.to_string(),
            },
            other => other,
        })
    }

    /// Hex SHA-256 of the canonical serialization, truncated to
    /// [`VOCAB_HASH_LEN`] characters. Binds embedding matrices to a model.
    pub fn vocab_hash(&self) -> String {
        vocab_hash_of_bytes(self.to_json().as_bytes())
    }
}

/// Truncated hex SHA-256 of model file bytes.
pub fn vocab_hash_of_bytes(bytes: &[u8]) -> String {
    let mut hex = hex::encode(Sha256::digest(bytes));
    hex.truncate(VOCAB_HASH_LEN);
    hex
}

pub(crate) type BaseLayout = (Vec<Vec<u8>>, BTreeMap<String, TokenId>);

/// Special pieces followed by the 256 byte pieces.
pub(crate) fn base_layout<S: AsRef<str>>(
    special_names: &[S],
) -> Result<BaseLayout> {
    let mut pieces = Vec::with_capacity(special_names.len() + 256);
    let mut specials = BTreeMap::new();
    for name in special_names {
        let name = name.as_ref();
        if name.is_empty() {
            return Err(Error::Parameter("special token names must be non-empty".into()));
        }
        if specials.insert(name.to_owned(), pieces.len() as TokenId).is_some() {
            return Err(Error::Parameter(format!("duplicate special token `{name}`")));
        }
        pieces.push(name.as_bytes().to_vec());
    }
    pieces.extend((0..=255u8).map(|b| vec![b]));
    Ok((pieces, specials))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_model_layout() {
        let m = TokenizerModel::base(&DEFAULT_SPECIALS).unwrap();
        assert_eq!(m.vocab_size(), 259);
        assert!(m.is_special(0) && m.is_special(2) && !m.is_special(3));
        assert_eq!(m.byte_id(b'a'), 3 + b'a' as u32);
        assert_eq!(m.lookup(b"a"), Some(3 + b'a' as u32));
        assert_eq!(m.lookup(b"<pad>"), None);
    }

    #[test]
    fn json_roundtrip_and_field_order() {
        let (mut pieces, specials) = base_layout(&DEFAULT_SPECIALS).unwrap();
        let a = 3 + b'a' as u32;
        pieces.push(b"aa".to_vec());
        let m = TokenizerModel::from_parts(pieces, vec![(a, a)], specials).unwrap();
        let json = m.to_json();
        let order: Vec<_> = ["\"version\"", "\"special_tokens\"", "\"pieces\"", "\"merges\""]
            .iter()
            .map(|k| json.find(k).unwrap())
            .collect();
        assert!(order.windows(2).all(|w| w[0] < w[1]));
        assert!(json.ends_with("]\n}\n"));
        assert!(!json.contains('\r'));
        let back = TokenizerModel::from_json(&json).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.vocab_hash(), m.vocab_hash());
        assert_eq!(m.vocab_hash().len(), VOCAB_HASH_LEN);
    }

    #[test]
    fn rejects_merge_referencing_future_id() {
        let (mut pieces, specials) = base_layout(&DEFAULT_SPECIALS).unwrap();
        pieces.push(b"ab".to_vec());
        let err = TokenizerModel::from_parts(pieces, vec![(259, 3)], specials).unwrap_err();
        assert!(matches!(err, Error::Model(_)));
    }

    #[test]
    fn rejects_pieces_not_matching_merges() {
        let (mut pieces, specials) = base_layout(&DEFAULT_SPECIALS).unwrap();
        pieces.push(b"xy".to_vec());
        let a = 3 + b'a' as u32;
        assert!(TokenizerModel::from_parts(pieces.clone(), vec![(a, a)], specials.clone()).is_err());
        assert!(TokenizerModel::from_parts(pieces, vec![], specials).is_err());
    }

    #[test]
    fn rejects_duplicate_byte_pieces() {
        let (mut pieces, specials) = base_layout(&DEFAULT_SPECIALS).unwrap();
        pieces[4] = vec![0];
        assert!(TokenizerModel::from_parts(pieces, vec![], specials).is_err());
    }

    #[test]
    fn rejects_unknown_version() {
        let m = TokenizerModel::base(&DEFAULT_SPECIALS).unwrap();
        let json = m.to_json().replacen("\"version\": 1", "\"version\": 7", 1);
        assert!(TokenizerModel::from_json(&json).is_err());
    }
}
