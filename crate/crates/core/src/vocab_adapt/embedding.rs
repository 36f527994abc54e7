use std::path::Path;

use crate::tokenizer::{TokenizerModel, VOCAB_HASH_LEN};
use crate::{Error, Result};

/// File magic of the embedding format.
pub const MAGIC: &[u8; 4] = b"EMB1";
const HEADER_LEN: usize = 4 + 4 + 4 + VOCAB_HASH_LEN;

/// A dense `rows × dims` table of `f32`, row-major, bound to one tokenizer
/// through `vocab_hash`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    rows: usize,
    dims: usize,
    data: Vec<f32>,
    vocab_hash: String,
}

impl EmbeddingMatrix {
    pub fn new(rows: usize, dims: usize, data: Vec<f32>, vocab_hash: impl Into<String>) -> Result<Self> {
        let vocab_hash = vocab_hash.into();
        if rows == 0 || dims == 0 {
            return Err(Error::Data(format!("empty embedding shape {rows}x{dims}")));
        }
        if data.len() != rows * dims {
            return Err(Error::Data(format!(
                "{} values do not fill a {rows}x{dims} matrix",
                data.len()
            )));
        }
        if vocab_hash.len() != VOCAB_HASH_LEN || !vocab_hash.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(Error::Data(format!(
                "vocab hash must be {VOCAB_HASH_LEN} hex characters"
            )));
        }
        let m = EmbeddingMatrix {
            rows,
            dims,
            data,
            vocab_hash,
        };
        m.check_finite()?;
        Ok(m)
    }

    /// A matrix shaped for `tokenizer` and bound to it.
    pub fn for_tokenizer(tokenizer: &TokenizerModel, dims: usize, data: Vec<f32>) -> Result<Self> {
        Self::new(tokenizer.vocab_size(), dims, data, tokenizer.vocab_hash())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn vocab_hash(&self) -> &str {
        &self.vocab_hash
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dims..(i + 1) * self.dims]
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.data.iter().position(|v| !v.is_finite()) {
            Some(pos) => Err(Error::Data(format!(
                "non-finite value in embedding row {}",
                pos / self.dims
            ))),
            None => Ok(()),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.data.len() * 4);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(self.rows as u32).to_le_bytes());
        out.extend_from_slice(&(self.dims as u32).to_le_bytes());
        out.extend_from_slice(self.vocab_hash.as_bytes());
        for v in &self.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let format = |offset: usize, message: &str| Error::Format {
            offset,
            message: message.to_owned(),
        };
        if bytes.len() < HEADER_LEN {
            return Err(format(bytes.len(), "truncated header"));
        }
        if &bytes[..4] != MAGIC {
            return Err(format(0, "bad magic, expected EMB1"));
        }
        let u32_at = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap()) as usize;
        let rows = u32_at(4);
        let dims = u32_at(8);
        if rows == 0 {
            return Err(format(4, "rows must be positive"));
        }
        if dims == 0 {
            return Err(format(8, "dims must be positive"));
        }
        let hash = std::str::from_utf8(&bytes[12..HEADER_LEN])
            .ok()
            .filter(|h| h.bytes().all(|b| b.is_ascii_hexdigit()))
            .ok_or_else(|| format(12, "vocab hash is not hex"))?;
        let expected = rows
            .checked_mul(dims)
            .and_then(|n| n.checked_mul(4))
            .and_then(|n| n.checked_add(HEADER_LEN))
            .ok_or_else(|| format(4, "shape overflows"))?;
        if bytes.len() != expected {
            return Err(format(
                bytes.len().min(expected),
                &format!("expected {expected} bytes for {rows}x{dims}, found {}", bytes.len()),
            ));
        }
        let data = bytes[HEADER_LEN..]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Self::new(rows, dims, data, hash)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }
}
