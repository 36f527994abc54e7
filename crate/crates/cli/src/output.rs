//! Run outputs are staged next to their final names and renamed into place
//! only once the whole command has succeeded.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(sha256_hex(&bytes))
}

pub struct Staged {
    dir: PathBuf,
    files: Vec<(PathBuf, PathBuf)>,
    checksums: BTreeMap<String, String>,
    committed: bool,
}

impl Staged {
    pub fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Staged {
            dir: dir.to_path_buf(),
            files: Vec::new(),
            checksums: BTreeMap::new(),
            committed: false,
        })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let target = self.dir.join(name);
        let tmp = self.dir.join(format!(".{name}.partial"));
        fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
        self.files.push((tmp, target));
        self.checksums.insert(name.to_owned(), sha256_hex(bytes));
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    pub fn checksums(&self) -> &BTreeMap<String, String> {
        &self.checksums
    }

    pub fn commit(mut self) -> Result<()> {
        for (tmp, target) in &self.files {
            fs::rename(tmp, target).with_context(|| format!("moving output to {}", target.display()))?;
        }
        self.committed = true;
        Ok(())
    }
}

impl Drop for Staged {
    fn drop(&mut self) {
        if !self.committed {
            for (tmp, _) in &self.files {
                let _ = fs::remove_file(tmp);
            }
        }
    }
}

/// Provenance written next to every run's outputs.
#[derive(Serialize)]
pub struct Manifest<C: Serialize, E: Serialize> {
    pub command: &'static str,
    pub toolkit_version: &'static str,
    pub seed: u64,
    pub threads: usize,
    pub config: C,
    /// Input path to SHA-256 of its bytes.
    pub inputs: BTreeMap<String, String>,
    /// Output file name to SHA-256 of its bytes.
    pub outputs: BTreeMap<String, String>,
    #[serde(flatten)]
    pub extra: E,
}

#[derive(Default)]
pub struct Inputs(BTreeMap<String, String>);

impl Inputs {
    pub fn add(&mut self, path: &Path) -> Result<()> {
        let sum = sha256_file(path)?;
        self.0.insert(path.display().to_string(), sum);
        Ok(())
    }

    pub fn into_map(self) -> BTreeMap<String, String> {
        self.0
    }
}
