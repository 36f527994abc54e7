use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{ChoiceItem, LabeledPair, LikelihoodPair, PredictionPair};
use crate::{Error, Result};

/// A free-form classification output still to be mapped onto a label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub id: String,
    pub generation: String,
    pub gold_label: String,
}

fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

pub fn read_predictions(path: impl AsRef<Path>) -> Result<Vec<PredictionPair>> {
    read_jsonl(path.as_ref())
}

pub fn read_labeled(path: impl AsRef<Path>) -> Result<Vec<LabeledPair>> {
    read_jsonl(path.as_ref())
}

pub fn read_likelihoods(path: impl AsRef<Path>) -> Result<Vec<LikelihoodPair>> {
    read_jsonl(path.as_ref())
}

pub fn read_choices(path: impl AsRef<Path>) -> Result<Vec<ChoiceItem>> {
    read_jsonl(path.as_ref())
}

pub fn read_generations(path: impl AsRef<Path>) -> Result<Vec<GenerationRecord>> {
    read_jsonl(path.as_ref())
}
