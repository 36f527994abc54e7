//! Per-command JSON configuration.
//!
//! Each subcommand reads one JSON object. Unknown keys are rejected, relative
//! paths are resolved against the config file's directory, and command-line
//! flags override whatever the file says.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use langadapt::corpus::{InputFormat, TaskType};

/// Reads `path` as `T`, or returns `T::default()` when no config is given.
/// The second value is the directory relative paths resolve against.
pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<(T, PathBuf)> {
    let Some(path) = path else {
        return Ok((T::default(), PathBuf::from(".")));
    };
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let cfg = serde_json::from_str(&text)
        .with_context(|| format!("parsing config {}", path.display()))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((cfg, base))
}

pub fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

pub fn required<T>(value: Option<T>, key: &str) -> Result<T> {
    match value {
        Some(v) => Ok(v),
        None => bail!("`{key}` must be set in the config or on the command line"),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSpec {
    pub path: PathBuf,
    #[serde(default = "plain_lines")]
    pub format: InputFormat,
    pub language: String,
    #[serde(default)]
    pub source: Option<String>,
}

fn plain_lines() -> InputFormat {
    InputFormat::PlainLines
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub corpus: Vec<CorpusSpec>,
    pub vocab_size: Option<usize>,
    pub special_tokens: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FertilityConfig {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub adapted_model: Option<PathBuf>,
    pub baseline_model: Option<PathBuf>,
    #[serde(default)]
    pub corpus: Vec<CorpusSpec>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdaptConfig {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub old_tokenizer: Option<PathBuf>,
    pub old_embeddings: Option<PathBuf>,
    pub new_tokenizer: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordSpec {
    pub path: PathBuf,
    pub language: String,
    pub source: String,
    #[serde(default)]
    pub task_type: Option<TaskType>,
    /// Swap label and text roles before rendering.
    #[serde(default)]
    pub invert: bool,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollectionConfig {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub templates: Option<PathBuf>,
    #[serde(default)]
    pub records: Vec<RecordSpec>,
    pub plan: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricName {
    WeightedF1,
    ChrfPp,
    CorpusBleu,
    RougeL,
    Mc1Accuracy,
    SafetyPreference,
}

impl std::str::FromStr for MetricName {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_owned()))
            .map_err(|_| anyhow::anyhow!("unknown metric `{s}`"))
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricParams {
    pub max_order: Option<usize>,
    pub smoothing: Option<langadapt::metrics::Smoothing>,
    pub char_order: Option<usize>,
    pub word_order: Option<usize>,
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreConfig {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub metric: Option<MetricName>,
    pub predictions: Option<PathBuf>,
    #[serde(default)]
    pub params: MetricParams,
    /// Label to verbalizer strings. When set, weighted_f1 reads free-form
    /// generations and maps them onto labels first.
    pub verbalizers: Option<BTreeMap<String, Vec<String>>>,
}
