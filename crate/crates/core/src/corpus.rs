//! Corpus ingestion, text normalization and corpus statistics.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Lines};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::{Error, Result};

/// How a corpus file is laid out on disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputFormat {
    /// One document per line.
    PlainLines,
    /// One JSON object per line with at least a `"text"` field.
    JsonLines,
}

impl FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain_lines" => Ok(InputFormat::PlainLines),
            "json_lines" => Ok(InputFormat::JsonLines),
            other => Err(Error::Parameter(format!("unknown input format `{other}`"))),
        }
    }
}

/// The kind of task a dataset row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskType {
    Classification,
    Translation,
    Summarization,
    QuestionAnswering,
    Paraphrasing,
    Generation,
}

impl TaskType {
    pub const ALL: [TaskType; 6] = [
        TaskType::Classification,
        TaskType::Translation,
        TaskType::Summarization,
        TaskType::QuestionAnswering,
        TaskType::Paraphrasing,
        TaskType::Generation,
    ];

    /// Whether this is one of the NLP task types that make up the first
    /// tuning phase.
    pub fn is_nlp_task(self) -> bool {
        !matches!(self, TaskType::Generation)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TaskType::Classification => "classification",
            TaskType::Translation => "translation",
            TaskType::Summarization => "summarization",
            TaskType::QuestionAnswering => "question_answering",
            TaskType::Paraphrasing => "paraphrasing",
            TaskType::Generation => "generation",
        }
    }
}

impl fmt::Display for TaskType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TaskType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TaskType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown task type `{s}`")))
    }
}

/// Checks that `code` looks like an ISO-639-3 code: three lowercase ASCII
/// letters.
pub fn validate_language(code: &str) -> Result<()> {
    if code.len() == 3 && code.bytes().all(|b| b.is_ascii_lowercase()) {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "language code `{code}` is not a lowercase 3-letter code"
        )))
    }
}

/// One unit of raw text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusDocument {
    pub id: String,
    pub text: String,
    pub language: String,
    pub source: String,
}

impl CorpusDocument {
    /// Builds a document, applying NFC and trimming to `text`.
    pub fn new(
        id: impl Into<String>,
        text: &str,
        language: impl Into<String>,
        source: impl Into<String>,
    ) -> Result<Self> {
        let language = language.into();
        validate_language(&language)?;
        Ok(CorpusDocument {
            id: id.into(),
            text: text.trim().nfc().collect(),
            language,
            source: source.into(),
        })
    }
}

/// One row of a task dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub id: String,
    pub fields: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub task_type: TaskType,
    pub language: String,
    pub source: String,
}

/// Slot holding the main text of classification and generation records.
pub const TEXT_SLOT: &str = "text";
/// Source-side slot of translation records.
pub const SOURCE_TEXT_SLOT: &str = "src";
/// Target-side slot of translation records.
pub const TARGET_TEXT_SLOT: &str = "tgt";

impl TaskRecord {
    pub fn validate(&self) -> Result<()> {
        validate_language(&self.language)?;
        match self.task_type {
            TaskType::Classification => {
                if self.label.as_deref().is_none_or(str::is_empty) {
                    return Err(Error::Parameter(format!(
                        "classification record `{}` has no label",
                        self.id
                    )));
                }
            }
            TaskType::Translation => {
                for slot in [SOURCE_TEXT_SLOT, TARGET_TEXT_SLOT] {
                    if !self.fields.contains_key(slot) {
                        return Err(Error::Parameter(format!(
                            "translation record `{}` lacks slot `{slot}`",
                            self.id
                        )));
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Looks up a slot value; `label` resolves to the record label when no
    /// field of that name exists.
    pub fn slot(&self, name: &str) -> Option<&str> {
        self.fields
            .get(name)
            .map(String::as_str)
            .or_else(|| (name == "label").then_some(self.label.as_deref()).flatten())
    }
}

/// Normalizes text: NFC, whitespace runs collapsed to one ASCII space,
/// trimmed. Idempotent.
pub fn normalize(text: &str) -> String {
    let composed: String = text.nfc().collect();
    let mut out = String::with_capacity(composed.len());
    for word in composed.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

/// [`normalize`] for raw bytes, rejecting invalid UTF-8.
pub fn normalize_bytes(bytes: &[u8]) -> Result<String> {
    Ok(normalize(std::str::from_utf8(bytes)?))
}

#[derive(Deserialize)]
struct JsonLine {
    text: String,
    #[serde(default)]
    id: Option<serde_json::Value>,
    #[serde(default)]
    label: Option<String>,
    #[serde(default)]
    fields: Option<BTreeMap<String, String>>,
    #[serde(default)]
    task_type: Option<TaskType>,
}

fn id_string(value: Option<serde_json::Value>, line_index: usize) -> String {
    match value {
        Some(serde_json::Value::String(s)) => s,
        Some(serde_json::Value::Null) | None => line_index.to_string(),
        Some(other) => other.to_string(),
    }
}

/// Streaming reader over a corpus file.
///
/// Yields documents in file order. Empty lines (after trimming) are skipped
/// and counted in [`Ingest::skipped`]. The first malformed record ends the
/// stream with an error naming its 1-based line number.
pub struct Ingest {
    path: PathBuf,
    lines: Lines<BufReader<File>>,
    format: InputFormat,
    language: String,
    source: String,
    line_index: usize,
    skipped: usize,
    seen: HashSet<String>,
    failed: bool,
}

impl Ingest {
    pub fn skipped(&self) -> usize {
        self.skipped
    }

    fn parse_error(&mut self, message: impl Into<String>) -> Error {
        self.failed = true;
        Error::Parse {
            path: self.path.clone(),
            line: self.line_index,
            message: message.into(),
        }
    }
}

impl Iterator for Ingest {
    type Item = Result<CorpusDocument>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        loop {
            let line = match self.lines.next()? {
                Ok(line) => line,
                Err(e) => {
                    self.failed = true;
                    return Some(Err(Error::io(&self.path, e)));
                }
            };
            let index = self.line_index;
            self.line_index += 1;
            if line.trim().is_empty() {
                self.skipped += 1;
                continue;
            }
            let (id, text) = match self.format {
                InputFormat::PlainLines => (index.to_string(), line),
                InputFormat::JsonLines => match serde_json::from_str::<JsonLine>(&line) {
                    Ok(rec) => (id_string(rec.id, index), rec.text),
                    Err(e) => return Some(Err(self.parse_error(e.to_string()))),
                },
            };
            if text.trim().is_empty() {
                self.skipped += 1;
                continue;
            }
            if !self.seen.insert(id.clone()) {
                return Some(Err(self.parse_error(format!("duplicate id `{id}`"))));
            }
            return Some(CorpusDocument::new(id, &text, &self.language, &self.source));
        }
    }
}

/// Opens `path` for streaming ingestion.
pub fn ingest(
    path: impl AsRef<Path>,
    format: InputFormat,
    language: &str,
    source: &str,
) -> Result<Ingest> {
    validate_language(language)?;
    let path = path.as_ref().to_path_buf();
    let file = File::open(&path).map_err(|e| Error::io(&path, e))?;
    Ok(Ingest {
        path,
        lines: BufReader::new(file).lines(),
        format,
        language: language.to_owned(),
        source: source.to_owned(),
        line_index: 0,
        skipped: 0,
        seen: HashSet::new(),
        failed: false,
    })
}

/// Reads a whole corpus file into memory.
pub fn ingest_all(
    path: impl AsRef<Path>,
    format: InputFormat,
    language: &str,
    source: &str,
) -> Result<Vec<CorpusDocument>> {
    ingest(path, format, language, source)?.collect()
}

/// Reads a JSON-lines task dataset.
///
/// `text` becomes the `text` slot; an optional `fields` object supplies the
/// remaining slots. Records without `task_type` use `default_task`.
pub fn ingest_task_records(
    path: impl AsRef<Path>,
    language: &str,
    source: &str,
    default_task: Option<TaskType>,
) -> Result<Vec<TaskRecord>> {
    validate_language(language)?;
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (index, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: JsonLine =
            serde_json::from_str(&line).map_err(|e| parse_err(index + 1, e.to_string()))?;
        let task_type = rec.task_type.or(default_task).ok_or_else(|| {
            parse_err(index + 1, "record has no task_type and no default was given".into())
        })?;
        let mut fields: BTreeMap<String, String> = rec
            .fields
            .unwrap_or_default()
            .into_iter()
            .map(|(k, v)| (k, v.nfc().collect()))
            .collect();
        fields.insert(TEXT_SLOT.to_owned(), rec.text.trim().nfc().collect());
        let id = id_string(rec.id, index);
        if !seen.insert(id.clone()) {
            return Err(parse_err(index + 1, format!("duplicate id `{id}`")));
        }
        let record = TaskRecord {
            id,
            fields,
            label: rec.label.map(|l| l.trim().nfc().collect()),
            task_type,
            language: language.to_owned(),
            source: source.to_owned(),
        };
        record
            .validate()
            .map_err(|e| parse_err(index + 1, e.to_string()))?;
        out.push(record);
    }
    Ok(out)
}

/// Per-language counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LanguageStats {
    pub doc_count: u64,
    pub whitespace_word_count: u64,
    pub codepoint_count: u64,
}

impl LanguageStats {
    pub fn of_text(text: &str) -> Self {
        LanguageStats {
            doc_count: 1,
            whitespace_word_count: text.split_whitespace().count() as u64,
            codepoint_count: text.chars().count() as u64,
        }
    }

    pub fn merge(&mut self, other: &LanguageStats) {
        self.doc_count += other.doc_count;
        self.whitespace_word_count += other.whitespace_word_count;
        self.codepoint_count += other.codepoint_count;
    }
}

pub type CorpusStats = BTreeMap<String, LanguageStats>;

fn merge_stats(mut a: CorpusStats, b: CorpusStats) -> CorpusStats {
    for (lang, s) in b {
        a.entry(lang).or_default().merge(&s);
    }
    a
}

/// Exact per-language document, word and codepoint counts.
pub fn corpus_stats(docs: &[CorpusDocument]) -> CorpusStats {
    crate::par::fold_merge(
        docs,
        CorpusStats::new,
        |mut acc, doc| {
            acc.entry(doc.language.clone())
                .or_default()
                .merge(&LanguageStats::of_text(&doc.text));
            acc
        },
        merge_stats,
    )
}
