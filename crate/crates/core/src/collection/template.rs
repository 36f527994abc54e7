use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{InstructionInstance, Phase};
use crate::corpus::{TaskRecord, TaskType};
use crate::{Error, Result};

/// An instruction pattern with `{slot}` placeholders.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PromptTemplate {
    pub id: String,
    pub task_type: TaskType,
    pub input_pattern: String,
    pub target_pattern: String,
    pub language: String,
}

enum Part<'a> {
    Literal(&'a str),
    Slot(&'a str),
}

fn is_slot_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Splits a pattern into literals and `{name}` placeholders. Braces that do
/// not enclose a valid slot name stay literal.
fn parse(pattern: &str) -> Vec<Part<'_>> {
    let mut parts = Vec::new();
    let mut literal_start = 0;
    let mut i = 0;
    while let Some(off) = pattern[i..].find('{') {
        let open = i + off;
        let rest = &pattern[open + 1..];
        let name_len = rest.find(|c: char| !is_slot_char(c)).unwrap_or(rest.len());
        if name_len > 0 && rest[name_len..].starts_with('}') {
            if literal_start < open {
                parts.push(Part::Literal(&pattern[literal_start..open]));
            }
            parts.push(Part::Slot(&rest[..name_len]));
            i = open + 1 + name_len + 1;
            literal_start = i;
        } else {
            i = open + 1;
        }
    }
    if literal_start < pattern.len() {
        parts.push(Part::Literal(&pattern[literal_start..]));
    }
    parts
}

impl PromptTemplate {
    /// Slot names referenced by either pattern, in first-use order.
    pub fn slots(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        parse(&self.input_pattern)
            .into_iter()
            .chain(parse(&self.target_pattern))
            .filter_map(|p| match p {
                Part::Slot(s) if seen.insert(s) => Some(s),
                _ => None,
            })
            .collect()
    }

    fn fill(&self, pattern: &str, record: &TaskRecord) -> Result<String> {
        let mut out = String::with_capacity(pattern.len() + 64);
        for part in parse(pattern) {
            match part {
                Part::Literal(s) => out.push_str(s),
                Part::Slot(name) => out.push_str(record.slot(name).ok_or_else(|| Error::Render {
                    template: self.id.clone(),
                    slot: name.to_owned(),
                })?),
            }
        }
        Ok(out)
    }
}

/// Renders one record through one template. Slot values are inserted
/// verbatim in a single pass.
pub fn render_template(
    template: &PromptTemplate,
    record: &TaskRecord,
    phase: Phase,
) -> Result<InstructionInstance> {
    if template.task_type != record.task_type {
        return Err(Error::Parameter(format!(
            "template `{}` is for {} but record `{}` is {}",
            template.id, template.task_type, record.id, record.task_type
        )));
    }
    let input = template.fill(&template.input_pattern, record)?;
    let target = template.fill(&template.target_pattern, record)?;
    if input.trim().is_empty() || target.trim().is_empty() {
        return Err(Error::Parameter(format!(
            "template `{}` renders an empty input or target for record `{}`",
            template.id, record.id
        )));
    }
    Ok(InstructionInstance {
        input,
        target,
        task_type: record.task_type,
        language: record.language.clone(),
        source: record.source.clone(),
        template_id: template.id.clone(),
        phase,
        copy_index: 0,
        record_id: record.id.clone(),
    })
}

/// Templates indexed by task type, with unique ids.
#[derive(Debug, Clone, Default)]
pub struct TemplateRegistry {
    templates: Vec<PromptTemplate>,
    by_task: BTreeMap<TaskType, Vec<usize>>,
}

impl TemplateRegistry {
    pub fn new(templates: Vec<PromptTemplate>) -> Result<Self> {
        let mut ids = HashSet::new();
        let mut by_task: BTreeMap<TaskType, Vec<usize>> = BTreeMap::new();
        for (i, t) in templates.iter().enumerate() {
            if !ids.insert(t.id.as_str()) {
                return Err(Error::Config(format!("duplicate template id `{}`", t.id)));
            }
            by_task.entry(t.task_type).or_default().push(i);
        }
        Ok(TemplateRegistry { templates, by_task })
    }

    /// Reads a JSON array of templates.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::new(serde_json::from_str(&text)?)
    }

    pub fn len(&self) -> usize {
        self.templates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }

    pub fn templates(&self) -> &[PromptTemplate] {
        &self.templates
    }

    /// Templates usable for a record: those of its task type and language,
    /// or all of its task type when none match the language.
    pub fn candidates(&self, task_type: TaskType, language: &str) -> Vec<&PromptTemplate> {
        let all: Vec<&PromptTemplate> = self
            .by_task
            .get(&task_type)
            .map(|ix| ix.iter().map(|&i| &self.templates[i]).collect())
            .unwrap_or_default();
        let same_language: Vec<&PromptTemplate> =
            all.iter().copied().filter(|t| t.language == language).collect();
        if same_language.is_empty() {
            all
        } else {
            same_language
        }
    }
}
