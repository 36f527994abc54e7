//! Instruction-corpus compilation.
//!
//! Records are rendered through prompt templates, replicated according to a
//! [`SamplingPlan`], and assigned to one of two tuning phases: NLP-task
//! prompts go to phase 1, general-knowledge, local-language generative and
//! human-centric prompts to phase 2.

mod plan;
mod sampling;
mod template;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use plan::{
    Phase, PhaseTotals, SamplingPlan, SourcePlan, IDENTITY_UPSAMPLE, PHASE1_TARGET,
    PHASE2_TARGET, POEM_UPSAMPLE, SAFETY_UPSAMPLE,
};
pub use sampling::{largest_remainder, split_phases, subsample_to_target};
pub use template::{render_template, PromptTemplate, TemplateRegistry};

use crate::corpus::{TaskRecord, TaskType, TEXT_SLOT};
use crate::{par, Error, Result};

/// Slot holding the former label of an inverted record.
pub const TOPIC_SLOT: &str = "topic";
/// Slot holding the language code of an inverted record.
pub const LANGUAGE_SLOT: &str = "language";

/// One rendered training example.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstructionInstance {
    pub input: String,
    pub target: String,
    pub task_type: TaskType,
    pub language: String,
    pub source: String,
    pub template_id: String,
    pub phase: Phase,
    pub copy_index: u64,
    #[serde(skip)]
    pub record_id: String,
}

impl InstructionInstance {
    /// One JSON line, without the trailing newline.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("instance serializes")
    }
}

/// 64-bit digest of `(seed, source, id)` used for template choice and RNG
/// seeding. Stable across platforms and releases.
pub(crate) fn stable_hash(seed: u64, source: &str, id: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update((source.len() as u64).to_le_bytes());
    h.update(source.as_bytes());
    h.update(id.as_bytes());
    u64::from_le_bytes(h.finalize()[..8].try_into().unwrap())
}

/// Swaps the label and text roles of a record.
///
/// A classification record becomes a generation record whose `topic` and
/// `language` slots hold the former label and language, with the former text
/// as target. Applied to such a generation record it restores the
/// classification record.
pub fn invert_generative(record: &TaskRecord) -> Result<TaskRecord> {
    let text = record.fields.get(TEXT_SLOT).ok_or_else(|| {
        Error::Parameter(format!("record `{}` has no `{TEXT_SLOT}` slot", record.id))
    })?;
    match record.task_type {
        TaskType::Classification => {
            let label = record
                .label
                .as_deref()
                .filter(|l| !l.is_empty())
                .ok_or_else(|| Error::Parameter(format!("record `{}` has no label", record.id)))?;
            let mut fields = record.fields.clone();
            fields.insert(TOPIC_SLOT.into(), label.to_owned());
            fields.insert(LANGUAGE_SLOT.into(), record.language.clone());
            fields.insert(TEXT_SLOT.into(), text.clone());
            Ok(TaskRecord {
                fields,
                label: None,
                task_type: TaskType::Generation,
                ..record.clone()
            })
        }
        TaskType::Generation => {
            let label = record.fields.get(TOPIC_SLOT).ok_or_else(|| {
                Error::Parameter(format!("generation record `{}` has no label slot", record.id))
            })?;
            let mut fields = record.fields.clone();
            fields.remove(TOPIC_SLOT);
            fields.remove(LANGUAGE_SLOT);
            Ok(TaskRecord {
                fields,
                label: Some(label.clone()),
                task_type: TaskType::Classification,
                ..record.clone()
            })
        }
        other => Err(Error::Parameter(format!(
            "cannot invert a {other} record (`{}`)",
            record.id
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceCounts {
    pub phase: Phase,
    /// Records supplied for the source.
    pub records: u64,
    /// Records kept after the cap.
    pub kept_records: u64,
    /// Instances after upsampling.
    pub instances: u64,
    /// Instances left after phase-target subsampling.
    pub selected: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildManifest {
    pub toolkit_version: String,
    pub seed: u64,
    pub plan: SamplingPlan,
    pub per_source: BTreeMap<String, SourceCounts>,
    pub phase1_instances: u64,
    pub phase2_instances: u64,
}

/// A compiled instruction corpus.
#[derive(Debug, Clone)]
pub struct Collection {
    /// Ordered by (source, record id, copy index).
    pub instances: Vec<InstructionInstance>,
    pub manifest: BuildManifest,
}

impl Collection {
    /// The whole collection as LF-terminated JSON lines.
    pub fn to_jsonl(&self) -> String {
        jsonl(&self.instances)
    }
}

pub fn jsonl(instances: &[InstructionInstance]) -> String {
    let mut out = String::new();
    for inst in instances {
        out.push_str(&inst.to_json_line());
        out.push('\n');
    }
    out
}

/// Renders, replicates and phases `records` according to `plan`.
///
/// Records of each source are ordered by id; `cap` keeps the first ones.
/// Each record gets one template chosen by a seeded hash of
/// `(seed, source, id)` among the candidates for its task type, and is
/// replicated `upsample_factor` times. When the plan sets `target_totals`,
/// each phase is then subsampled to its target.
pub fn build_collection(
    templates: &TemplateRegistry,
    records: &[TaskRecord],
    plan: &SamplingPlan,
) -> Result<Collection> {
    plan.validate()?;
    let mut by_source: BTreeMap<&str, Vec<&TaskRecord>> = BTreeMap::new();
    for r in records {
        plan.source(&r.source)?;
        by_source.entry(r.source.as_str()).or_default().push(r);
    }
    let groups: Vec<(&str, Vec<&TaskRecord>)> = by_source.into_iter().collect();

    let shards = par::map(&groups, |(source, recs)| {
        build_source(templates, source, recs, plan)
    });
    let mut instances = Vec::new();
    let mut per_source = BTreeMap::new();
    for ((source, _), shard) in groups.iter().zip(shards) {
        let (insts, counts) = shard?;
        per_source.insert(source.to_string(), counts);
        instances.extend(insts);
    }

    if let Some(totals) = plan.target_totals {
        let (p1, p2) = split_phases(instances);
        let mut kept: Vec<InstructionInstance> = Vec::new();
        for (phase, part) in [(Phase::Phase1, p1), (Phase::Phase2, p2)] {
            let seed = plan.seed ^ (phase as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
            kept.extend(subsample_to_target(part, totals.get(phase), seed));
        }
        // restore the (source, record id, copy) order across phases
        let order: BTreeMap<&str, usize> =
            groups.iter().enumerate().map(|(i, (s, _))| (*s, i)).collect();
        kept.sort_by_cached_key(|i| order[i.source.as_str()]);
        instances = kept;
        for c in per_source.values_mut() {
            c.selected = 0;
        }
        for inst in &instances {
            per_source.get_mut(&inst.source).expect("known source").selected += 1;
        }
    }

    let count = |p: Phase| instances.iter().filter(|i| i.phase == p).count() as u64;
    let manifest = BuildManifest {
        toolkit_version: crate::VERSION.to_owned(),
        seed: plan.seed,
        plan: plan.clone(),
        phase1_instances: count(Phase::Phase1),
        phase2_instances: count(Phase::Phase2),
        per_source,
    };
    Ok(Collection {
        instances,
        manifest,
    })
}

fn build_source(
    templates: &TemplateRegistry,
    source: &str,
    records: &[&TaskRecord],
    plan: &SamplingPlan,
) -> Result<(Vec<InstructionInstance>, SourceCounts)> {
    let sp = plan.source(source)?;
    let mut records: Vec<&TaskRecord> = records.to_vec();
    records.sort_by(|a, b| a.id.cmp(&b.id));
    if let Some(dup) = records.windows(2).find(|w| w[0].id == w[1].id) {
        return Err(Error::Parameter(format!(
            "duplicate record id `{}` in source `{source}`",
            dup[0].id
        )));
    }
    let total = records.len() as u64;
    if let Some(cap) = sp.cap {
        records.truncate(cap.min(total) as usize);
    }

    let mut out = Vec::with_capacity(records.len() * sp.upsample_factor as usize);
    for r in &records {
        r.validate()?;
        if sp.phase == Phase::Phase1 && !r.task_type.is_nlp_task() {
            return Err(Error::Plan(format!(
                "source `{source}` is assigned to phase1 but record `{}` is a {} record",
                r.id, r.task_type
            )));
        }
        let candidates = templates.candidates(r.task_type, &r.language);
        if candidates.is_empty() {
            return Err(Error::Config(format!(
                "no templates registered for task type {}",
                r.task_type
            )));
        }
        let pick = stable_hash(plan.seed, source, &r.id) % candidates.len() as u64;
        let rendered = render_template(candidates[pick as usize], r, sp.phase)?;
        for copy in 0..sp.upsample_factor {
            let mut inst = rendered.clone();
            inst.copy_index = copy;
            out.push(inst);
        }
    }
    let counts = SourceCounts {
        phase: sp.phase,
        records: total,
        kept_records: records.len() as u64,
        instances: out.len() as u64,
        selected: out.len() as u64,
    };
    Ok((out, counts))
}
