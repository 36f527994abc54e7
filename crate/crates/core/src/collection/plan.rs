use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Upsampling factor applied to each identity prompt.
pub const IDENTITY_UPSAMPLE: u64 = 500;
/// Upsampling factor applied to each safety prompt.
pub const SAFETY_UPSAMPLE: u64 = 500;
/// Upsampling factor applied to each poem prompt.
pub const POEM_UPSAMPLE: u64 = 20;
/// Size of the first (NLP-task) tuning phase.
pub const PHASE1_TARGET: u64 = 18_000_000;
/// Size of the second (general, local-language and human-centric) phase.
pub const PHASE2_TARGET: u64 = 12_800_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Phase1,
    Phase2,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Phase1 => "phase1",
            Phase::Phase2 => "phase2",
        })
    }
}

fn one() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourcePlan {
    #[serde(default = "one")]
    pub upsample_factor: u64,
    #[serde(default)]
    pub cap: Option<u64>,
    pub phase: Phase,
}

impl SourcePlan {
    pub fn new(upsample_factor: u64, cap: Option<u64>, phase: Phase) -> Self {
        SourcePlan {
            upsample_factor,
            cap,
            phase,
        }
    }

    pub fn identity_prompts() -> Self {
        Self::new(IDENTITY_UPSAMPLE, None, Phase::Phase2)
    }

    pub fn safety_prompts() -> Self {
        Self::new(SAFETY_UPSAMPLE, None, Phase::Phase2)
    }

    pub fn poem_prompts() -> Self {
        Self::new(POEM_UPSAMPLE, None, Phase::Phase2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseTotals {
    pub phase1: u64,
    pub phase2: u64,
}

impl PhaseTotals {
    pub const FULL_SCALE: PhaseTotals = PhaseTotals {
        phase1: PHASE1_TARGET,
        phase2: PHASE2_TARGET,
    };

    pub fn get(&self, phase: Phase) -> u64 {
        match phase {
            Phase::Phase1 => self.phase1,
            Phase::Phase2 => self.phase2,
        }
    }
}

/// Per-source replication, caps and phase assignment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingPlan {
    pub per_source: BTreeMap<String, SourcePlan>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_totals: Option<PhaseTotals>,
    #[serde(default)]
    pub seed: u64,
}

impl SamplingPlan {
    pub fn new(seed: u64) -> Self {
        SamplingPlan {
            per_source: BTreeMap::new(),
            target_totals: None,
            seed,
        }
    }

    pub fn with_source(mut self, source: impl Into<String>, plan: SourcePlan) -> Self {
        self.per_source.insert(source.into(), plan);
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (source, p) in &self.per_source {
            if p.upsample_factor == 0 {
                return Err(Error::Plan(format!("source `{source}` has upsample_factor 0")));
            }
            if p.cap == Some(0) {
                return Err(Error::Plan(format!("source `{source}` has cap 0")));
            }
        }
        Ok(())
    }

    pub fn source(&self, name: &str) -> Result<&SourcePlan> {
        self.per_source
            .get(name)
            .ok_or_else(|| Error::Plan(format!("source `{name}` is not in the sampling plan")))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let plan: SamplingPlan = serde_json::from_str(&text)?;
        plan.validate()?;
        Ok(plan)
    }
}
