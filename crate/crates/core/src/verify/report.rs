use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Check, Tally};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Not applicable to the family, or nothing to check.
    Skipped,
}

/// How a sampled population was drawn: ChaCha8 seeded with `seed` mixed
/// with the FNV-1a hash of `stream`, indices without replacement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleInfo {
    pub seed: u64,
    pub stream: String,
    pub population: u128,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check: String,
    pub anchor: String,
    pub instance: String,
    pub status: Status,
    pub instances: u64,
    pub failures: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    /// Present when the instances were sampled rather than exhausted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample: Option<SampleInfo>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metrics: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckRecord {
    pub fn new(check: Check, instance: &str) -> Self {
        Self {
            check: check.id().to_string(),
            anchor: check.anchor().to_string(),
            instance: instance.to_string(),
            status: Status::Skipped,
            instances: 0,
            failures: 0,
            witness: None,
            sample: None,
            metrics: BTreeMap::new(),
            note: None,
        }
    }

    pub fn skipped(check: Check, instance: &str, why: &str) -> Self {
        Self::new(check, instance).with_note(why)
    }

    /// A single failed instance.
    pub fn failed(check: Check, instance: &str, witness: Value) -> Self {
        let mut r = Self::new(check, instance);
        r.instances = 1;
        r.failures = 1;
        r.status = Status::Fail;
        r.witness = Some(witness);
        r
    }

    pub(crate) fn from_tally(check: Check, instance: &str, t: Tally, describe: impl Fn(usize) -> Value) -> Self {
        let mut r = Self::new(check, instance);
        r.instances = t.instances;
        r.failures = t.failures;
        r.witness = t.witness.map(|(i, w)| serde_json::json!({ "instance": describe(i), "detail": w }));
        r.status = if t.failures > 0 {
            Status::Fail
        } else if t.instances == 0 {
            Status::Skipped
        } else {
            Status::Pass
        };
        r
    }

    pub fn with_sample(mut self, sample: Option<SampleInfo>) -> Self {
        self.sample = sample;
        self
    }

    pub fn with_metric(mut self, name: &str, value: impl Into<Value>) -> Self {
        self.metrics.insert(name.to_string(), value.into());
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub checks: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    /// Some check ran on a sample.
    pub partial: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: String,
    pub command: String,
    pub config: Value,
    pub records: Vec<CheckRecord>,
    pub summary: Summary,
}

impl Report {
    pub fn new(command: &str, config: Value, records: Vec<CheckRecord>) -> Self {
        let mut summary = Summary {
            checks: records.len(),
            ..Summary::default()
        };
        for r in &records {
            match r.status {
                Status::Pass => summary.passed += 1,
                Status::Fail => summary.failed += 1,
                Status::Skipped => summary.skipped += 1,
            }
            summary.partial |= r.sample.is_some();
        }
        Self {
            schema_version: SCHEMA_VERSION,
            tool: concat!("cubecocycle ", env!("CARGO_PKG_VERSION")).to_string(),
            command: command.to_string(),
            config,
            records,
            summary,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }
}
