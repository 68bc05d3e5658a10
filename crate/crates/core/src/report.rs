//! The JSON run report.
//!
//! Field order in these structs is the key order in the file, and every map
//! is a `BTreeMap`, so equal runs give byte-identical output. The layout is
//! described in `docs/report-schema.md`; bump [`SCHEMA_VERSION`] on any
//! incompatible change.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::analysis::{LinearFit, ThresholdFit, Verdict};
use crate::embedding::Provenance;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub generator: Generator,
    pub config: ConfigEcho,
    pub dataset: DatasetSummary,
    pub labeling: LabelingSummary,
    /// One entry per `(method, k)`, sorted by `k` then method name.
    pub results: Vec<ResultBlock>,
    /// Keyed by output dimension; method names, best first.
    pub rankings: BTreeMap<String, Vec<String>>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Generator {
    pub name: String,
    pub version: String,
}

impl Default for Generator {
    fn default() -> Self {
        Generator {
            name: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub input: String,
    pub endpoint: String,
    /// A number, or the string `"mean"`.
    pub threshold: ThresholdEcho,
    pub methods: Vec<String>,
    pub dims: Vec<usize>,
    pub normalize: bool,
    pub seed: u64,
    pub class_names: ClassNamesEcho,
    pub sammon: SammonEcho,
    pub nlpca: NlpcaEcho,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ThresholdEcho {
    Value(f64),
    Keyword(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassNamesEcho {
    pub positive: String,
    pub negative: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SammonEcho {
    pub step_factor: f64,
    pub max_iterations: usize,
    pub relative_tolerance: f64,
    pub init: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NlpcaEcho {
    pub hidden_width: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub epochs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetSummary {
    pub rows_read: usize,
    pub duplicates_removed: usize,
    pub compounds: usize,
    pub descriptors: Vec<String>,
    /// Descriptors with zero variance after deduplication.
    pub constant_descriptors: Vec<String>,
    pub endpoint: EndpointSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EndpointSummary {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelingSummary {
    /// Threshold actually applied (the resolved mean when requested).
    pub threshold: f64,
    pub threshold_source: String,
    pub rule: String,
    pub positive_class: String,
    pub negative_class: String,
    pub positives: usize,
    pub negatives: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultBlock {
    pub method: String,
    pub k: usize,
    pub files: Files,
    pub metrics: Metrics,
    pub verdict: Verdict,
    pub provenance: Provenance,
}

/// Artifact names relative to the output directory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Files {
    pub svg: String,
    pub csv: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    pub threshold_accuracy_1d: Option<ThresholdFit>,
    pub linear_accuracy: Option<LinearFit>,
    pub quadratic_accuracy: f64,
    pub silhouette: Option<f64>,
}

impl Report {
    /// Pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is always serializable");
        s.push('\n');
        s
    }
}
