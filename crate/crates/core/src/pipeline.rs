//! End-to-end run: load, deduplicate, normalize, label, embed with every
//! requested `(method, k)`, score, and write the artifacts.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use crate::analysis::{compare_methods, SeparabilityReport};
use crate::dataset::{ClassNames, DescriptorTable, EndpointLabeling};
use crate::embedding::{Embedding, Method};
use crate::export::write_embedding_csv;
use crate::nlpca::{self, TrainConfig};
use crate::pca::PcaModel;
use crate::plot::scatter_svg;
use crate::report::*;
use crate::sammon::{self, SammonConfig, SammonInit};

/// Where the labeling threshold comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdSpec {
    Value(f64),
    /// Mean of the endpoint after deduplication.
    Mean,
}

impl std::str::FromStr for ThresholdSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("mean") {
            return Ok(ThresholdSpec::Mean);
        }
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(ThresholdSpec::Value(v)),
            _ => Err(format!(
                "threshold must be a finite number or `mean`, got `{s}`"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub endpoint: String,
    pub threshold: ThresholdSpec,
    pub methods: Vec<Method>,
    pub dims: Vec<usize>,
    pub normalize: bool,
    /// Seeds Sammon's tie-breaking jitter and the autoencoder weights. The
    /// `seed` fields of `sammon` and `nlpca` are overwritten with it.
    pub seed: u64,
    pub out_dir: PathBuf,
    pub sammon: SammonConfig,
    pub nlpca: TrainConfig,
    pub class_names: ClassNames,
    /// Run the `(method, k)` jobs on separate threads.
    pub parallel: bool,
}

impl RunConfig {
    /// All three methods in one and two dimensions, normalized, seed 0.
    pub fn new(
        input: impl Into<PathBuf>,
        endpoint: impl Into<String>,
        threshold: ThresholdSpec,
        out_dir: impl Into<PathBuf>,
    ) -> Self {
        RunConfig {
            input: input.into(),
            endpoint: endpoint.into(),
            threshold,
            methods: Method::ALL.to_vec(),
            dims: vec![1, 2],
            normalize: true,
            seed: 0,
            out_dir: out_dir.into(),
            sammon: SammonConfig::default(),
            nlpca: TrainConfig::default(),
            class_names: ClassNames::default(),
            parallel: true,
        }
    }

    /// Requested jobs, deduplicated, ordered by `k` then method name.
    pub fn jobs(&self) -> Vec<(Method, usize)> {
        let mut jobs: Vec<(Method, usize)> = self
            .dims
            .iter()
            .flat_map(|&k| self.methods.iter().map(move |&m| (m, k)))
            .collect();
        jobs.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.as_str().cmp(b.0.as_str())));
        jobs.dedup();
        jobs
    }

    fn validate(&self) -> Result<(), String> {
        if self.methods.is_empty() {
            return Err("no methods requested".into());
        }
        if self.dims.is_empty() {
            return Err("no output dimensions requested".into());
        }
        if let Some(k) = self.dims.iter().find(|&&k| k != 1 && k != 2) {
            return Err(format!("output dimension must be 1 or 2, got {k}"));
        }
        if let ThresholdSpec::Value(v) = self.threshold {
            if !v.is_finite() {
                return Err(format!("threshold must be finite, got {v}"));
            }
        }
        self.sammon.validate().map_err(|e| e.to_string())?;
        self.nlpca.validate().map_err(|e| e.to_string())?;
        Ok(())
    }
}

/// Pipeline step at which a run failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stage {
    Config,
    Load,
    Deduplicate,
    Label,
    Embed { method: Method, k: usize },
    Analyze,
    Write,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stage::Config => f.write_str("config"),
            Stage::Load => f.write_str("load"),
            Stage::Deduplicate => f.write_str("deduplicate"),
            Stage::Label => f.write_str("label"),
            Stage::Embed { method, k } => write!(f, "embed ({method}, {k}D)"),
            Stage::Analyze => f.write_str("analyze"),
            Stage::Write => f.write_str("write"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{stage} stage failed: {message}")]
pub struct PipelineError {
    pub stage: Stage,
    pub message: String,
}

impl PipelineError {
    fn new(stage: Stage, err: impl fmt::Display) -> Self {
        PipelineError {
            stage,
            message: err.to_string(),
        }
    }
}

/// Everything a run produced, in memory.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub table: DescriptorTable,
    pub labels: EndpointLabeling,
    pub embeddings: Vec<Embedding>,
    pub separability: SeparabilityReport,
    pub report: Report,
    /// Written files, report last.
    pub files: Vec<PathBuf>,
}

pub fn svg_name(method: Method, k: usize) -> String {
    format!("{method}_{k}d.svg")
}

pub fn csv_name(method: Method, k: usize) -> String {
    format!("{method}_{k}d.csv")
}

pub const REPORT_NAME: &str = "report.json";

/// Runs the pipeline and writes one SVG and one CSV per `(method, k)` plus
/// `report.json` into `out_dir`, creating it if needed.
pub fn run(config: &RunConfig) -> Result<RunOutput, PipelineError> {
    config
        .validate()
        .map_err(|e| PipelineError::new(Stage::Config, e))?;

    let raw = DescriptorTable::load_csv(&config.input, &config.endpoint)
        .map_err(|e| PipelineError::new(Stage::Load, e))?;
    let (table, dedup) = raw
        .deduplicate()
        .map_err(|e| PipelineError::new(Stage::Deduplicate, e))?;
    let mut warnings = dedup.warnings();
    let constant = constant_descriptors(&table);
    for name in &constant {
        warnings.push(format!(
            "descriptor `{name}` is constant; it carries no information"
        ));
    }
    let table = if config.normalize {
        table.normalize()
    } else {
        table
    };

    let (threshold, source) = match config.threshold {
        ThresholdSpec::Value(v) => (v, "value"),
        ThresholdSpec::Mean => (table.mean_threshold(), "mean"),
    };
    let labels = table.label_with(threshold, config.class_names.clone());
    if !labels.has_both_classes() {
        return Err(PipelineError::new(
            Stage::Label,
            format!(
                "threshold {threshold} leaves a single class ({} positive, {} negative)",
                labels.n_positive(),
                labels.n_negative()
            ),
        ));
    }
    if let Some(&k) = config.dims.iter().find(|&&k| k > table.n_descriptors()) {
        return Err(PipelineError::new(
            Stage::Config,
            format!(
                "cannot map {} descriptors to {k} dimensions",
                table.n_descriptors()
            ),
        ));
    }

    let jobs = config.jobs();
    let data = table.values();
    let results: Vec<Result<(Embedding, Vec<String>), PipelineError>> =
        if config.parallel && jobs.len() > 1 {
            std::thread::scope(|s| {
                let handles: Vec<_> = jobs
                    .iter()
                    .map(|&(m, k)| s.spawn(move || embed_job(data, m, k, config)))
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("embedding job panicked"))
                    .collect()
            })
        } else {
            jobs.iter()
                .map(|&(m, k)| embed_job(data, m, k, config))
                .collect()
        };
    let mut embeddings = Vec::with_capacity(jobs.len());
    for r in results {
        let (emb, w) = r?;
        warnings.extend(w);
        embeddings.push(emb);
    }

    let entries: Vec<(&str, &Embedding)> =
        embeddings.iter().map(|e| (e.method.as_str(), e)).collect();
    let separability =
        compare_methods(&entries, &labels).map_err(|e| PipelineError::new(Stage::Analyze, e))?;

    let report = build_report(
        config,
        &raw,
        dedup.removed_count(),
        &table,
        constant,
        &labels,
        source,
        &embeddings,
        &separability,
        warnings,
    );

    let write_err = |e: std::io::Error, path: &Path| {
        PipelineError::new(Stage::Write, format!("{}: {e}", path.display()))
    };
    fs::create_dir_all(&config.out_dir).map_err(|e| write_err(e, &config.out_dir))?;
    let mut files = Vec::new();
    for emb in &embeddings {
        let k = emb.dims();
        let svg_path = config.out_dir.join(svg_name(emb.method, k));
        fs::write(&svg_path, scatter_svg(emb, &labels)).map_err(|e| write_err(e, &svg_path))?;
        files.push(svg_path);
        let csv_path = config.out_dir.join(csv_name(emb.method, k));
        let file = fs::File::create(&csv_path).map_err(|e| write_err(e, &csv_path))?;
        write_embedding_csv(
            std::io::BufWriter::new(file),
            table.compound_ids(),
            &emb.coords,
            &labels,
        )
        .map_err(|e| PipelineError::new(Stage::Write, format!("{}: {e}", csv_path.display())))?;
        files.push(csv_path);
    }
    let report_path = config.out_dir.join(REPORT_NAME);
    fs::write(&report_path, report.to_json()).map_err(|e| write_err(e, &report_path))?;
    files.push(report_path);

    Ok(RunOutput {
        table,
        labels,
        embeddings,
        separability,
        report,
        files,
    })
}

fn embed_job(
    data: &crate::Matrix,
    method: Method,
    k: usize,
    config: &RunConfig,
) -> Result<(Embedding, Vec<String>), PipelineError> {
    let stage = || Stage::Embed { method, k };
    match method {
        Method::Pca => {
            let model = PcaModel::fit(data, k).map_err(|e| PipelineError::new(stage(), e))?;
            let emb = model
                .project(data)
                .map_err(|e| PipelineError::new(stage(), e))?;
            Ok((emb, Vec::new()))
        }
        Method::Sammon => {
            let cfg = SammonConfig {
                seed: config.seed,
                ..config.sammon.clone()
            };
            let (emb, trace) =
                sammon::embed(data, k, &cfg).map_err(|e| PipelineError::new(stage(), e))?;
            let mut warnings = Vec::new();
            if trace.clamped_pairs > 0 {
                warnings.push(format!(
                    "sammon {k}D: {} coincident input pair(s) had their distance clamped",
                    trace.clamped_pairs
                ));
            }
            if !trace.converged {
                warnings.push(format!(
                    "sammon {k}D: stopped after {} iterations without meeting the tolerance",
                    trace.iterations_used
                ));
            }
            Ok((emb, warnings))
        }
        Method::Nlpca => {
            let cfg = TrainConfig {
                seed: config.seed,
                ..config.nlpca.clone()
            };
            let (net, trace) =
                nlpca::train(data, k, &cfg).map_err(|e| PipelineError::new(stage(), e))?;
            let emb = net
                .encode_with_trace(data, &trace)
                .map_err(|e| PipelineError::new(stage(), e))?;
            Ok((emb, Vec::new()))
        }
    }
}

fn constant_descriptors(table: &DescriptorTable) -> Vec<String> {
    let v = table.values();
    (0..v.cols())
        .filter(|&j| (1..v.rows()).all(|i| v[(i, j)] == v[(0, j)]))
        .map(|j| table.descriptor_names()[j].clone())
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn build_report(
    config: &RunConfig,
    raw: &DescriptorTable,
    removed: usize,
    table: &DescriptorTable,
    constant: Vec<String>,
    labels: &EndpointLabeling,
    source: &str,
    embeddings: &[Embedding],
    sep: &SeparabilityReport,
    warnings: Vec<String>,
) -> Report {
    let endpoint = table.endpoint();
    let results = sep
        .blocks
        .iter()
        .map(|b| {
            let emb = embeddings
                .iter()
                .find(|e| e.method.as_str() == b.method && e.dims() == b.k)
                .expect("every block comes from an embedding");
            ResultBlock {
                method: b.method.clone(),
                k: b.k,
                files: Files {
                    svg: svg_name(emb.method, b.k),
                    csv: csv_name(emb.method, b.k),
                },
                metrics: Metrics {
                    threshold_accuracy_1d: b.threshold_accuracy_1d,
                    linear_accuracy: b.linear_accuracy.clone(),
                    quadratic_accuracy: b.quadratic_accuracy,
                    silhouette: b.silhouette,
                },
                verdict: b.verdict,
                provenance: emb.provenance.clone(),
            }
        })
        .collect();
    let mut methods: Vec<String> = config
        .methods
        .iter()
        .map(|m| m.as_str().to_string())
        .collect();
    methods.sort();
    methods.dedup();
    let mut dims = config.dims.clone();
    dims.sort_unstable();
    dims.dedup();
    Report {
        schema_version: SCHEMA_VERSION,
        generator: Generator::default(),
        config: ConfigEcho {
            input: config.input.display().to_string(),
            endpoint: config.endpoint.clone(),
            threshold: match config.threshold {
                ThresholdSpec::Value(v) => ThresholdEcho::Value(v),
                ThresholdSpec::Mean => ThresholdEcho::Keyword("mean".into()),
            },
            methods,
            dims,
            normalize: config.normalize,
            seed: config.seed,
            class_names: ClassNamesEcho {
                positive: config.class_names.positive.clone(),
                negative: config.class_names.negative.clone(),
            },
            sammon: SammonEcho {
                step_factor: config.sammon.step_factor,
                max_iterations: config.sammon.max_iterations,
                relative_tolerance: config.sammon.relative_tolerance,
                init: match config.sammon.init {
                    SammonInit::Pca => "pca".into(),
                    SammonInit::Random => "random".into(),
                },
            },
            nlpca: NlpcaEcho {
                hidden_width: config.nlpca.hidden_width,
                learning_rate: config.nlpca.learning_rate,
                momentum: config.nlpca.momentum,
                epochs: config.nlpca.epochs,
            },
        },
        dataset: DatasetSummary {
            rows_read: raw.n_compounds(),
            duplicates_removed: removed,
            compounds: table.n_compounds(),
            descriptors: table.descriptor_names().to_vec(),
            constant_descriptors: constant,
            endpoint: EndpointSummary {
                name: table.endpoint_name().to_string(),
                min: endpoint.iter().copied().fold(f64::INFINITY, f64::min),
                max: endpoint.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                mean: table.mean_threshold(),
            },
        },
        labeling: LabelingSummary {
            threshold: labels.threshold(),
            threshold_source: source.to_string(),
            rule: "positive iff endpoint > threshold".into(),
            positive_class: labels.class_names().positive.clone(),
            negative_class: labels.class_names().negative.clone(),
            positives: labels.n_positive(),
            negatives: labels.n_negative(),
        },
        results,
        rankings: sep
            .rankings
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect(),
        warnings,
    }
}
