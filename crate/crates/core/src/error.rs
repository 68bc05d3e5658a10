use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while reading or validating a descriptor table.
#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV at line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("header is empty")]
    EmptyHeader,
    #[error("header column {column} has an empty name")]
    EmptyHeaderName { column: usize },
    #[error("duplicate header name `{name}` (columns {first} and {second})")]
    DuplicateHeader {
        name: String,
        first: usize,
        second: usize,
    },
    #[error("endpoint column `{0}` not found in header")]
    MissingEndpoint(String),
    #[error("endpoint column `{0}` cannot be the compound id column")]
    EndpointIsId(String),
    #[error("no descriptor columns besides id and endpoint")]
    NoDescriptors,
    #[error("line {line}: expected {expected} fields, found {found}")]
    RowLength {
        line: u64,
        expected: usize,
        found: usize,
    },
    #[error("line {line}, column {column} (`{name}`): cannot parse `{value}` as a finite number")]
    NotNumeric {
        line: u64,
        column: usize,
        name: String,
        value: String,
    },
    #[error("line {line}, column {column} (`{name}`): missing value")]
    MissingValue {
        line: u64,
        column: usize,
        name: String,
    },
    #[error("line {line}: duplicate compound id `{id}` (first seen on line {first_line})")]
    DuplicateId {
        line: u64,
        id: String,
        first_line: u64,
    },
    #[error("line {line}: empty compound id")]
    EmptyId { line: u64 },
    #[error("table needs at least 2 compounds, found {0}")]
    TooFewRows(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// Linear-algebra failures.
#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric: |a[{row}][{col}] - a[{col}][{row}]| = {gap:e}")]
    NotSymmetric { row: usize, col: usize, gap: f64 },
    #[error(
        "Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})"
    )]
    NoConvergence { sweeps: usize, residual: f64 },
    #[error("matrix is not positive definite (pivot {index} = {pivot:e})")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("need at least 2 observations, found {0}")]
    TooFewObservations(usize),
    #[error("dimension mismatch: expected {expected} columns, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("requested {k} components but data has only {d} dimensions")]
    TooManyComponents { k: usize, d: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
}

/// Failures of the Sammon mapping.
#[derive(Debug, Error)]
pub enum SammonError {
    #[error("need at least 2 points, found {0}")]
    TooFewPoints(usize),
    #[error("all input points coincide; stress is undefined")]
    AllCoincident,
    #[error("output dimension must be at least 1")]
    ZeroDimension,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("initial configuration has {found} rows, expected {expected}")]
    InitShape { expected: usize, found: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Failures of the bottleneck autoencoder.
#[derive(Debug, Error)]
pub enum NlpcaError {
    #[error("bottleneck width {k} exceeds input dimension {d}")]
    BottleneckTooWide { k: usize, d: usize },
    #[error("invalid layer sizes {0:?}: expected [d, h, k, h, d] with k in {{1, 2}}")]
    Architecture(Vec<usize>),
    #[error("dimension mismatch: network expects {expected} inputs, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("need at least {min} samples, found {found}")]
    TooFewSamples { min: usize, found: usize },
    #[error("training diverged at epoch {epoch}: loss {loss}")]
    Diverged { epoch: usize, loss: f64 },
    #[error("parameter file line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Failures of the separability metrics.
#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("labeling is degenerate: {positives} positive and {negatives} negative samples")]
    SingleClass { positives: usize, negatives: usize },
    #[error("embedding has {found} points but labeling has {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("expected a {expected}-dimensional embedding, found {found}")]
    WrongDimension { expected: usize, found: usize },
    #[error("silhouette needs at least 3 points, found {0}")]
    TooFewPoints(usize),
    #[error("duplicate entry for method `{method}` at k = {k}")]
    DuplicateEntry { method: String, k: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
