//! Preprocessing and low-dimensional mapping of QSAR descriptor tables.
//!
//! The pipeline reads a compound × descriptor table, removes duplicate
//! compounds, z-scores the descriptors, labels compounds by a strict
//! endpoint threshold, maps them to one or two dimensions with
//! [PCA](pca), [nonlinear PCA](nlpca) (a bottleneck autoencoder) or
//! [Sammon's mapping](sammon), and scores how well each map separates the
//! two classes ([`analysis`]).
//!
//! [`pipeline::run`] ties the stages together and writes SVG scatter plots,
//! embedding CSVs and a JSON report.

pub mod analysis;
pub mod dataset;
pub mod eigen;
pub mod embedding;
pub mod error;
pub mod export;
pub mod matrix;
pub mod nlpca;
pub mod pca;
pub mod pipeline;
pub mod plot;
pub mod report;
pub mod sammon;
pub mod synthetic;

pub use dataset::{ClassNames, DescriptorTable, EndpointLabeling};
pub use embedding::{Embedding, Method};
pub use matrix::Matrix;
