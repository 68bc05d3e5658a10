use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::matrix::Matrix;

/// The three mapping methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Pca,
    Nlpca,
    Sammon,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Pca, Method::Nlpca, Method::Sammon];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Pca => "pca",
            Method::Nlpca => "nlpca",
            Method::Sammon => "sammon",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            Method::Pca => "PCA",
            Method::Nlpca => "Nonlinear PCA",
            Method::Sammon => "Sammon mapping",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pca" => Ok(Method::Pca),
            "nlpca" => Ok(Method::Nlpca),
            "sammon" | "nlm" => Ok(Method::Sammon),
            other => Err(format!(
                "unknown method `{other}` (expected pca, nlpca or sammon)"
            )),
        }
    }
}

/// How an embedding was produced.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Provenance {
    Pca {
        explained_variance: Vec<f64>,
        total_variance: f64,
    },
    Sammon {
        initial_stress: f64,
        final_stress: f64,
        iterations: usize,
        converged: bool,
    },
    Nlpca {
        initial_mse: Option<f64>,
        final_mse: Option<f64>,
        min_mse: Option<f64>,
        epochs: usize,
    },
}

/// N x k low-dimensional coordinates, one row per compound.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub method: Method,
    pub coords: Matrix,
    pub provenance: Provenance,
}

impl Embedding {
    pub fn n_points(&self) -> usize {
        self.coords.rows()
    }

    pub fn dims(&self) -> usize {
        self.coords.cols()
    }
}
