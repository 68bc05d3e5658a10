//! Principal component analysis through the eigendecomposition of the
//! sample covariance matrix.

use crate::dataset::DescriptorTable;
use crate::eigen::eigendecompose_symmetric;
use crate::embedding::{Embedding, Method, Provenance};
use crate::error::LinalgError;
use crate::matrix::{dot, Matrix};

/// Sample covariance (divisor N-1) of the rows of `data`.
///
/// Only the upper triangle is accumulated; the lower one is mirrored, so the
/// result is exactly symmetric.
pub fn covariance(data: &Matrix) -> Result<Matrix, LinalgError> {
    let (n, d) = data.shape();
    if n < 2 {
        return Err(LinalgError::TooFewObservations(n));
    }
    let mean = data.column_means();
    let mut cov = Matrix::zeros(d, d);
    let mut centered = vec![0.0; d];
    for row in data.row_iter() {
        for ((c, &x), &m) in centered.iter_mut().zip(row).zip(&mean) {
            *c = x - m;
        }
        for i in 0..d {
            for j in i..d {
                cov[(i, j)] += centered[i] * centered[j];
            }
        }
    }
    let denom = (n - 1) as f64;
    for i in 0..d {
        for j in i..d {
            let v = cov[(i, j)] / denom;
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    Ok(cov)
}

/// A fitted k-component PCA.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// d x k, columns are orthonormal principal axes.
    pub components: Matrix,
    pub explained_variance: Vec<f64>,
    /// Trace of the covariance matrix.
    pub total_variance: f64,
}

impl PcaModel {
    pub fn fit(data: &Matrix, k: usize) -> Result<PcaModel, LinalgError> {
        let (n, d) = data.shape();
        if k > d || k == 0 {
            return Err(LinalgError::TooManyComponents { k, d });
        }
        if n < 2 {
            return Err(LinalgError::TooFewObservations(n));
        }
        data.check_finite()?;
        let cov = covariance(data)?;
        let total_variance = (0..d).map(|i| cov[(i, i)]).sum();
        let eig = eigendecompose_symmetric(&cov)?;
        let components = Matrix::from_fn(d, k, |i, j| eig.eigenvectors[(i, j)]);
        Ok(PcaModel {
            mean: data.column_means(),
            components,
            // round-off can leave a null eigenvalue slightly negative
            explained_variance: eig.eigenvalues[..k].iter().map(|&l| l.max(0.0)).collect(),
            total_variance,
        })
    }

    pub fn fit_table(table: &DescriptorTable, k: usize) -> Result<PcaModel, LinalgError> {
        Self::fit(table.values(), k)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn n_components(&self) -> usize {
        self.components.cols()
    }

    /// Fraction of the total variance carried by each retained component.
    pub fn explained_variance_ratio(&self) -> Vec<f64> {
        self.explained_variance
            .iter()
            .map(|&v| {
                if self.total_variance > 0.0 {
                    v / self.total_variance
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// Coordinates `componentsᵀ (x - mean)` for every row.
    pub fn transform(&self, data: &Matrix) -> Result<Matrix, LinalgError> {
        if data.cols() != self.dim() {
            return Err(LinalgError::DimensionMismatch {
                expected: self.dim(),
                found: data.cols(),
            });
        }
        let k = self.n_components();
        let axes: Vec<Vec<f64>> = (0..k).map(|j| self.components.column(j)).collect();
        let mut out = Matrix::zeros(data.rows(), k);
        let mut centered = vec![0.0; self.dim()];
        for (i, row) in data.row_iter().enumerate() {
            for ((c, &x), &m) in centered.iter_mut().zip(row).zip(&self.mean) {
                *c = x - m;
            }
            for (j, axis) in axes.iter().enumerate() {
                out[(i, j)] = dot(axis, &centered);
            }
        }
        Ok(out)
    }

    pub fn project(&self, data: &Matrix) -> Result<Embedding, LinalgError> {
        Ok(Embedding {
            method: Method::Pca,
            coords: self.transform(data)?,
            provenance: Provenance::Pca {
                explained_variance: self.explained_variance.clone(),
                total_variance: self.total_variance,
            },
        })
    }

    /// Maps low-dimensional coordinates back into descriptor space.
    pub fn reconstruct(&self, coords: &Matrix) -> Result<Matrix, LinalgError> {
        if coords.cols() != self.n_components() {
            return Err(LinalgError::DimensionMismatch {
                expected: self.n_components(),
                found: coords.cols(),
            });
        }
        let mut out = coords.matmul(&self.components.transpose());
        for i in 0..out.rows() {
            for (x, &m) in out.row_mut(i).iter_mut().zip(&self.mean) {
                *x += m;
            }
        }
        Ok(out)
    }

    /// Mean squared reconstruction error over all entries of `data`.
    pub fn reconstruction_mse(&self, data: &Matrix) -> Result<f64, LinalgError> {
        let rec = self.reconstruct(&self.transform(data)?)?;
        let se: f64 = rec
            .as_slice()
            .iter()
            .zip(data.as_slice())
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        Ok(se / data.as_slice().len() as f64)
    }
}
