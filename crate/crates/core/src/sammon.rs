//! Sammon's nonlinear mapping.
//!
//! Low-dimensional coordinates `Y` are fitted so that their interpoint
//! distances `d_ij` approximate the input-space distances `D_ij`, by
//! minimising the stress
//!
//! ```text
//! E = (1 / c) · Σ_{i<j} (D_ij − d_ij)² / D_ij,    c = Σ_{i<j} D_ij
//! ```
//!
//! with Sammon's diagonal pseudo-Newton update
//! `Δy_pl = −mf · (∂E/∂y_pl) / |∂²E/∂y_pl²|`, guarded by step halving so the
//! stress never increases.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::embedding::{Embedding, Method, Provenance};
use crate::error::SammonError;
use crate::matrix::{euclidean, Matrix};
use crate::pca::PcaModel;

/// Floor for input distances between coincident points.
pub const DISTANCE_FLOOR: f64 = 1e-12;
/// Floor for `|∂²E/∂y²|` in the pseudo-Newton denominator.
pub const CURVATURE_FLOOR: f64 = 1e-12;
/// Maximum number of step halvings per iteration.
pub const MAX_HALVINGS: usize = 20;
/// Weight of the next principal components mixed into a PCA start whose
/// projection has ties.
pub const PCA_TILT: f64 = 0.1;

/// Symmetric matrix of input-space Euclidean distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
    clamped: Vec<(usize, usize)>,
}

impl DistanceMatrix {
    /// Euclidean distances between the rows of `data`. Off-diagonal zeros
    /// (coincident points) are raised to [`DISTANCE_FLOOR`] and recorded.
    pub fn from_points(data: &Matrix) -> DistanceMatrix {
        let n = data.rows();
        let mut entries = vec![0.0; n * n];
        let mut clamped = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let mut d = euclidean(data.row(i), data.row(j));
                if d < DISTANCE_FLOOR {
                    d = DISTANCE_FLOOR;
                    clamped.push((i, j));
                }
                entries[i * n + j] = d;
                entries[j * n + i] = d;
            }
        }
        DistanceMatrix {
            n,
            entries,
            clamped,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    /// Pairs `(i, j)`, `i < j`, whose distance was clamped.
    pub fn clamped_pairs(&self) -> &[(usize, usize)] {
        &self.clamped
    }

    pub fn warnings(&self) -> Vec<String> {
        self.clamped
            .iter()
            .map(|(i, j)| {
                format!("points {i} and {j} coincide; distance clamped to {DISTANCE_FLOOR:e}")
            })
            .collect()
    }

    /// `c = Σ_{i<j} D_ij`.
    pub fn normalizer(&self) -> f64 {
        let mut c = 0.0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                c += self.get(i, j);
            }
        }
        c
    }
}

/// Convenience alias for [`DistanceMatrix::from_points`].
pub fn pairwise_distances(data: &Matrix) -> DistanceMatrix {
    DistanceMatrix::from_points(data)
}

/// Sammon stress of the configuration `y` against input distances `dist`.
pub fn stress(dist: &DistanceMatrix, y: &Matrix) -> f64 {
    assert_eq!(dist.len(), y.rows(), "stress: row count mismatch");
    let n = dist.len();
    let mut c = 0.0;
    let mut e = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let big = dist.get(i, j);
            let small = euclidean(y.row(i), y.row(j));
            c += big;
            e += (big - small) * (big - small) / big;
        }
    }
    e / c
}

/// Analytic gradient `∂E/∂Y` and the diagonal second derivatives
/// `∂²E/∂y_pl²`, both N x k.
pub fn stress_derivatives(dist: &DistanceMatrix, y: &Matrix) -> (Matrix, Matrix) {
    let (n, k) = y.shape();
    assert_eq!(dist.len(), n, "stress_derivatives: row count mismatch");
    let scale = -2.0 / dist.normalizer();
    let mut grad = Matrix::zeros(n, k);
    let mut hess = Matrix::zeros(n, k);
    for p in 0..n {
        for j in 0..n {
            if j == p {
                continue;
            }
            let big = dist.get(p, j);
            let small = euclidean(y.row(p), y.row(j)).max(DISTANCE_FLOOR);
            let gap = big - small;
            let inv = 1.0 / (big * small);
            for l in 0..k {
                let diff = y[(p, l)] - y[(j, l)];
                grad[(p, l)] += gap * inv * diff;
                hess[(p, l)] += inv * (gap - diff * diff / small * (1.0 + gap / small));
            }
        }
    }
    for (g, h) in grad.as_mut_slice().iter_mut().zip(hess.as_mut_slice()) {
        *g *= scale;
        *h *= scale;
    }
    (grad, hess)
}

/// Starting configuration for the optimiser.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SammonInit {
    /// Projection onto the leading principal axes. If distinct inputs
    /// project to the same point, the axes are tilted towards the next
    /// components ([`PCA_TILT`]); any ties left get a small seeded offset,
    /// since ties are saddle points the update cannot leave.
    Pca,
    /// Seeded standard-normal coordinates scaled to the input distances.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SammonConfig {
    /// The "magic factor" in (0, 1].
    pub step_factor: f64,
    pub max_iterations: usize,
    pub relative_tolerance: f64,
    pub init: SammonInit,
    pub seed: u64,
}

impl Default for SammonConfig {
    fn default() -> Self {
        SammonConfig {
            step_factor: 0.35,
            max_iterations: 500,
            relative_tolerance: 1e-9,
            init: SammonInit::Pca,
            seed: 0,
        }
    }
}

impl SammonConfig {
    pub fn validate(&self) -> Result<(), SammonError> {
        if !(self.step_factor > 0.0 && self.step_factor <= 1.0) {
            return Err(SammonError::Config(format!(
                "step_factor must lie in (0, 1], got {}",
                self.step_factor
            )));
        }
        if self.max_iterations == 0 {
            return Err(SammonError::Config(
                "max_iterations must be positive".into(),
            ));
        }
        if self.relative_tolerance.is_nan() || self.relative_tolerance <= 0.0 {
            return Err(SammonError::Config(format!(
                "relative_tolerance must be positive, got {}",
                self.relative_tolerance
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SammonTrace {
    /// Stress of the initial configuration followed by the stress after
    /// every iteration. Non-increasing.
    pub stress_per_iteration: Vec<f64>,
    pub converged: bool,
    pub iterations_used: usize,
    /// Input pairs whose zero distance was clamped.
    pub clamped_pairs: usize,
}

impl SammonTrace {
    pub fn initial_stress(&self) -> f64 {
        self.stress_per_iteration[0]
    }

    pub fn final_stress(&self) -> f64 {
        *self
            .stress_per_iteration
            .last()
            .expect("trace holds the initial stress")
    }
}

/// Runs Sammon's mapping of the rows of `data` into `k` dimensions.
pub fn embed(
    data: &Matrix,
    k: usize,
    config: &SammonConfig,
) -> Result<(Embedding, SammonTrace), SammonError> {
    config.validate()?;
    let n = data.rows();
    if n < 2 {
        return Err(SammonError::TooFewPoints(n));
    }
    if k == 0 {
        return Err(SammonError::ZeroDimension);
    }
    data.check_finite()?;
    let dist = DistanceMatrix::from_points(data);
    if dist.clamped_pairs().len() == n * (n - 1) / 2 {
        return Err(SammonError::AllCoincident);
    }
    let init = initial_configuration(data, &dist, k, config)?;
    let (coords, trace) = minimize(&dist, init, config)?;
    let embedding = Embedding {
        method: Method::Sammon,
        coords,
        provenance: Provenance::Sammon {
            initial_stress: trace.initial_stress(),
            final_stress: trace.final_stress(),
            iterations: trace.iterations_used,
            converged: trace.converged,
        },
    };
    Ok((embedding, trace))
}

/// Minimises stress from a given starting configuration.
pub fn minimize(
    dist: &DistanceMatrix,
    mut y: Matrix,
    config: &SammonConfig,
) -> Result<(Matrix, SammonTrace), SammonError> {
    config.validate()?;
    if y.rows() != dist.len() {
        return Err(SammonError::InitShape {
            expected: dist.len(),
            found: y.rows(),
        });
    }
    let mut e = stress(dist, &y);
    let mut trace = SammonTrace {
        stress_per_iteration: vec![e],
        converged: false,
        iterations_used: 0,
        clamped_pairs: dist.clamped_pairs().len(),
    };
    let mut candidate = y.clone();
    while trace.iterations_used < config.max_iterations {
        if e == 0.0 {
            trace.converged = true;
            break;
        }
        let (grad, hess) = stress_derivatives(dist, &y);
        let mut step: Vec<f64> = grad
            .as_slice()
            .iter()
            .zip(hess.as_slice())
            .map(|(g, h)| -config.step_factor * g / h.abs().max(CURVATURE_FLOOR))
            .collect();

        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            for ((c, &y0), &s) in candidate
                .as_mut_slice()
                .iter_mut()
                .zip(y.as_slice())
                .zip(&step)
            {
                *c = y0 + s;
            }
            let e_new = stress(dist, &candidate);
            if e_new <= e {
                accepted = Some(e_new);
                break;
            }
            step.iter_mut().for_each(|s| *s *= 0.5);
        }
        let Some(e_new) = accepted else {
            // no descent along the pseudo-Newton direction: numerically stationary
            trace.converged = true;
            break;
        };
        std::mem::swap(&mut y, &mut candidate);
        trace.iterations_used += 1;
        trace.stress_per_iteration.push(e_new);
        let relative_change = (e - e_new) / e;
        e = e_new;
        if relative_change < config.relative_tolerance {
            trace.converged = true;
            break;
        }
    }
    Ok((y, trace))
}

fn initial_configuration(
    data: &Matrix,
    dist: &DistanceMatrix,
    k: usize,
    config: &SammonConfig,
) -> Result<Matrix, SammonError> {
    let n = data.rows();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    match config.init {
        SammonInit::Random => {
            let mean_distance = dist.normalizer() / (n * (n - 1) / 2) as f64;
            let sigma = mean_distance / (2.0 * k as f64).sqrt();
            Ok(Matrix::from_fn(n, k, |_, _| {
                let z: f64 = StandardNormal.sample(&mut rng);
                sigma * z
            }))
        }
        SammonInit::Pca => {
            let d = data.cols();
            let kk = k.min(d);
            let spare = (d - kk).min(kk);
            let projected = PcaModel::fit(data, kk + spare)?.transform(data)?;
            let mut y = Matrix::from_fn(n, k, |i, j| if j < kk { projected[(i, j)] } else { 0.0 });
            if spare > 0 && has_ties(&y, dist) {
                // Degenerate leading variances leave the axis arbitrary; tilt
                // it towards the next components rather than keep the ties.
                for i in 0..n {
                    for l in 0..spare {
                        y[(i, l)] += PCA_TILT * projected[(i, kk + l)];
                    }
                }
            }
            separate_coincident(&mut y, dist, &mut rng);
            Ok(y)
        }
    }
}

fn tie_tolerance(y: &Matrix, dist: &DistanceMatrix) -> f64 {
    let n = y.rows();
    let spread = (y.as_slice().iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
    let scale = if spread > 0.0 {
        spread
    } else {
        dist.normalizer() / (n * (n - 1) / 2) as f64
    };
    1e-9 * scale
}

fn has_ties(y: &Matrix, dist: &DistanceMatrix) -> bool {
    let tie = tie_tolerance(y, dist);
    (1..y.rows()).any(|j| {
        (0..j).any(|i| dist.get(i, j) > DISTANCE_FLOOR && euclidean(y.row(i), y.row(j)) <= tie)
    })
}

/// Offsets points that share an output position with an earlier point
/// although their inputs differ.
fn separate_coincident(y: &mut Matrix, dist: &DistanceMatrix, rng: &mut ChaCha8Rng) {
    let (n, k) = y.shape();
    let tie = tie_tolerance(y, dist);
    let offset = 1e7 * tie;
    for j in 1..n {
        let tied =
            (0..j).any(|i| dist.get(i, j) > DISTANCE_FLOOR && euclidean(y.row(i), y.row(j)) <= tie);
        if tied {
            for l in 0..k {
                let z: f64 = StandardNormal.sample(rng);
                y[(j, l)] += offset * z;
            }
        }
    }
}
