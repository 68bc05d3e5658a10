//! Helpers shared by the integration test targets. Everything here is an
//! independent re-implementation used as an oracle, not a call into the
//! library's own numerics.

#![allow(dead_code)]

use qsarmap::nlpca::AutoencoderNetwork;
use qsarmap::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.random_range(-scale..scale))
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, d: usize) -> Matrix {
    let a = uniform_matrix(rng, d, d, 1.0);
    Matrix::from_fn(d, d, |i, j| a[(i, j)] + a[(j, i)])
}

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

/// Double-loop sample covariance, divisor N-1.
pub fn brute_covariance(x: &Matrix) -> Matrix {
    let (n, d) = x.shape();
    let mut mean = vec![0.0; d];
    for i in 0..n {
        for j in 0..d {
            mean[j] += x[(i, j)] / n as f64;
        }
    }
    Matrix::from_fn(d, d, |a, b| {
        (0..n)
            .map(|i| (x[(i, a)] - mean[a]) * (x[(i, b)] - mean[b]))
            .sum::<f64>()
            / (n - 1) as f64
    })
}

/// Sample variance (N-1) of the data projected on `u`.
pub fn variance_along(x: &Matrix, u: &[f64]) -> f64 {
    let p: Vec<f64> = (0..x.rows())
        .map(|i| (0..x.cols()).map(|j| x[(i, j)] * u[j]).sum())
        .collect();
    let m = p.iter().sum::<f64>() / p.len() as f64;
    p.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (p.len() - 1) as f64
}

pub fn brute_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Sammon stress written from the definition, with the same 1e-12 floor on
/// input distances.
pub fn brute_stress(x: &Matrix, y: &Matrix) -> f64 {
    let n = x.rows();
    let mut c = 0.0;
    let mut e = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let big = brute_distance(x.row(i), x.row(j)).max(1e-12);
            let small = brute_distance(y.row(i), y.row(j));
            c += big;
            e += (big - small) * (big - small) / big;
        }
    }
    e / c
}

/// Central-difference gradient of `f` at `p` with step `h`.
pub fn central_difference(p: &[f64], h: f64, mut f: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
    let mut q = p.to_vec();
    (0..p.len())
        .map(|i| {
            q[i] = p[i] + h;
            let up = f(&q);
            q[i] = p[i] - h;
            let down = f(&q);
            q[i] = p[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Worst relative error between analytic and numeric gradients.
///
/// Entries whose magnitude is below `floor` in both are compared by their
/// absolute difference divided by `floor`, so round-off in the finite
/// difference of a vanishing derivative does not register as a mismatch.
pub fn max_relative_error(analytic: &[f64], numeric: &[f64], floor: f64) -> f64 {
    analytic
        .iter()
        .zip(numeric)
        .map(|(a, n)| (a - n).abs() / a.abs().max(n.abs()).max(floor))
        .fold(0.0, f64::max)
}

/// Layer-by-layer forward pass of the sandglass network, coded from
/// scratch: tanh, identity, tanh, identity.
pub fn oracle_forward(net: &AutoencoderNetwork, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut a = x.to_vec();
    let mut bottleneck = Vec::new();
    for (idx, layer) in net.layers().iter().enumerate() {
        let w = &layer.weights;
        let mut z = vec![0.0; w.rows()];
        for r in 0..w.rows() {
            let mut s = layer.biases[r];
            for c in 0..w.cols() {
                s += w[(r, c)] * a[c];
            }
            z[r] = if idx % 2 == 0 { s.tanh() } else { s };
        }
        a = z;
        if idx == 1 {
            bottleneck = a.clone();
        }
    }
    (a, bottleneck)
}

/// Mean squared reconstruction error via [`oracle_forward`].
pub fn oracle_mse(net: &AutoencoderNetwork, data: &Matrix) -> f64 {
    let mut s = 0.0;
    for x in data.row_iter() {
        let (r, _) = oracle_forward(net, x);
        s += r.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
    }
    s / (data.rows() * data.cols()) as f64
}

/// Minimum of the 1D stress of the unit square: first coordinate fixed at
/// 0, a coarse grid over the other three, then repeated finer grids around
/// the incumbent.
pub fn unit_square_grid_oracle() -> (f64, [f64; 3]) {
    let corners = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
    let mut big = [[0.0; 4]; 4];
    let mut c = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            big[i][j] = brute_distance(&corners[i], &corners[j]);
            if i < j {
                c += big[i][j];
            }
        }
    }
    let stress = |y: [f64; 4]| {
        let mut e = 0.0;
        for i in 0..4 {
            for j in i + 1..4 {
                let d = (y[i] - y[j]).abs();
                e += (big[i][j] - d).powi(2) / big[i][j];
            }
        }
        e / c
    };
    let mut best = (f64::INFINITY, [0.0; 3]);
    let (lo, steps) = (-2.5, 100);
    let h = 5.0 / steps as f64;
    for a in 0..=steps {
        for b in 0..=steps {
            for cc in 0..=steps {
                let p = [lo + a as f64 * h, lo + b as f64 * h, lo + cc as f64 * h];
                let s = stress([0.0, p[0], p[1], p[2]]);
                if s < best.0 {
                    best = (s, p);
                }
            }
        }
    }
    let mut step = h;
    for _ in 0..12 {
        let centre = best.1;
        step /= 4.0;
        for a in -8..=8 {
            for b in -8..=8 {
                for cc in -8..=8 {
                    let p = [
                        centre[0] + a as f64 * step,
                        centre[1] + b as f64 * step,
                        centre[2] + cc as f64 * step,
                    ];
                    let s = stress([0.0, p[0], p[1], p[2]]);
                    if s < best.0 {
                        best = (s, p);
                    }
                }
            }
        }
    }
    best
}
