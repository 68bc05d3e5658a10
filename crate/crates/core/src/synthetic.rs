//! Seeded synthetic datasets: stand-ins for real descriptor tables and
//! constructed geometries with known separability.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dataset::{DescriptorTable, CARCINOGENICITY_DESCRIPTORS};
use crate::matrix::{dot, Matrix};

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Random orthogonal d x d matrix (Gram-Schmidt on a Gaussian matrix).
pub fn random_rotation(d: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d);
    while basis.len() < d {
        let mut v: Vec<f64> = (0..d).map(|_| normal(rng)).collect();
        for b in &basis {
            let p = dot(&v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
        }
        let norm = dot(&v, &v).sqrt();
        if norm > 1e-8 {
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
        }
    }
    Matrix::from_rows(&basis)
}

/// Embeds low-dimensional points into `d` dimensions through a random
/// rotation, so the data is exactly as many-dimensional as `points.cols()`.
pub fn rotate_into(points: &Matrix, d: usize, rng: &mut ChaCha8Rng) -> Matrix {
    assert!(points.cols() <= d);
    let rot = random_rotation(d, rng);
    let padded = Matrix::from_fn(points.rows(), d, |i, j| {
        if j < points.cols() {
            points[(i, j)]
        } else {
            0.0
        }
    });
    padded.matmul(&rot)
}

/// `n` distinct points on a random line through `d`-space.
pub fn collinear_points(n: usize, d: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t: Vec<f64> = (0..n)
        .map(|i| i as f64 + rng.random_range(-0.3..0.3))
        .collect();
    t.iter_mut().for_each(|x| *x *= 0.5);
    let line = Matrix::from_vec(n, 1, t);
    let offset: Vec<f64> = (0..d).map(|_| normal(&mut rng)).collect();
    let mut x = rotate_into(&line, d, &mut rng);
    for i in 0..n {
        x.row_mut(i)
            .iter_mut()
            .zip(&offset)
            .for_each(|(a, b)| *a += b);
    }
    x
}

/// Points plus a class flag per point.
#[derive(Debug, Clone)]
pub struct LabeledPoints {
    pub points: Matrix,
    pub labels: Vec<bool>,
}

impl LabeledPoints {
    /// Wraps the points in a descriptor table whose endpoint is 1.0 for
    /// positives and 0.0 otherwise; label it at threshold 0.5.
    pub fn into_table(self) -> DescriptorTable {
        let n = self.points.rows();
        let d = self.points.cols();
        DescriptorTable::new(
            (1..=n).map(|i| format!("c{i:03}")).collect(),
            (1..=d).map(|j| format!("x{j}")).collect(),
            self.points,
            "class",
            self.labels
                .iter()
                .map(|&l| if l { 1.0 } else { 0.0 })
                .collect(),
        )
        .expect("synthetic table is valid")
    }
}

/// Two Gaussian classes separated along one axis of a dominant 2D plane,
/// rotated into `d` dimensions with small isotropic noise elsewhere.
pub fn linear_subspace_classes(n: usize, d: usize, seed: u64) -> LabeledPoints {
    assert!(d >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut plane = Matrix::zeros(n, d);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let pos = i % 2 == 0;
        let centre = if pos { 3.0 } else { -3.0 };
        plane[(i, 0)] = centre + 0.8 * normal(&mut rng);
        plane[(i, 1)] = 2.0 * normal(&mut rng);
        for j in 2..d {
            plane[(i, j)] = 0.2 * normal(&mut rng);
        }
        labels.push(pos);
    }
    let points = plane.matmul(&random_rotation(d, &mut rng));
    LabeledPoints { points, labels }
}

/// A disc of positives (radius < 1) inside a ring of negatives (radius 2
/// to 3) in a dominant plane, rotated into `d` dimensions with small noise.
/// Only a curved boundary separates the classes.
pub fn curved_classes(n: usize, d: usize, seed: u64) -> LabeledPoints {
    assert!(d >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut plane = Matrix::zeros(n, d);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let pos = i % 2 == 0;
        let angle = rng.random_range(0.0..std::f64::consts::TAU);
        let r = if pos {
            rng.random_range(0.0f64..1.0).sqrt()
        } else {
            rng.random_range(2.0..3.0)
        };
        plane[(i, 0)] = r * angle.cos();
        plane[(i, 1)] = r * angle.sin();
        for j in 2..d {
            plane[(i, j)] = 0.1 * normal(&mut rng);
        }
        labels.push(pos);
    }
    let points = plane.matmul(&random_rotation(d, &mut rng));
    LabeledPoints { points, labels }
}

/// Mean of the synthetic carcinogenicity endpoint.
pub const CARCINOGENICITY_MEAN: f64 = 29.0;

/// 55 compounds with the 23 reference descriptors and an activity score
/// symmetric about 29 (so thresholding at the mean splits 27 / 28).
///
/// Descriptors are driven by two latent factors, one of them correlated
/// with the endpoint, plus noise; count-like descriptors are rounded.
pub fn carcinogenicity_table(seed: u64) -> DescriptorTable {
    const N: usize = 55;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // 29 ± 0.5·j, j = 0..27, exact in binary
    let mut scores: Vec<f64> = (0..N)
        .map(|i| CARCINOGENICITY_MEAN + 0.5 * (i as f64 - 27.0))
        .collect();
    for i in (1..N).rev() {
        let j = rng.random_range(0..=i);
        scores.swap(i, j);
    }
    // (mean, spread, loading on activity factor, loading on size factor, integer)
    let columns: [(f64, f64, f64, f64, bool); 23] = [
        (250.0, 80.0, 0.5, 0.8, false), // Weight
        (1.5, 1.0, -0.3, 0.3, true),    // HDon
        (3.5, 1.5, 0.2, 0.5, true),     // HAcc
        (2.0, 1.2, 0.7, 0.1, false),    // XlogP
        (60.0, 25.0, -0.4, 0.5, false), // TPSA
        (25.0, 8.0, 0.4, 0.8, false),   // Polariz
        (3.0, 1.5, -0.2, 0.2, false),   // Dipole
        (-3.0, 1.2, -0.6, -0.3, false), // LogS
        (3.0, 2.0, 0.1, 0.6, true),     // NRotBond
        (0.3, 0.5, 0.3, 0.3, true),     // NVRO5
        (0.5, 0.6, 0.3, 0.4, true),     // NVERO5
        (30.0, 10.0, 0.4, 0.9, true),   // NAtoms
        (0.8, 1.0, 0.0, 0.4, true),     // NStereo
        (300.0, 120.0, 0.5, 0.7, false),
        (0.4, 0.15, 0.3, 0.2, false),
        (11.0, 3.0, 0.3, 0.8, false),
        (600.0, 300.0, 0.4, 0.8, false),
        (1500.0, 600.0, 0.4, 0.8, false),
        (1900.0, 700.0, 0.4, 0.8, false),
        (10.0, 2.5, 0.3, 0.8, false),
        (3.2, 0.8, 0.3, 0.8, false),
        (0.85, 0.08, -0.2, 0.1, false),
        (0.3, 0.1, -0.2, 0.1, false),
    ];
    let mut values = Matrix::zeros(N, 23);
    for i in 0..N {
        let activity = (scores[i] - CARCINOGENICITY_MEAN) / 8.0 + 0.3 * normal(&mut rng);
        let size = normal(&mut rng);
        for (j, &(mean, spread, a, s, integer)) in columns.iter().enumerate() {
            let raw = mean + spread * (a * activity + s * size + 0.4 * normal(&mut rng));
            values[(i, j)] = if integer {
                raw.round().max(0.0)
            } else {
                // three decimals, like descriptor software output
                (raw * 1000.0).round() / 1000.0
            };
        }
    }
    DescriptorTable::new(
        (1..=N).map(|i| format!("CPDB{i:03}")).collect(),
        CARCINOGENICITY_DESCRIPTORS
            .iter()
            .map(|s| s.to_string())
            .collect(),
        values,
        "ActivityScore",
        scores,
    )
    .expect("synthetic table is valid")
}

/// Names of the ten descriptors of the synthetic anti-HIV table.
pub const HEPT_DESCRIPTORS: [&str; 10] = [
    "logP",
    "MR",
    "Dipole",
    "HOMO",
    "LUMO",
    "SurfaceArea",
    "Volume",
    "Charge1",
    "Charge2",
    "Width",
];

/// 80 compounds with ten descriptors and a pIC50 endpoint in [3, 9];
/// some endpoints sit exactly on the activity threshold 6.
pub fn hept_table(seed: u64) -> DescriptorTable {
    const N: usize = 80;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Matrix::zeros(N, HEPT_DESCRIPTORS.len());
    let mut endpoint = Vec::with_capacity(N);
    let loadings: Vec<Vec<f64>> = (0..HEPT_DESCRIPTORS.len())
        .map(|_| (0..2).map(|_| normal(&mut rng)).collect())
        .collect();
    for i in 0..N {
        let f1 = normal(&mut rng);
        let f2 = normal(&mut rng);
        let pic50 = if i % 16 == 0 {
            6.0
        } else {
            ((6.0 + 1.2 * f1 + 0.3 * normal(&mut rng)).clamp(3.0, 9.0) * 100.0).round() / 100.0
        };
        endpoint.push(pic50);
        for (j, l) in loadings.iter().enumerate() {
            let raw = l[0] * f1 + l[1] * f2 + 0.3 * normal(&mut rng);
            values[(i, j)] = (raw * 1000.0).round() / 1000.0;
        }
    }
    DescriptorTable::new(
        (1..=N).map(|i| format!("HEPT{i:02}")).collect(),
        HEPT_DESCRIPTORS.iter().map(|s| s.to_string()).collect(),
        values,
        "pIC50",
        endpoint,
    )
    .expect("synthetic table is valid")
}

/// Writes a table as CSV: id column, descriptors, then the endpoint.
pub fn write_table_csv<W: std::io::Write>(table: &DescriptorTable, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["id".to_string()];
    header.extend(table.descriptor_names().iter().cloned());
    header.push(table.endpoint_name().to_string());
    w.write_record(&header)?;
    for (i, id) in table.compound_ids().iter().enumerate() {
        let mut rec = vec![id.clone()];
        rec.extend(table.values().row(i).iter().map(|v| v.to_string()));
        rec.push(table.endpoint()[i].to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
