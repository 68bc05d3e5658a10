//! Class-separability metrics for low-dimensional embeddings.
//!
//! Three complementary readings of how well an embedding splits the two
//! endpoint classes:
//!
//! * the best single threshold along a 1D embedding,
//! * the best linear boundary in 2D and a quadratic boundary obtained by
//!   lifting to degree-2 monomials and applying Fisher's discriminant,
//! * the silhouette of the class partition.
//!
//! All accuracies are training accuracies. Every sweep includes the two
//! infinite cuts, so no accuracy falls below the majority-class proportion.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::dataset::EndpointLabeling;
use crate::embedding::Embedding;
use crate::error::AnalysisError;
use crate::matrix::{cholesky_solve, dot, euclidean, Matrix};

/// Ridge added to the within-class scatter before solving for the Fisher
/// direction.
pub const FISHER_REGULARIZATION: f64 = 1e-9;
/// A linear boundary is judged adequate when its accuracy is at least the
/// quadratic accuracy minus this margin.
pub const LINEAR_ADEQUATE_MARGIN: f64 = 0.02;

/// Largest embedding for which [`linear_accuracy_2d`] searches boundaries
/// through point pairs.
pub const PAIR_SEARCH_MAX_POINTS: usize = 200;
/// Relative angular tilt used to split points that tie along a candidate
/// direction in the 2D boundary search.
const TIE_TILT: f64 = 1e-6;

/// Which side of the cut is predicted positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    /// `x > cut` predicts the positive class.
    Above,
    /// `x < cut` predicts the positive class.
    Below,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdFit {
    pub accuracy: f64,
    /// Midpoint between neighbouring sorted coordinates, or ±∞.
    #[serde(serialize_with = "serialize_extended_real")]
    pub cut: f64,
    pub polarity: Polarity,
}

impl ThresholdFit {
    pub fn predict(&self, x: f64) -> bool {
        match self.polarity {
            Polarity::Above => x > self.cut,
            Polarity::Below => x <= self.cut,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearFit {
    pub accuracy: f64,
    /// Unit normal of the boundary.
    pub direction: Vec<f64>,
    #[serde(serialize_with = "serialize_extended_real")]
    pub cut: f64,
    pub polarity: Polarity,
}

fn serialize_extended_real<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else if *x > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

fn check_labels(labels: &EndpointLabeling, n: usize) -> Result<(), AnalysisError> {
    if labels.len() != n {
        return Err(AnalysisError::LengthMismatch {
            expected: labels.len(),
            found: n,
        });
    }
    if !labels.has_both_classes() {
        return Err(AnalysisError::SingleClass {
            positives: labels.n_positive(),
            negatives: labels.n_negative(),
        });
    }
    Ok(())
}

fn check_dims(coords: &Matrix, k: usize) -> Result<(), AnalysisError> {
    if coords.cols() != k {
        return Err(AnalysisError::WrongDimension {
            expected: k,
            found: coords.cols(),
        });
    }
    Ok(())
}

/// Exhaustive threshold sweep over sorted `values`: the N+1 cut positions
/// (−∞, midpoints between distinct neighbours, +∞) times both polarities.
/// Ties go to the smallest cut, then to [`Polarity::Above`].
pub fn best_threshold(values: &[f64], labels: &[bool]) -> ThresholdFit {
    assert_eq!(values.len(), labels.len());
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let total_pos = labels.iter().filter(|&&l| l).count();

    // (correct count, cut, polarity); only strict improvements replace it
    let mut best: Option<(usize, f64, Polarity)> = None;
    let mut consider = |cut: f64, pos_below: usize, neg_below: usize| {
        let above = neg_below + (total_pos - pos_below);
        let below = pos_below + (n - total_pos - neg_below);
        for (correct, polarity) in [(above, Polarity::Above), (below, Polarity::Below)] {
            if best.is_none_or(|b| correct > b.0) {
                best = Some((correct, cut, polarity));
            }
        }
    };
    consider(f64::NEG_INFINITY, 0, 0);
    let mut pos_below = 0usize;
    let mut neg_below = 0usize;
    for w in 0..n {
        let i = order[w];
        if labels[i] {
            pos_below += 1;
        } else {
            neg_below += 1;
        }
        let cut = if w + 1 < n {
            let (lo, hi) = (values[i], values[order[w + 1]]);
            if lo == hi {
                continue;
            }
            lo + (hi - lo) / 2.0
        } else {
            f64::INFINITY
        };
        consider(cut, pos_below, neg_below);
    }
    let best = best.expect("the -inf cut is always considered");
    ThresholdFit {
        accuracy: best.0 as f64 / n as f64,
        cut: best.1,
        polarity: best.2,
    }
}

/// Best single-threshold accuracy of a 1D embedding.
pub fn threshold_accuracy_1d(
    coords: &Matrix,
    labels: &EndpointLabeling,
) -> Result<ThresholdFit, AnalysisError> {
    check_dims(coords, 1)?;
    check_labels(labels, coords.rows())?;
    Ok(best_threshold(coords.as_slice(), labels.labels()))
}

/// Fisher discriminant direction `S_w⁻¹ (μ₊ − μ₋)` (unnormalised).
pub fn fisher_direction(x: &Matrix, labels: &[bool]) -> Result<Vec<f64>, AnalysisError> {
    let p = x.cols();
    let mut mean_pos = vec![0.0; p];
    let mut mean_neg = vec![0.0; p];
    let (mut n_pos, mut n_neg) = (0usize, 0usize);
    for (row, &l) in x.row_iter().zip(labels) {
        let (m, c) = if l {
            (&mut mean_pos, &mut n_pos)
        } else {
            (&mut mean_neg, &mut n_neg)
        };
        for (mi, xi) in m.iter_mut().zip(row) {
            *mi += xi;
        }
        *c += 1;
    }
    if n_pos == 0 || n_neg == 0 {
        return Err(AnalysisError::SingleClass {
            positives: n_pos,
            negatives: n_neg,
        });
    }
    mean_pos.iter_mut().for_each(|m| *m /= n_pos as f64);
    mean_neg.iter_mut().for_each(|m| *m /= n_neg as f64);

    let mut scatter = Matrix::zeros(p, p);
    let mut c = vec![0.0; p];
    for (row, &positive) in x.row_iter().zip(labels) {
        let m = if positive { &mean_pos } else { &mean_neg };
        for ((ci, xi), mi) in c.iter_mut().zip(row).zip(m) {
            *ci = xi - mi;
        }
        for a in 0..p {
            for b in a..p {
                scatter[(a, b)] += c[a] * c[b];
            }
        }
    }
    for a in 0..p {
        for b in 0..a {
            scatter[(a, b)] = scatter[(b, a)];
        }
    }
    let diff: Vec<f64> = mean_pos.iter().zip(&mean_neg).map(|(a, b)| a - b).collect();
    let trace: f64 = (0..p).map(|a| scatter[(a, a)]).sum();
    let mut ridge = FISHER_REGULARIZATION;
    loop {
        let mut reg = scatter.clone();
        for a in 0..p {
            reg[(a, a)] += ridge;
        }
        match cholesky_solve(&reg, &diff) {
            Ok(w) => return Ok(w),
            // the fixed ridge can vanish in round-off next to a large scatter
            Err(_) if ridge < trace.max(1.0) => ridge = (ridge * 10.0).max(1e-15 * trace),
            Err(e) => return Err(e.into()),
        }
    }
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let norm = dot(&v, &v).sqrt();
    if norm > 0.0 && norm.is_finite() {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    v
}

fn project(x: &Matrix, w: &[f64]) -> Vec<f64> {
    x.row_iter().map(|r| dot(r, w)).collect()
}

/// Threshold sweep along the Fisher direction of `x`.
pub fn fisher_accuracy(x: &Matrix, labels: &[bool]) -> Result<LinearFit, AnalysisError> {
    let w = normalized(fisher_direction(x, labels)?);
    let fit = best_threshold(&project(x, &w), labels);
    Ok(LinearFit {
        accuracy: fit.accuracy,
        direction: w,
        cut: fit.cut,
        polarity: fit.polarity,
    })
}

/// Best linear boundary for a 2D embedding.
///
/// Starts from the Fisher discriminant and then searches every direction
/// normal to a line through two points, tilted slightly both ways so the
/// pair can fall on either side. A boundary achieving the optimal training
/// accuracy can always be moved onto two points, so this search covers the
/// optimum; Fisher alone cannot, e.g. when both class means coincide.
///
/// The pair search costs O(N³ log N) and runs only for N up to
/// [`PAIR_SEARCH_MAX_POINTS`]; larger embeddings get the Fisher result.
pub fn linear_accuracy_2d(
    coords: &Matrix,
    labels: &EndpointLabeling,
) -> Result<LinearFit, AnalysisError> {
    check_dims(coords, 2)?;
    check_labels(labels, coords.rows())?;
    let flags = labels.labels();
    let mut best = fisher_accuracy(coords, flags)?;
    let n = coords.rows();
    if n > PAIR_SEARCH_MAX_POINTS || best.accuracy == 1.0 {
        return Ok(best);
    }
    let mut values = vec![0.0; n];
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (coords.row(i), coords.row(j));
            let (ux, uy) = (b[0] - a[0], b[1] - a[1]);
            let len = ux.hypot(uy);
            if len == 0.0 {
                continue;
            }
            let (ux, uy) = (ux / len, uy / len);
            for tilt in [TIE_TILT, -TIE_TILT] {
                let w = normalized(vec![-uy + tilt * ux, ux + tilt * uy]);
                for (v, r) in values.iter_mut().zip(coords.row_iter()) {
                    *v = dot(r, &w);
                }
                let fit = best_threshold(&values, flags);
                if fit.accuracy > best.accuracy {
                    best = LinearFit {
                        accuracy: fit.accuracy,
                        direction: w,
                        cut: fit.cut,
                        polarity: fit.polarity,
                    };
                }
            }
        }
    }
    Ok(best)
}

/// All monomials of degree one and two: `(x, y, x², y², xy)` for 2D input
/// and `(x, x²)` for 1D input.
pub fn quadratic_lift(coords: &Matrix) -> Matrix {
    let (n, k) = coords.shape();
    let mut out = Vec::new();
    let mut width = 0;
    for r in coords.row_iter() {
        let start = out.len();
        out.extend_from_slice(r);
        out.extend(r.iter().map(|x| x * x));
        for a in 0..k {
            for b in a + 1..k {
                out.push(r[a] * r[b]);
            }
        }
        width = out.len() - start;
    }
    Matrix::from_vec(n, width, out)
}

/// Accuracy of Fisher's discriminant on the degree-2 monomial lift of a 1D
/// or 2D embedding.
pub fn quadratic_accuracy(
    coords: &Matrix,
    labels: &EndpointLabeling,
) -> Result<f64, AnalysisError> {
    if !(1..=2).contains(&coords.cols()) {
        return Err(AnalysisError::WrongDimension {
            expected: 2,
            found: coords.cols(),
        });
    }
    check_labels(labels, coords.rows())?;
    Ok(fisher_accuracy(&quadratic_lift(coords), labels.labels())?.accuracy)
}

pub fn quadratic_accuracy_2d(
    coords: &Matrix,
    labels: &EndpointLabeling,
) -> Result<f64, AnalysisError> {
    check_dims(coords, 2)?;
    quadratic_accuracy(coords, labels)
}

/// Mean silhouette of the class partition under Euclidean distance.
/// A point alone in its class scores 0.
pub fn silhouette(coords: &Matrix, labels: &EndpointLabeling) -> Result<f64, AnalysisError> {
    let n = coords.rows();
    check_labels(labels, n)?;
    if n < 3 {
        return Err(AnalysisError::TooFewPoints(n));
    }
    let flags = labels.labels();
    let n_pos = labels.n_positive();
    let mut total = 0.0;
    for i in 0..n {
        let (mut same, mut other) = (0.0, 0.0);
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = euclidean(coords.row(i), coords.row(j));
            if flags[i] == flags[j] {
                same += d;
            } else {
                other += d;
            }
        }
        let own = if flags[i] { n_pos } else { n - n_pos };
        if own == 1 {
            continue;
        }
        let a = same / (own - 1) as f64;
        let b = other / (n - own) as f64;
        let m = a.max(b);
        if m > 0.0 {
            total += (b - a) / m;
        }
    }
    Ok(total / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    LinearAdequate,
    NonlinearBoundary,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::LinearAdequate => "linear adequate",
            Verdict::NonlinearBoundary => "nonlinear boundary indicated",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// Metrics of one `(method, k)` embedding.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricBlock {
    pub method: String,
    pub k: usize,
    /// Present for k = 1.
    pub threshold_accuracy_1d: Option<ThresholdFit>,
    /// Present for k = 2.
    pub linear_accuracy: Option<LinearFit>,
    pub quadratic_accuracy: f64,
    /// Absent when there are fewer than 3 points.
    pub silhouette: Option<f64>,
    pub verdict: Verdict,
}

impl MetricBlock {
    /// Threshold accuracy for k = 1, linear accuracy for k = 2.
    pub fn primary(&self) -> f64 {
        match (&self.threshold_accuracy_1d, &self.linear_accuracy) {
            (Some(t), _) => t.accuracy,
            (None, Some(l)) => l.accuracy,
            (None, None) => unreachable!("every block carries a primary metric"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparabilityReport {
    /// Sorted by `(k, method)`.
    pub blocks: Vec<MetricBlock>,
    /// Method names per output dimension, best first.
    pub rankings: BTreeMap<usize, Vec<String>>,
}

impl SeparabilityReport {
    pub fn block(&self, method: &str, k: usize) -> Option<&MetricBlock> {
        self.blocks.iter().find(|b| b.method == method && b.k == k)
    }
}

/// Metrics of a single embedding.
pub fn evaluate(
    method: &str,
    coords: &Matrix,
    labels: &EndpointLabeling,
) -> Result<MetricBlock, AnalysisError> {
    let k = coords.cols();
    check_labels(labels, coords.rows())?;
    let (threshold, linear, linear_acc) = match k {
        1 => {
            let t = threshold_accuracy_1d(coords, labels)?;
            (Some(t), None, t.accuracy)
        }
        2 => {
            let l = linear_accuracy_2d(coords, labels)?;
            let acc = l.accuracy;
            (None, Some(l), acc)
        }
        _ => {
            return Err(AnalysisError::WrongDimension {
                expected: 2,
                found: k,
            })
        }
    };
    let quadratic = quadratic_accuracy(coords, labels)?;
    let silhouette = if coords.rows() >= 3 {
        Some(silhouette(coords, labels)?)
    } else {
        None
    };
    let verdict = if linear_acc >= quadratic - LINEAR_ADEQUATE_MARGIN {
        Verdict::LinearAdequate
    } else {
        Verdict::NonlinearBoundary
    };
    Ok(MetricBlock {
        method: method.to_string(),
        k,
        threshold_accuracy_1d: threshold,
        linear_accuracy: linear,
        quadratic_accuracy: quadratic,
        silhouette,
        verdict,
    })
}

/// Scores named embeddings and ranks them per output dimension: by the
/// primary accuracy, then silhouette, then name.
pub fn compare_methods(
    entries: &[(&str, &Embedding)],
    labels: &EndpointLabeling,
) -> Result<SeparabilityReport, AnalysisError> {
    let mut blocks = Vec::with_capacity(entries.len());
    for (name, emb) in entries {
        if blocks
            .iter()
            .any(|b: &MetricBlock| b.method == *name && b.k == emb.dims())
        {
            return Err(AnalysisError::DuplicateEntry {
                method: name.to_string(),
                k: emb.dims(),
            });
        }
        blocks.push(evaluate(name, &emb.coords, labels)?);
    }
    blocks.sort_by(|a, b| a.k.cmp(&b.k).then_with(|| a.method.cmp(&b.method)));

    let mut rankings: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for k in blocks
        .iter()
        .map(|b| b.k)
        .collect::<std::collections::BTreeSet<_>>()
    {
        let mut group: Vec<&MetricBlock> = blocks.iter().filter(|b| b.k == k).collect();
        group.sort_by(|a, b| rank_order(a, b));
        rankings.insert(k, group.iter().map(|b| b.method.clone()).collect());
    }
    Ok(SeparabilityReport { blocks, rankings })
}

fn rank_order(a: &MetricBlock, b: &MetricBlock) -> Ordering {
    b.primary()
        .total_cmp(&a.primary())
        .then_with(|| {
            let sa = a.silhouette.unwrap_or(f64::NEG_INFINITY);
            let sb = b.silhouette.unwrap_or(f64::NEG_INFINITY);
            sb.total_cmp(&sa)
        })
        .then_with(|| a.method.cmp(&b.method))
}
