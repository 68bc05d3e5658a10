//! Scores PCA, nonlinear PCA and Sammon maps of two constructed datasets:
//! one whose classes a straight line separates, one that needs a curved
//! boundary.
//!
//! ```text
//! cargo run --release --example separability
//! ```

use qsarmap::analysis::compare_methods;
use qsarmap::nlpca::{train, TrainConfig};
use qsarmap::pca::PcaModel;
use qsarmap::sammon::{embed, SammonConfig};
use qsarmap::synthetic::{curved_classes, linear_subspace_classes, LabeledPoints};
use qsarmap::{Embedding, EndpointLabeling};

fn score(name: &str, data: LabeledPoints) -> Result<(), Box<dyn std::error::Error>> {
    let labels = EndpointLabeling::from_flags(&data.labels);
    let x = &data.points;
    let mut embeddings: Vec<Embedding> = Vec::new();
    for k in [1, 2] {
        embeddings.push(PcaModel::fit(x, k)?.project(x)?);
        let (net, trace) = train(x, k, &TrainConfig::default())?;
        embeddings.push(net.encode_with_trace(x, &trace)?);
        embeddings.push(embed(x, k, &SammonConfig::default())?.0);
    }
    let entries: Vec<(&str, &Embedding)> =
        embeddings.iter().map(|e| (e.method.as_str(), e)).collect();
    let report = compare_methods(&entries, &labels)?;

    println!("{name} ({} points, {} dimensions)", x.rows(), x.cols());
    println!(
        "  {:<7}{:>2}{:>9}{:>11}{:>12}  verdict",
        "method", "k", "linear", "quadratic", "silhouette"
    );
    for b in &report.blocks {
        println!(
            "  {:<7}{:>2}{:>9.3}{:>11.3}{:>12.3}  {}",
            b.method,
            b.k,
            b.primary(),
            b.quadratic_accuracy,
            b.silhouette.unwrap_or(f64::NAN),
            b.verdict
        );
    }
    for (k, order) in &report.rankings {
        println!("  {k}D ranking: {}", order.join(" > "));
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    score(
        "classes split by a plane",
        linear_subspace_classes(60, 8, 1),
    )?;
    score("disc inside a ring", curved_classes(60, 8, 1))?;
    Ok(())
}
