//! Sammon's mapping: a perfectly embeddable line, the unit square squeezed
//! onto a line, and the HEPT fixture in two dimensions.
//!
//! ```text
//! cargo run --example sammon_mapping
//! ```

use qsarmap::sammon::{embed, SammonConfig};
use qsarmap::synthetic::collinear_points;
use qsarmap::{DescriptorTable, Matrix};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = SammonConfig::default();

    let line = collinear_points(10, 5, 1);
    let (_, trace) = embed(&line, 1, &config)?;
    println!(
        "10 collinear points in 5D -> 1D: stress {:.2e} after {} iterations",
        trace.final_stress(),
        trace.iterations_used
    );

    let square = Matrix::from_rows(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
    let (emb, trace) = embed(&square, 1, &config)?;
    println!(
        "unit square -> 1D: stress {:.6}, positions {:?}",
        trace.final_stress(),
        emb.coords.as_slice()
    );

    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/hept_10.csv");
    let table = DescriptorTable::load_csv(path, "pIC50")?
        .deduplicate()?
        .0
        .normalize();
    let (_, trace) = embed(table.values(), 2, &config)?;
    println!(
        "HEPT fixture -> 2D: stress {:.4} -> {:.4} in {} iterations (converged: {})",
        trace.initial_stress(),
        trace.final_stress(),
        trace.iterations_used,
        trace.converged
    );
    let every = (trace.stress_per_iteration.len() / 8).max(1);
    for (i, s) in trace.stress_per_iteration.iter().enumerate().step_by(every) {
        println!("  iteration {i:4}: {s:.6}");
    }
    Ok(())
}
