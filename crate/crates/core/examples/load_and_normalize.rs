//! Reads a descriptor CSV, drops duplicate compounds, z-scores the
//! descriptors and labels compounds by an endpoint threshold.
//!
//! ```text
//! cargo run --example load_and_normalize -- fixtures/hept_10.csv pIC50 6
//! cargo run --example load_and_normalize -- fixtures/carcinogenicity_23.csv ActivityScore mean
//! ```

use qsarmap::pipeline::ThresholdSpec;
use qsarmap::{ClassNames, DescriptorTable};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let fixtures = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    let path = args
        .next()
        .unwrap_or_else(|| format!("{fixtures}/hept_10.csv"));
    let endpoint = args.next().unwrap_or_else(|| "pIC50".into());
    let threshold: ThresholdSpec = args.next().as_deref().unwrap_or("6").parse()?;

    let raw = DescriptorTable::load_csv(&path, &endpoint)?;
    let (table, dedup) = raw.deduplicate()?;
    for w in dedup.warnings() {
        println!("warning: {w}");
    }
    let table = table.normalize();
    let cut = match threshold {
        ThresholdSpec::Value(v) => v,
        ThresholdSpec::Mean => table.mean_threshold(),
    };
    let labels = table.label_with(cut, ClassNames::active_inactive());

    println!(
        "{} compounds ({} duplicates removed), {} descriptors",
        table.n_compounds(),
        dedup.removed_count(),
        table.n_descriptors()
    );
    println!(
        "{endpoint} > {cut}: {} active, {} inactive",
        labels.n_positive(),
        labels.n_negative()
    );
    println!("{:<14}{:>12}{:>12}", "descriptor", "mean", "sd");
    for (j, name) in table.descriptor_names().iter().enumerate() {
        let col = table.values().column(j);
        let n = col.len() as f64;
        let mean = col.iter().sum::<f64>() / n;
        let sd = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        println!("{name:<14}{mean:>12.2e}{sd:>12.6}");
    }
    Ok(())
}
