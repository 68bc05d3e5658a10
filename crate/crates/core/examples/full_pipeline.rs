//! The whole pipeline as a library call: writes SVG plots, embedding CSVs
//! and `report.json` for the carcinogenicity fixture, labeled at the mean
//! activity score.
//!
//! ```text
//! cargo run --release --example full_pipeline [OUT_DIR]
//! ```

use qsarmap::pipeline::{run, RunConfig, ThresholdSpec};
use qsarmap::ClassNames;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).unwrap_or_else(|| {
        std::env::temp_dir()
            .join("qsarmap-carcinogenicity")
            .display()
            .to_string()
    });
    let input = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/fixtures/carcinogenicity_23.csv"
    );
    let mut config = RunConfig::new(input, "ActivityScore", ThresholdSpec::Mean, &out);
    config.class_names = ClassNames::toxic_nontoxic();
    config.seed = 42;

    let result = run(&config)?;
    let r = &result.report;
    println!(
        "threshold {} ({}): {} {}, {} {}",
        r.labeling.threshold,
        r.labeling.threshold_source,
        r.labeling.positives,
        r.labeling.positive_class,
        r.labeling.negatives,
        r.labeling.negative_class
    );
    for b in &r.results {
        println!("{:<7}{}D  {}  -> {}", b.method, b.k, b.verdict, b.files.svg);
    }
    for (k, order) in &r.rankings {
        println!("{k}D ranking: {}", order.join(" > "));
    }
    println!("{} files in {out}", result.files.len());
    Ok(())
}
