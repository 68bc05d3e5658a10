//! Regenerates the shipped fixture tables.
//!
//! ```text
//! cargo run --example generate_fixtures [OUT_DIR]
//! ```
//!
//! Writes `carcinogenicity_23.csv` (55 compounds, the 23 reference
//! descriptors, endpoint `ActivityScore` with mean 29) and `hept_10.csv`
//! (80 compounds, endpoint `pIC50`). Output is fully determined by the seeds.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use qsarmap::synthetic::{carcinogenicity_table, hept_table, write_table_csv};

pub const CARCINOGENICITY_SEED: u64 = 23;
pub const HEPT_SEED: u64 = 6;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures"));
    std::fs::create_dir_all(&dir)?;
    for (name, table) in [
        (
            "carcinogenicity_23.csv",
            carcinogenicity_table(CARCINOGENICITY_SEED),
        ),
        ("hept_10.csv", hept_table(HEPT_SEED)),
    ] {
        let path = dir.join(name);
        write_table_csv(&table, BufWriter::new(File::create(&path)?))?;
        println!(
            "{}: {} compounds x {} descriptors, endpoint `{}`",
            path.display(),
            table.n_compounds(),
            table.n_descriptors(),
            table.endpoint_name()
        );
    }
    Ok(())
}
