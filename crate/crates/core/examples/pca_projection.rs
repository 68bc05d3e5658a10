//! Principal component projection of the carcinogenicity fixture, with the
//! variance captured by each component and the 1- and 2-component
//! reconstruction error.
//!
//! ```text
//! cargo run --example pca_projection
//! ```

use qsarmap::pca::PcaModel;
use qsarmap::DescriptorTable;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/fixtures/carcinogenicity_23.csv"
    );
    let table = DescriptorTable::load_csv(path, "ActivityScore")?
        .deduplicate()?
        .0
        .normalize();
    let x = table.values();

    let full = PcaModel::fit(x, x.cols())?;
    println!("total variance {:.4}", full.total_variance);
    let mut cumulative = 0.0;
    for (i, r) in full.explained_variance_ratio().iter().enumerate().take(5) {
        cumulative += r;
        println!(
            "PC{}: variance {:8.4}  ratio {:.3}  cumulative {:.3}",
            i + 1,
            full.explained_variance[i],
            r,
            cumulative
        );
    }

    for k in [1, 2] {
        let model = PcaModel::fit(x, k)?;
        println!(
            "k = {k}: reconstruction mse {:.4}",
            model.reconstruction_mse(x)?
        );
    }

    let coords = PcaModel::fit(x, 2)?.transform(x)?;
    println!("\nfirst compounds in the PC1/PC2 plane:");
    for i in 0..5 {
        println!(
            "{}  ({:7.3}, {:7.3})  score {}",
            table.compound_ids()[i],
            coords[(i, 0)],
            coords[(i, 1)],
            table.endpoint()[i]
        );
    }
    Ok(())
}
