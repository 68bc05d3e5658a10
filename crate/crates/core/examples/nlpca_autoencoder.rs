//! Nonlinear PCA with a bottleneck autoencoder: train on the HEPT fixture,
//! compare against linear PCA, and round-trip the trained parameters
//! through the text format.
//!
//! ```text
//! cargo run --release --example nlpca_autoencoder
//! ```

use qsarmap::nlpca::{train, AutoencoderNetwork, TrainConfig};
use qsarmap::pca::PcaModel;
use qsarmap::DescriptorTable;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/hept_10.csv");
    let table = DescriptorTable::load_csv(path, "pIC50")?
        .deduplicate()?
        .0
        .normalize();
    let x = table.values();

    let config = TrainConfig {
        seed: 7,
        ..TrainConfig::default()
    };
    for k in [1, 2] {
        let (net, trace) = train(x, k, &config)?;
        let pca = PcaModel::fit(x, k)?.reconstruction_mse(x)?;
        println!(
            "k = {k}: layers {:?}, mse {:.4} -> {:.4} (linear PCA {:.4})",
            net.layer_sizes(),
            trace.initial_mse,
            trace.final_mse,
            pca
        );
        if k == 2 {
            let file = std::env::temp_dir().join("qsarmap_nlpca_2d.params");
            net.save(&file)?;
            let back = AutoencoderNetwork::load(&file)?;
            println!(
                "saved {} parameters to {}; reloaded mse {:.4}",
                net.n_parameters(),
                file.display(),
                back.mse(x)?
            );
            let emb = back.encode(x)?;
            println!(
                "bottleneck of {}: {:?}",
                table.compound_ids()[0],
                emb.coords.row(0)
            );
        }
    }
    Ok(())
}
