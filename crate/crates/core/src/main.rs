use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qsarmap::pipeline::{self, RunConfig, ThresholdSpec};
use qsarmap::{ClassNames, Method};

/// Map a QSAR descriptor table to 1D/2D with PCA, nonlinear PCA and Sammon's
/// mapping, and score how well each map separates the two activity classes.
#[derive(Parser, Debug)]
#[command(name = "qsarmap", version)]
struct Cli {
    /// Descriptor CSV: header row, compound id first, numeric columns after.
    #[arg(long)]
    input: PathBuf,
    /// Name of the endpoint (activity) column.
    #[arg(long)]
    endpoint: String,
    /// Positive iff endpoint > threshold; a number or `mean`.
    #[arg(long, default_value = "mean")]
    threshold: ThresholdSpec,
    /// Comma-separated subset of pca, nlpca, sammon.
    #[arg(long, value_delimiter = ',', default_value = "pca,nlpca,sammon")]
    methods: Vec<Method>,
    /// Comma-separated subset of 1, 2.
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    dims: Vec<usize>,
    /// Skip z-scoring of the descriptors.
    #[arg(long)]
    no_normalize: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for the SVG, CSV and report files.
    #[arg(long, default_value = "qsarmap-out")]
    out: PathBuf,
    #[arg(long)]
    sammon_iters: Option<usize>,
    #[arg(long)]
    sammon_step: Option<f64>,
    #[arg(long)]
    nlpca_hidden: Option<usize>,
    #[arg(long)]
    nlpca_lr: Option<f64>,
    #[arg(long)]
    nlpca_epochs: Option<usize>,
    /// Class names as POSITIVE,NEGATIVE, e.g. `active,inactive`.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    classes: Option<Vec<String>>,
}

fn config_from(cli: Cli) -> Result<RunConfig, String> {
    let mut c = RunConfig::new(cli.input, cli.endpoint, cli.threshold, cli.out);
    c.methods = cli.methods;
    c.dims = cli.dims;
    c.normalize = !cli.no_normalize;
    c.seed = cli.seed;
    if let Some(v) = cli.sammon_iters {
        c.sammon.max_iterations = v;
    }
    if let Some(v) = cli.sammon_step {
        c.sammon.step_factor = v;
    }
    if let Some(v) = cli.nlpca_hidden {
        c.nlpca.hidden_width = v;
    }
    if let Some(v) = cli.nlpca_lr {
        c.nlpca.learning_rate = v;
    }
    if let Some(v) = cli.nlpca_epochs {
        c.nlpca.epochs = v;
    }
    if let Some(names) = cli.classes {
        match names.as_slice() {
            [p, n] if !p.is_empty() && !n.is_empty() => {
                c.class_names = ClassNames::new(p.as_str(), n.as_str())
            }
            _ => return Err("--classes expects exactly two names: POSITIVE,NEGATIVE".into()),
        }
    }
    Ok(c)
}

fn main() -> ExitCode {
    let config = match config_from(Cli::parse()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("qsarmap: {e}");
            return ExitCode::from(2);
        }
    };
    match pipeline::run(&config) {
        Ok(out) => {
            for w in &out.report.warnings {
                eprintln!("warning: {w}");
            }
            for (k, order) in &out.report.rankings {
                println!("{k}D ranking: {}", order.join(" > "));
            }
            for r in &out.report.results {
                println!("{} {}D: {}", r.method, r.k, r.verdict);
            }
            println!(
                "wrote {} files to {}",
                out.files.len(),
                config.out_dir.display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("qsarmap: {e}");
            ExitCode::FAILURE
        }
    }
}
