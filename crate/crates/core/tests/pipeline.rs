//! End-to-end runs through the library entry point and the binary.

mod common;

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::Command;

use common::fixture;
use qsarmap::analysis::{
    linear_accuracy_2d, quadratic_accuracy, silhouette, threshold_accuracy_1d,
};
use qsarmap::embedding::{Embedding, Method, Provenance};
use qsarmap::export::read_embedding_csv;
use qsarmap::pipeline::{run, RunConfig, Stage, ThresholdSpec};
use qsarmap::plot::scatter_svg;
use qsarmap::{EndpointLabeling, Matrix};
use serde_json::Value;

fn quick(config: &mut RunConfig) {
    config.nlpca.epochs = 200;
}

fn carcinogenicity(out: &Path) -> RunConfig {
    RunConfig::new(
        fixture("carcinogenicity_23.csv"),
        "ActivityScore",
        ThresholdSpec::Mean,
        out,
    )
}

fn files_in(dir: &Path) -> BTreeSet<String> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect()
}

/// Centre of every `class="marker"` path, per class group.
fn marker_centres(svg: &str) -> Vec<(String, f64, f64)> {
    let doc = roxmltree::Document::parse(svg).expect("well-formed XML");
    let mut out = Vec::new();
    for node in doc
        .descendants()
        .filter(|n| n.attribute("class") == Some("marker"))
    {
        let group = node
            .parent_element()
            .unwrap()
            .attribute("class")
            .unwrap()
            .to_string();
        let nums: Vec<f64> = node
            .attribute("d")
            .unwrap()
            .split(['M', 'L', ' '])
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().unwrap())
            .collect();
        out.push((group, (nums[0] + nums[2]) / 2.0, (nums[1] + nums[3]) / 2.0));
    }
    out
}

#[test]
fn single_job_writes_three_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = carcinogenicity(dir.path());
    c.methods = vec![Method::Pca];
    c.dims = vec![1];
    let out = run(&c).unwrap();
    assert_eq!(
        files_in(dir.path()),
        BTreeSet::from([
            "pca_1d.csv".into(),
            "pca_1d.svg".into(),
            "report.json".into()
        ])
    );
    assert_eq!(out.files.len(), 3);
}

#[test]
fn mean_threshold_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = carcinogenicity(dir.path());
    c.methods = vec![Method::Pca];
    let out = run(&c).unwrap();
    let report: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["labeling"]["threshold"], 29.0);
    assert_eq!(report["labeling"]["threshold_source"], "mean");
    assert_eq!(report["config"]["threshold"], "mean");
    assert_eq!(out.labels.n_positive(), 27);
    assert_eq!(out.labels.n_negative(), 28);
}

#[test]
fn report_schema_is_complete() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = carcinogenicity(dir.path());
    quick(&mut c);
    run(&c).unwrap();
    let text = fs::read_to_string(dir.path().join("report.json")).unwrap();
    let r: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["warnings"], Value::Array(vec![]));
    let keys: Vec<&str> = r.as_object().unwrap().keys().map(String::as_str).collect();
    for k in [
        "config", "dataset", "labeling", "results", "rankings", "warnings",
    ] {
        assert!(keys.contains(&k), "missing {k}");
    }
    let results = r["results"].as_array().unwrap();
    assert_eq!(results.len(), 6);
    let pairs: BTreeSet<(String, u64)> = results
        .iter()
        .map(|b| {
            (
                b["method"].as_str().unwrap().to_string(),
                b["k"].as_u64().unwrap(),
            )
        })
        .collect();
    assert_eq!(pairs.len(), 6);
    for b in results {
        assert!(dir
            .path()
            .join(b["files"]["svg"].as_str().unwrap())
            .exists());
        assert!(dir
            .path()
            .join(b["files"]["csv"].as_str().unwrap())
            .exists());
        assert!(
            b["verdict"] == "linear adequate" || b["verdict"] == "nonlinear boundary indicated"
        );
        assert!(b["provenance"]["kind"].is_string());
    }
    assert_eq!(r["rankings"]["1"].as_array().unwrap().len(), 3);
    assert_eq!(r["rankings"]["2"].as_array().unwrap().len(), 3);
    assert_eq!(files_in(dir.path()).len(), 13);
}

#[test]
fn metrics_recomputed_from_csv_match_report() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = RunConfig::new(
        fixture("hept_10.csv"),
        "pIC50",
        ThresholdSpec::Value(6.0),
        dir.path(),
    );
    quick(&mut c);
    run(&c).unwrap();
    let r: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    let positive = r["labeling"]["positive_class"].as_str().unwrap();
    let close = |a: f64, b: &Value| assert!((a - b.as_f64().unwrap()).abs() < 1e-9, "{a} vs {b}");
    for b in r["results"].as_array().unwrap() {
        let rec = read_embedding_csv(
            fs::File::open(dir.path().join(b["files"]["csv"].as_str().unwrap())).unwrap(),
        )
        .unwrap();
        let flags: Vec<bool> = rec.labels.iter().map(|l| l == positive).collect();
        let labels = EndpointLabeling::from_flags(&flags);
        let m = &b["metrics"];
        if b["k"] == 1 {
            close(
                threshold_accuracy_1d(&rec.coords, &labels)
                    .unwrap()
                    .accuracy,
                &m["threshold_accuracy_1d"]["accuracy"],
            );
        } else {
            close(
                linear_accuracy_2d(&rec.coords, &labels).unwrap().accuracy,
                &m["linear_accuracy"]["accuracy"],
            );
        }
        close(
            quadratic_accuracy(&rec.coords, &labels).unwrap(),
            &m["quadratic_accuracy"],
        );
        close(silhouette(&rec.coords, &labels).unwrap(), &m["silhouette"]);
    }
}

#[test]
fn reruns_are_byte_identical_with_and_without_threads() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let mut ca = carcinogenicity(a.path());
    quick(&mut ca);
    ca.seed = 17;
    let mut cb = ca.clone();
    cb.out_dir = b.path().to_path_buf();
    cb.parallel = false;
    run(&ca).unwrap();
    run(&cb).unwrap();
    let names = files_in(a.path());
    assert_eq!(names, files_in(b.path()));
    for name in names {
        assert_eq!(
            fs::read(a.path().join(&name)).unwrap(),
            fs::read(b.path().join(&name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn every_plot_is_valid_svg_with_one_marker_per_compound() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = RunConfig::new(
        fixture("hept_10.csv"),
        "pIC50",
        ThresholdSpec::Value(6.0),
        dir.path(),
    );
    quick(&mut c);
    let out = run(&c).unwrap();
    for name in files_in(dir.path()).iter().filter(|n| n.ends_with(".svg")) {
        let svg = fs::read_to_string(dir.path().join(name)).unwrap();
        let centres = marker_centres(&svg);
        assert_eq!(centres.len(), out.table.n_compounds(), "{name}");
        let crosses = centres.iter().filter(|c| c.0.contains("cross")).count();
        assert_eq!(crosses, out.labels.n_positive());
        assert!(svg.contains("#d62728") && svg.contains("#1f4fd6"));
    }
}

fn plain(coords: Matrix) -> Embedding {
    Embedding {
        method: Method::Sammon,
        coords,
        provenance: Provenance::Sammon {
            initial_stress: 0.0,
            final_stress: 0.0,
            iterations: 0,
            converged: true,
        },
    }
}

#[test]
fn two_point_plot_has_one_marker_of_each_kind() {
    let svg = scatter_svg(
        &plain(Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]])),
        &EndpointLabeling::from_flags(&[true, false]),
    );
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let groups: Vec<_> = doc
        .descendants()
        .filter(|n| {
            n.attribute("class")
                .is_some_and(|c| c.starts_with("markers"))
        })
        .collect();
    assert_eq!(groups.len(), 2);
    for g in groups {
        assert_eq!(g.children().filter(|c| c.is_element()).count(), 1);
    }
    assert!(svg.contains("Sammon"));
}

#[test]
fn one_dimensional_plot_uses_compound_index() {
    let coords = Matrix::from_rows(&[[0.3], [-1.0], [2.0], [0.0], [0.5]]);
    let labels = EndpointLabeling::from_flags(&[true, false, true, false, true]);
    let svg = scatter_svg(&plain(coords.clone()), &labels);
    let mut centres = marker_centres(&svg);
    // groups list positives first; restore input order
    let order = [0usize, 2, 4, 1, 3];
    let mut by_index = [(0.0, 0.0); 5];
    for (c, &i) in centres.drain(..).zip(&order) {
        by_index[i] = (c.1, c.2);
    }
    let step = by_index[1].0 - by_index[0].0;
    assert!(step > 0.0);
    for i in 1..5 {
        assert!(
            (by_index[i].0 - by_index[i - 1].0 - step).abs() < 0.02,
            "x positions not at indices 1..5"
        );
    }
    // SVG y grows downwards
    assert!(by_index[2].1 < by_index[0].1 && by_index[0].1 < by_index[1].1);
    assert!(svg.contains("Compound index"));
}

#[test]
fn duplicates_and_coincident_points_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("dups.csv");
    fs::write(
        &input,
        "id,a,b,act\nm1,0,0,1\nm2,1,0,7\nm3,0,0,9\nm4,1,1,8\nm5,0,2,2\nm6,3,3,5\n",
    )
    .unwrap();
    let mut c = RunConfig::new(
        &input,
        "act",
        ThresholdSpec::Value(5.0),
        dir.path().join("out"),
    );
    c.methods = vec![Method::Pca, Method::Sammon];
    c.dims = vec![1];
    let out = run(&c).unwrap();
    assert_eq!(out.report.dataset.rows_read, 6);
    assert_eq!(out.report.dataset.duplicates_removed, 1);
    assert_eq!(out.report.warnings.len(), 1);
    assert!(out.report.warnings[0].contains("m3"));
}

#[test]
fn failures_name_their_stage() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = carcinogenicity(dir.path());
    c.input = dir.path().join("missing.csv");
    assert_eq!(run(&c).unwrap_err().stage, Stage::Load);

    let mut c = carcinogenicity(dir.path());
    c.threshold = ThresholdSpec::Value(1000.0);
    assert_eq!(run(&c).unwrap_err().stage, Stage::Label);

    let mut c = carcinogenicity(dir.path());
    c.dims = vec![3];
    let e = run(&c).unwrap_err();
    assert_eq!(e.stage, Stage::Config);
    assert!(e.to_string().starts_with("config stage failed"));

    let mut c = carcinogenicity(dir.path());
    c.endpoint = "NoSuchColumn".into();
    assert_eq!(run(&c).unwrap_err().stage, Stage::Load);
}

#[test]
fn binary_flags_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_qsarmap"))
        .args(["--input", fixture("hept_10.csv").to_str().unwrap()])
        .args([
            "--endpoint",
            "pIC50",
            "--threshold",
            "6",
            "--methods",
            "pca,nlpca",
            "--dims",
            "2",
        ])
        .args([
            "--seed",
            "3",
            "--nlpca-hidden",
            "4",
            "--nlpca-lr",
            "0.02",
            "--nlpca-epochs",
            "50",
        ])
        .args([
            "--sammon-iters",
            "10",
            "--sammon-step",
            "0.3",
            "--no-normalize",
            "--classes",
            "active,inactive",
        ])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    let r: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(r["config"]["normalize"], false);
    assert_eq!(r["config"]["nlpca"]["hidden_width"], 4);
    assert_eq!(r["config"]["sammon"]["max_iterations"], 10);
    assert_eq!(r["labeling"]["positive_class"], "active");
    assert_eq!(r["results"].as_array().unwrap().len(), 2);

    let bad = Command::new(env!("CARGO_BIN_EXE_qsarmap"))
        .args([
            "--input",
            "/nonexistent.csv",
            "--endpoint",
            "pIC50",
            "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("load stage failed"));

    let bad_method = Command::new(env!("CARGO_BIN_EXE_qsarmap"))
        .args(["--input", "x.csv", "--endpoint", "y", "--methods", "tsne"])
        .output()
        .unwrap();
    assert!(!bad_method.status.success());
}
