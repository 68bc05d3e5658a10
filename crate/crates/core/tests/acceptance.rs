//! Acceptance criteria 1-11. Runs as a plain binary and prints one
//! PASS/FAIL line per criterion; exits non-zero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use qsarmap::analysis::{
    best_threshold, linear_accuracy_2d, quadratic_accuracy_2d, silhouette, threshold_accuracy_1d,
    Polarity, Verdict,
};
use qsarmap::dataset::{zscore_columns, DescriptorTable, HEPT_ACTIVE_PIC50};
use qsarmap::eigen::eigendecompose_symmetric;
use qsarmap::nlpca::{init_network, train, TrainConfig};
use qsarmap::pca::PcaModel;
use qsarmap::pipeline::{run, RunConfig, ThresholdSpec};
use qsarmap::sammon::{embed, pairwise_distances, stress, stress_derivatives, SammonConfig};
use qsarmap::synthetic::{
    collinear_points, curved_classes, linear_subspace_classes, rotate_into, write_table_csv,
};
use qsarmap::{EndpointLabeling, Matrix};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Check {
    let mut r = rng(1);
    let (mut worst_res, mut worst_orth) = (0.0f64, 0.0f64);
    for m in 0..100 {
        let d = 1 + m % 25;
        let c = random_symmetric(&mut r, d);
        let e = eigendecompose_symmetric(&c).map_err(|e| e.to_string())?;
        let scale = c.norm_inf().max(1.0);
        for i in 0..d {
            let v = e.eigenvector(i);
            let cv = c.mul_vec(&v);
            let res = cv
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - e.eigenvalues[i] * b).abs())
                .fold(0.0, f64::max);
            worst_res = worst_res.max(res / scale);
        }
        let vtv = e.eigenvectors.transpose().matmul(&e.eigenvectors);
        for i in 0..d {
            for j in 0..d {
                let target = if i == j { 1.0 } else { 0.0 };
                worst_orth = worst_orth.max((vtv[(i, j)] - target).abs());
            }
        }
    }
    ensure(worst_res < 1e-8, || {
        format!("scaled residual {worst_res:e}")
    })?;
    ensure(worst_orth < 1e-8, || {
        format!("orthogonality error {worst_orth:e}")
    })?;
    Ok(format!(
        "max scaled residual {worst_res:.1e}, max |VtV-I| {worst_orth:.1e}"
    ))
}

fn criterion_2() -> Check {
    let mut r = rng(2);
    let mut worst_margin = f64::NEG_INFINITY;
    for _ in 0..20 {
        let n = r.random_range(2..=200);
        let d = r.random_range(1..=25);
        let x = Matrix::from_fn(n, d, |_, j| {
            (1.0 + j as f64) * Distribution::<f64>::sample(&StandardNormal, &mut r)
        });
        let model = PcaModel::fit(&x, 1).map_err(|e| e.to_string())?;
        for _ in 0..200 {
            let mut u: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut r)).collect();
            let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
            u.iter_mut().for_each(|v| *v /= norm);
            let margin = variance_along(&x, &u) - model.explained_variance[0];
            worst_margin = worst_margin.max(margin);
        }
    }
    ensure(worst_margin <= 1e-9, || {
        format!("a probe exceeded PC1 variance by {worst_margin:e}")
    })?;
    Ok(format!("largest probe excess {worst_margin:.2e}"))
}

fn criterion_3() -> Check {
    let mut r = rng(3);
    let mut worst = 0.0f64;
    let mut traces = Vec::new();
    for _ in 0..10 {
        let x = uniform_matrix(&mut r, 5, 3, 1.0);
        let y = uniform_matrix(&mut r, 5, 2, 1.0);
        let d = pairwise_distances(&x);
        let (g, _) = stress_derivatives(&d, &y);
        let numeric = central_difference(y.as_slice(), 1e-6, |p| {
            stress(&d, &Matrix::from_vec(5, 2, p.to_vec()))
        });
        worst = worst.max(max_relative_error(g.as_slice(), &numeric, 1e-6));
        for k in [1, 2] {
            traces.push(
                embed(&x, k, &SammonConfig::default())
                    .map_err(|e| e.to_string())?
                    .1,
            );
        }
    }
    ensure(worst < 1e-5, || {
        format!("gradient relative error {worst:e}")
    })?;

    let line = collinear_points(10, 5, 3);
    let (_, t) = embed(&line, 1, &SammonConfig::default()).map_err(|e| e.to_string())?;
    let collinear = t.final_stress();
    traces.push(t);
    ensure(collinear < 1e-6, || {
        format!("collinear stress {collinear:e}")
    })?;

    for name in ["carcinogenicity_23.csv", "hept_10.csv"] {
        let endpoint = if name.starts_with("hept") {
            "pIC50"
        } else {
            "ActivityScore"
        };
        let t = DescriptorTable::load_csv(fixture(name), endpoint)
            .map_err(|e| e.to_string())?
            .normalize();
        for k in [1, 2] {
            traces.push(
                embed(t.values(), k, &SammonConfig::default())
                    .map_err(|e| e.to_string())?
                    .1,
            );
        }
    }
    let monotone = traces
        .iter()
        .all(|t| t.stress_per_iteration.windows(2).all(|w| w[1] <= w[0]));
    ensure(monotone, || "a stress trace increased".into())?;
    Ok(format!(
        "gradient rel. error {worst:.1e}; {} traces non-increasing; collinear stress {collinear:.1e}",
        traces.len()
    ))
}

fn criterion_4() -> Check {
    let square = Matrix::from_rows(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
    let (_, trace) = embed(&square, 1, &SammonConfig::default()).map_err(|e| e.to_string())?;
    let (oracle, _) = unit_square_grid_oracle();
    let got = trace.final_stress();
    let gap = (got - oracle) / oracle;
    ensure(gap.abs() <= 0.05, || {
        format!("stress {got} vs oracle {oracle} ({:+.1}%)", 100.0 * gap)
    })?;
    Ok(format!(
        "stress {got:.6} vs grid oracle {oracle:.6} ({:+.3}%)",
        100.0 * gap
    ))
}

fn criterion_5() -> Check {
    let mut worst = 0.0f64;
    let mut count = 0;
    for seed in 0..5 {
        let mut r = rng(50 + seed);
        let d = 3 + seed as usize % 3;
        let k = 1 + seed as usize % 2;
        let mut net = init_network(
            d,
            k,
            &TrainConfig {
                hidden_width: 4,
                seed,
                ..TrainConfig::default()
            },
        )
        .map_err(|e| e.to_string())?;
        let mut p = net.parameters();
        p.iter_mut().for_each(|v| *v += r.random_range(-0.3..0.3));
        net.set_parameters(&p);
        let batch = uniform_matrix(&mut r, 3, d, 1.0);
        let (_, g) = net.loss_gradient(&batch).map_err(|e| e.to_string())?;
        let mut probe = net.clone();
        let numeric = central_difference(&p, 1e-6, |q| {
            probe.set_parameters(q);
            oracle_mse(&probe, &batch)
        });
        worst = worst.max(max_relative_error(&g.flatten(), &numeric, 1e-7));
        count += p.len();
    }
    ensure(worst < 1e-4, || format!("relative error {worst:e}"))?;
    Ok(format!(
        "{count} parameters, max relative error {worst:.1e}"
    ))
}

fn criterion_6() -> Check {
    let mut r = rng(6);
    let t = Matrix::from_fn(50, 1, |_, _| r.random_range(-1.0..1.0));
    let mut x = rotate_into(&t, 5, &mut r);
    let offset: Vec<f64> = (0..5).map(|_| r.random_range(-0.5..0.5)).collect();
    for i in 0..50 {
        x.row_mut(i)
            .iter_mut()
            .zip(&offset)
            .for_each(|(a, b)| *a += b);
    }
    let pca = PcaModel::fit(&x, 1)
        .and_then(|m| m.reconstruction_mse(&x))
        .map_err(|e| e.to_string())?;
    let (_, trace) = train(&x, 1, &TrainConfig::default()).map_err(|e| e.to_string())?;
    let bound = 1.05 * pca + 1e-3;
    ensure(trace.final_mse <= bound, || {
        format!("mse {} > bound {bound}", trace.final_mse)
    })?;
    Ok(format!(
        "NLPCA mse {:.2e} <= {bound:.2e} (PCA mse {pca:.1e})",
        trace.final_mse
    ))
}

fn criterion_7() -> Check {
    let mut worst_mean = 0.0f64;
    let mut worst_sd = 0.0f64;
    for (name, endpoint) in [
        ("carcinogenicity_23.csv", "ActivityScore"),
        ("hept_10.csv", "pIC50"),
    ] {
        let t = DescriptorTable::load_csv(fixture(name), endpoint).map_err(|e| e.to_string())?;
        let z = t.deduplicate().map_err(|e| e.to_string())?.0.normalize();
        let v = z.values();
        let n = v.rows() as f64;
        for j in 0..v.cols() {
            let col = v.column(j);
            let m = col.iter().sum::<f64>() / n;
            let s = (col.iter().map(|a| (a - m) * (a - m)).sum::<f64>() / (n - 1.0)).sqrt();
            worst_mean = worst_mean.max(m.abs());
            worst_sd = worst_sd.max((s - 1.0).abs());
        }
    }
    ensure(worst_mean < 1e-12, || format!("|mean| {worst_mean:e}"))?;
    ensure(worst_sd < 1e-12, || format!("|sd - 1| {worst_sd:e}"))?;
    let z = zscore_columns(&Matrix::from_rows(&[[1.0], [2.0], [3.0]]));
    let triple_err = [-1.0, 0.0, 1.0]
        .iter()
        .zip(z.as_slice())
        .map(|(e, a)| (e - a).abs())
        .fold(0.0, f64::max);
    ensure(triple_err < 1e-15, || {
        format!("[1,2,3] off by {triple_err:e}")
    })?;
    Ok(format!(
        "max |mean| {worst_mean:.1e}, max |sd-1| {worst_sd:.1e}, [1,2,3] exact"
    ))
}

fn criterion_8() -> Check {
    let hept =
        DescriptorTable::load_csv(fixture("hept_10.csv"), "pIC50").map_err(|e| e.to_string())?;
    let labels = hept.label(HEPT_ACTIVE_PIC50);
    let mut on_boundary = 0;
    for (flag, &v) in labels.labels().iter().zip(hept.endpoint()) {
        ensure(*flag == (v > 6.0), || format!("pIC50 {v} labeled {flag}"))?;
        if v == 6.0 {
            on_boundary += 1;
        }
    }
    ensure(on_boundary > 0, || {
        "fixture has no pIC50 exactly at 6".into()
    })?;

    let carc = DescriptorTable::load_csv(fixture("carcinogenicity_23.csv"), "ActivityScore")
        .map_err(|e| e.to_string())?;
    let mean = carc.mean_threshold();
    ensure(mean == 29.0, || format!("endpoint mean {mean}"))?;
    let cl = carc.label(mean);
    for (flag, &v) in cl.labels().iter().zip(carc.endpoint()) {
        ensure(*flag == (v > 29.0), || format!("score {v} labeled {flag}"))?;
    }
    let at_mean = carc.endpoint().iter().filter(|&&v| v == 29.0).count();
    ensure(
        cl.n_positive() == 27 && cl.n_negative() == 28 && at_mean == 1,
        || {
            format!(
                "split {}/{} with {at_mean} at the mean",
                cl.n_positive(),
                cl.n_negative()
            )
        },
    )?;

    // 54 scores symmetric about 29 with none on it split exactly in half
    let scores: Vec<f64> = (1..=27)
        .flat_map(|i| [29.0 + 0.5 * i as f64, 29.0 - 0.5 * i as f64])
        .collect();
    let sym = DescriptorTable::new(
        (0..54).map(|i| format!("s{i}")).collect(),
        vec!["x".into()],
        Matrix::from_fn(54, 1, |i, _| i as f64),
        "score",
        scores,
    )
    .map_err(|e| e.to_string())?;
    let sl = sym.label(sym.mean_threshold());
    ensure(sl.n_positive() == 27 && sl.n_negative() == 27, || {
        format!("symmetric split {}/{}", sl.n_positive(), sl.n_negative())
    })?;
    Ok(format!(
        "HEPT {}/{} active ({on_boundary} at exactly 6 -> inactive); CPDB threshold 29 -> 27/28; symmetric 27/27",
        labels.n_positive(),
        labels.n_negative()
    ))
}

fn criterion_9() -> Check {
    let col = |v: &[f64]| Matrix::from_vec(v.len(), 1, v.to_vec());
    let fl = EndpointLabeling::from_flags;

    let perfect = threshold_accuracy_1d(
        &col(&[-2.0, -1.0, 1.0, 2.0]),
        &fl(&[false, false, true, true]),
    )
    .map_err(|e| e.to_string())?;
    ensure(
        perfect.accuracy == 1.0 && perfect.cut == 0.0 && perfect.polarity == Polarity::Above,
        || format!("perfect split {perfect:?}"),
    )?;

    let alt = best_threshold(&[1.0, 2.0, 3.0, 4.0], &[true, false, true, false]);
    ensure(alt.accuracy == 0.75, || format!("alternating {alt:?}"))?;

    let flat = best_threshold(&[2.0; 5], &[true, false, false, true, false]);
    ensure(flat.accuracy == 0.6, || {
        format!("constant coordinates {flat:?}")
    })?;

    let xor = Matrix::from_rows(&[[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]]);
    let xl = fl(&[true, true, false, false]);
    let lin = linear_accuracy_2d(&xor, &xl)
        .map_err(|e| e.to_string())?
        .accuracy;
    let quad = quadratic_accuracy_2d(&xor, &xl).map_err(|e| e.to_string())?;
    ensure(lin == 0.75 && quad == 1.0, || {
        format!("XOR linear {lin}, quadratic {quad}")
    })?;

    let clouds = Matrix::from_rows(&[
        [-3.2, 0.5],
        [-2.8, -0.5],
        [-3.2, -0.5],
        [-2.8, 0.5],
        [3.2, 0.5],
        [2.8, -0.5],
        [3.2, -0.5],
        [2.8, 0.5],
    ]);
    let cl = fl(&[false, false, false, false, true, true, true, true]);
    let fit = linear_accuracy_2d(&clouds, &cl).map_err(|e| e.to_string())?;
    ensure(
        fit.accuracy == 1.0 && (fit.direction[0].abs() - 1.0).abs() < 1e-9,
        || format!("axis clouds {fit:?}"),
    )?;

    let ring: Vec<[f64; 2]> = (0..24)
        .map(|i| {
            let a = i as f64 * std::f64::consts::TAU / 12.0;
            let r = if i < 12 { 0.5 } else { 2.0 };
            [r * a.cos(), r * a.sin()]
        })
        .collect();
    let circle = quadratic_accuracy_2d(
        &Matrix::from_rows(&ring),
        &fl(&(0..24).map(|i| i < 12).collect::<Vec<_>>()),
    )
    .map_err(|e| e.to_string())?;
    ensure(circle == 1.0, || format!("circle {circle}"))?;

    let square = Matrix::from_rows(&[[0.0, 0.0], [0.0, 1.0], [3.0, 0.0], [3.0, 1.0]]);
    let s = silhouette(&square, &fl(&[true, true, false, false])).map_err(|e| e.to_string())?;
    let hand = 1.0 - 2.0 / (3.0 + 10f64.sqrt());
    ensure((s - hand).abs() < 1e-12, || {
        format!("silhouette {s} vs {hand}")
    })?;

    let tight = Matrix::from_rows(&[
        [0.0, 0.0],
        [0.01, 0.0],
        [0.0, 0.01],
        [10.0, 10.0],
        [10.01, 10.0],
        [10.0, 10.01],
    ]);
    let st = silhouette(&tight, &fl(&[true, true, true, false, false, false]))
        .map_err(|e| e.to_string())?;
    ensure(st > 0.9, || format!("tight clusters {st}"))?;
    Ok(format!(
        "perfect 1.0 @0; alternating 0.75; XOR {lin}/{quad}; circle {circle}; silhouette {s:.12}"
    ))
}

fn criterion_10() -> Check {
    let dirs = [
        tempfile::tempdir().map_err(|e| e.to_string())?,
        tempfile::tempdir().map_err(|e| e.to_string())?,
    ];
    let mut slowest = Duration::ZERO;
    for d in &dirs {
        let mut c = RunConfig::new(
            fixture("carcinogenicity_23.csv"),
            "ActivityScore",
            ThresholdSpec::Mean,
            d.path(),
        );
        c.seed = 2024;
        let start = Instant::now();
        let out = run(&c).map_err(|e| e.to_string())?;
        slowest = slowest.max(start.elapsed());
        ensure(
            out.table.n_compounds() == 55 && out.table.n_descriptors() == 23,
            || "fixture shape".into(),
        )?;
        ensure(out.report.results.len() == 6, || {
            format!("{} result blocks", out.report.results.len())
        })?;
    }
    ensure(slowest < Duration::from_secs(120), || {
        format!("run took {slowest:?}")
    })?;
    let mut compared = 0;
    for entry in std::fs::read_dir(dirs[0].path()).map_err(|e| e.to_string())? {
        let name = entry.map_err(|e| e.to_string())?.file_name();
        let name = name.to_string_lossy();
        if name.ends_with(".csv") || name.ends_with(".json") {
            let a = std::fs::read(dirs[0].path().join(&*name)).map_err(|e| e.to_string())?;
            let b = std::fs::read(dirs[1].path().join(&*name)).map_err(|e| e.to_string())?;
            ensure(a == b, || format!("{name} differs between runs"))?;
            compared += 1;
        }
    }
    ensure(compared == 7, || format!("compared {compared} files"))?;
    Ok(format!(
        "6 CSVs + report byte-identical; slowest run {:.2} s",
        slowest.as_secs_f64()
    ))
}

fn criterion_11() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut notes = Vec::new();
    for (name, data) in [
        ("linear", linear_subspace_classes(60, 8, 1)),
        ("curved", curved_classes(60, 8, 1)),
    ] {
        let input = dir.path().join(format!("{name}.csv"));
        let file = std::fs::File::create(&input).map_err(|e| e.to_string())?;
        write_table_csv(&data.into_table(), file).map_err(|e| e.to_string())?;
        let c = RunConfig::new(
            &input,
            "class",
            ThresholdSpec::Value(0.5),
            dir.path().join(name),
        );
        let out = run(&c).map_err(|e| e.to_string())?;
        let sep = &out.separability;
        if name == "linear" {
            let first = &sep.rankings[&2][0];
            let pca = sep.block("pca", 2).ok_or("no pca block")?;
            ensure(
                first == "pca" && pca.verdict == Verdict::LinearAdequate,
                || {
                    format!(
                        "2D ranking {:?}, PCA verdict {}",
                        sep.rankings[&2], pca.verdict
                    )
                },
            )?;
            notes.push(format!(
                "linear: 2D ranking {}, PCA {}",
                sep.rankings[&2].join(">"),
                pca.verdict
            ));
        } else {
            for b in sep.blocks.iter().filter(|b| b.k == 2) {
                let gap = b.quadratic_accuracy - b.primary();
                ensure(gap > 0.1 && b.verdict == Verdict::NonlinearBoundary, || {
                    format!(
                        "{} quadratic {} vs linear {} ({})",
                        b.method,
                        b.quadratic_accuracy,
                        b.primary(),
                        b.verdict
                    )
                })?;
            }
            let pca = sep.block("pca", 2).ok_or("no pca block")?;
            notes.push(format!(
                "curved: PCA quadratic {:.3} vs linear {:.3}, {}",
                pca.quadratic_accuracy,
                pca.primary(),
                pca.verdict
            ));
        }
    }
    Ok(notes.join("; "))
}

fn main() {
    let criteria: [(u32, &str, Option<u64>, fn() -> Check); 11] = [
        (
            1,
            "eigensolver residual and orthogonality",
            Some(5),
            criterion_1,
        ),
        (2, "PCA variance maximality", Some(5), criterion_2),
        (
            3,
            "Sammon gradient, monotone stress, exact 1D embedding",
            Some(10),
            criterion_3,
        ),
        (
            4,
            "Sammon unit square vs grid-search oracle",
            Some(30),
            criterion_4,
        ),
        (5, "autoencoder gradient check", Some(5), criterion_5),
        (6, "NLPCA matches PCA on rank-1 data", Some(60), criterion_6),
        (7, "normalization contract", None, criterion_7),
        (8, "labeling contract", None, criterion_8),
        (9, "separability hand oracles", Some(5), criterion_9),
        (10, "end-to-end determinism", Some(240), criterion_10),
        (11, "synthetic discrimination check", None, criterion_11),
    ];
    let mut failed = 0;
    for (id, name, budget, f) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match (outcome, budget) {
            (Ok(_), Some(b)) if elapsed > Duration::from_secs(b) => {
                Err(format!("took {elapsed:?}, budget {b} s"))
            }
            (o, _) => o,
        };
        let secs = elapsed.as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {id:>2}: {name} [{secs:.2} s] {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {id:>2}: {name} [{secs:.2} s] {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
