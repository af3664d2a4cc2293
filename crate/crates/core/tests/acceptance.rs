//! Acceptance report: one PASS/FAIL/SKIP line per criterion.
//!
//! Runs as a plain binary (no test harness) so the report is always printed.
//! Exits non-zero when any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use common::two_blobs;
use landmap::analysis::{coverage, perf_alignment, Orientation, PerformanceTable};
use landmap::bbob::{make_problem, Objective};
use landmap::cluster::{
    agglomerative, birch, gmm, grid_search, kmeans, parse_grid, read_assignment_csv, CovarianceType, GridOptions,
    Linkage,
};
use landmap::mabbob::{generate_suite, AffineProblem, SuiteConfig, CLAMP_EPS};
use landmap::manifest::SuiteManifest;
use landmap::matrix::Matrix;
use landmap::metrics::{adjusted_rand_index, cosine, hcv, silhouette, silhouette_samples, PairwiseDistances};
use landmap::pipeline::{replay, with_jobs, BestSummary, Config, Pipeline, RepresentationSource, RUN_MANIFEST};
use landmap::repr::{ingest_csv, preprocess, RepresentationMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

enum Outcome {
    Pass,
    Fail,
    Skip,
}

struct Report {
    rows: Vec<(Outcome, String, String)>,
}

impl Report {
    fn check(&mut self, name: &str, ok: bool, detail: String) {
        let outcome = if ok { Outcome::Pass } else { Outcome::Fail };
        self.rows.push((outcome, name.to_string(), detail));
    }

    fn skip(&mut self, name: &str, detail: String) {
        self.rows.push((Outcome::Skip, name.to_string(), detail));
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn suite_counts(r: &mut Report) {
    let t = Instant::now();
    let suite = generate_suite(&SuiteConfig::default()).unwrap();
    let mut per = vec![0usize; 552];
    let mut max_combo = 0;
    for e in &suite {
        max_combo = max_combo.max(e.combo_index);
        per[e.combo_index] += 1;
    }
    let secs = t.elapsed().as_secs_f64();
    let ok = suite.len() == 8280 && max_combo == 551 && per.iter().all(|c| *c == 15) && secs < 1.0;
    r.check(
        "Suite counts",
        ok,
        format!("{} combinations, {} problems, 15 per combination: {} ({secs:.3} s)", max_combo + 1, suite.len(), per.iter().all(|c| *c == 15)),
    );
}

#[derive(Deserialize)]
struct Fixture {
    problems: Vec<FixtureProblem>,
}

#[derive(Deserialize)]
struct FixtureProblem {
    class_id: u8,
    instance_id: u32,
    dim: usize,
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
}

fn bbob_oracle(r: &mut Report) {
    let fixture: Fixture = serde_json::from_str(include_str!("fixtures/bbob_reference.json")).unwrap();
    let t = Instant::now();
    let mut classes = std::collections::BTreeSet::new();
    let mut instances = std::collections::BTreeSet::new();
    let (mut points, mut worst) = (0usize, 0.0f64);
    for p in fixture.problems.iter().filter(|p| p.dim == 10) {
        let f = make_problem(p.class_id, p.instance_id, 10).unwrap();
        classes.insert(p.class_id);
        instances.insert(p.instance_id);
        for (x, v) in p.points.iter().zip(&p.values) {
            worst = worst.max((f.value(x) - v).abs() / v.abs().max(1.0));
            points += 1;
        }
    }
    let secs = t.elapsed().as_secs_f64();
    let ok = classes.len() >= 5 && instances.len() >= 2 && points >= 50 && worst <= 1e-6 && secs < 1.0;
    r.check(
        "BBOB oracle",
        ok,
        format!(
            "{} classes x {} instances, {points} points at d=10, worst relative error {worst:.2e} ({secs:.3} s)",
            classes.len(),
            instances.len()
        ),
    );
}

fn affine_identities(r: &mut Report) {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pairs = [(1, 2), (3, 7), (8, 20), (5, 24), (10, 11), (12, 4), (15, 16), (19, 6), (21, 22), (23, 9)];
    let mut worst_unit = 0.0f64;
    let mut checked = 0;
    let mut worst_opt = 0.0f64;
    for (i, j) in pairs {
        let a = make_problem(i, 1, 10).unwrap();
        let b = make_problem(j, 1, 10).unwrap();
        let unit = AffineProblem::limit_case(a.clone(), b.clone(), 1.0).unwrap();
        for _ in 0..100 {
            let x: Vec<f64> = (0..10).map(|_| rng.random_range(-5.0..5.0)).collect();
            let direct = a.value(&x) - a.f_opt();
            if direct > CLAMP_EPS {
                worst_unit = worst_unit.max(rel(unit.value(&x), direct));
                checked += 1;
            }
        }
        for alpha in [0.25, 0.5, 0.75] {
            let f = AffineProblem::new(a.clone(), b.clone(), alpha).unwrap();
            worst_opt = worst_opt.max(rel(f.value(a.x_opt()), CLAMP_EPS));
        }
    }
    let s1 = make_problem(1, 1, 10).unwrap();
    let s2 = make_problem(1, 2, 10).unwrap();
    let half = AffineProblem::limit_case(s1.clone(), s2.clone(), 0.5).unwrap();
    let mut worst_geo = 0.0f64;
    for _ in 0..10 {
        let x: Vec<f64> = (0..10).map(|_| rng.random_range(-5.0..5.0)).collect();
        let moved: Vec<f64> = (0..10).map(|k| x[k] - s1.x_opt()[k] + s2.x_opt()[k]).collect();
        let geo = ((s1.value(&x) - s1.f_opt()) * (s2.value(&moved) - s2.f_opt())).sqrt();
        worst_geo = worst_geo.max(rel(half.value(&x), geo));
    }
    let secs = t.elapsed().as_secs_f64();
    let ok = checked == 1000 && worst_unit <= 1e-9 && worst_opt <= 1e-9 && worst_geo <= 1e-9 && secs < 10.0;
    r.check(
        "Affine identities",
        ok,
        format!(
            "alpha=1 worst rel {worst_unit:.1e} over {checked} points; value at optimum worst rel {worst_opt:.1e}; \
             geometric mean worst rel {worst_geo:.1e} ({secs:.2} s)"
        ),
    );
}

fn clustering_oracles(r: &mut Report) {
    let t = Instant::now();
    let (x, truth) = two_blobs(11);
    let aris = [
        ("kmeans", adjusted_rand_index(&truth, &kmeans(&x, 2, 10, 42).unwrap().labels).unwrap()),
        ("ward", adjusted_rand_index(&truth, &agglomerative(&x, 2, Linkage::Ward).unwrap().labels).unwrap()),
        ("gmm", adjusted_rand_index(&truth, &gmm(&x, 2, CovarianceType::Diag, 42).unwrap().labels).unwrap()),
        ("birch", adjusted_rand_index(&truth, &birch(&x, 2, 0.5).unwrap().labels).unwrap()),
    ];
    let ari_ok = aris.iter().all(|(_, a)| *a == 1.0);

    let four = Matrix::from_rows(&[vec![0.0], vec![0.1], vec![10.0], vec![10.1]]).unwrap();
    let fit = agglomerative(&four, 2, Linkage::Average).unwrap();
    let m = fit.dendrogram.merges();
    let trace_ok = (m[0].left, m[0].right) == (0, 1)
        && (m[1].left, m[1].right) == (2, 3)
        && (m[2].left, m[2].right) == (4, 5)
        && (m[2].height - 10.0).abs() < 1e-5
        && fit.labels[0] == fit.labels[1]
        && fit.labels[2] == fit.labels[3]
        && fit.labels[0] != fit.labels[2];

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let noise = Matrix::new(200, 3, (0..600).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
    let mut em_ok = true;
    for data in [&x, &noise] {
        for cov in [CovarianceType::Full, CovarianceType::Tied, CovarianceType::Diag] {
            for k in [2, 3, 5] {
                let ll = gmm(data, k, cov, 3).unwrap().log_likelihood;
                em_ok &= ll.windows(2).all(|w| w[1] >= w[0] - 1e-9);
            }
        }
    }
    let mut inertia_ok = true;
    for k in [2, 4, 7] {
        let f = kmeans(&noise, k, 20, 9).unwrap();
        inertia_ok &= f.restart_inertia.iter().all(|v| f.inertia <= *v);
    }
    let secs = t.elapsed().as_secs_f64();
    r.check(
        "Clustering oracles",
        ari_ok && trace_ok && em_ok && inertia_ok && secs < 30.0,
        format!(
            "ARI {}; 4-point merge trace {}; EM monotone {em_ok}; best-restart inertia minimal {inertia_ok} ({secs:.2} s)",
            aris.iter().map(|(n, a)| format!("{n}={a}")).collect::<Vec<_>>().join(" "),
            if trace_ok { "reproduced" } else { "differs" },
        ),
    );
}

fn metric_identities(r: &mut Report) {
    let t = Instant::now();
    let line = Matrix::new(4, 1, vec![0.0, 0.1, 10.0, 10.1]).unwrap();
    let labels = [0, 0, 1, 1];
    let mean = silhouette(&line, &labels, None, 0).unwrap();
    let s0 = silhouette_samples(&PairwiseDistances::new(&line), &labels).unwrap()[0];
    let sil_ok = (mean - 0.99005).abs() <= 1e-6;

    let h = |a: &[usize], b: &[usize]| hcv(a, b).unwrap();
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-12;
    let c1 = h(&[0, 0, 1, 1], &[1, 1, 0, 0]);
    let c2 = h(&[0, 0, 1, 1], &[0, 0, 0, 0]);
    let c3 = h(&[0, 0, 1, 1], &[0, 1, 2, 3]);
    let hcv_ok = close(c1.homogeneity, 1.0)
        && close(c1.completeness, 1.0)
        && close(c1.v_measure, 1.0)
        && close(c2.homogeneity, 0.0)
        && close(c2.completeness, 1.0)
        && close(c2.v_measure, 0.0)
        && close(c3.homogeneity, 1.0)
        && close(c3.completeness, 0.5)
        && close(c3.v_measure, 2.0 / 3.0);
    let cos = [
        (cosine(&[2.0, 5.0], &[2.0, 5.0]).unwrap(), 1.0),
        (cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0),
        (cosine(&[3.0, 4.0], &[4.0, 3.0]).unwrap(), 0.96),
    ];
    let cos_ok = cos.iter().all(|(got, want)| close(*got, *want));
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut dual_ok = true;
    for _ in 0..100 {
        let n = rng.random_range(1..60);
        let a: Vec<usize> = (0..n).map(|_| rng.random_range(0..6)).collect();
        let b: Vec<usize> = (0..n).map(|_| rng.random_range(0..6)).collect();
        dual_ok &= close(h(&a, &b).homogeneity, h(&b, &a).completeness);
    }
    let secs = t.elapsed().as_secs_f64();
    let mut detail = format!(
        "silhouette mean {mean:.8} vs 0.99005 +- 1e-6 ({}); s(0) = {s0:.8}; hcv hand cases {hcv_ok}; cosine {:?} ({cos_ok}); \
         duality on 100 pairs {dual_ok} ({secs:.3} s)",
        if sil_ok { "ok" } else { "off by 5.0e-5" },
        cos.map(|c| c.0),
    );
    if !sil_ok {
        detail.push_str(
            "\n         the expected mean assumes all four points score alike, but s(0.1) = s(10) = 9.85/9.95 \
             while s(0) = s(10.1) = 9.95/10.05, so the exact mean is 0.98999975; \
             the per-point value 0.99005 holds only for the outer points",
        );
    }
    r.check("Metric identities", sil_ok && hcv_ok && cos_ok && dual_ok && secs < 5.0, detail);
}

const DESK_GRID: &str = "kmeans k=5..25:5 n_init=10,20; agglomerative k=5..25:5 linkage=ward,average,complete; \
                         gmm k=5..25:5 covariance_type=full,tied,diag; birch k=5..25:5 threshold=0.5,1.0";

fn desk_config(dir: &Path) -> Config {
    let mut c = Config::default();
    c.suite = SuiteConfig {
        classes: vec![1, 3, 7, 10, 17, 21],
        instances: vec![1, 2],
        alphas: vec![0.5],
        dim: 10,
    };
    c.cluster.grid = Some(DESK_GRID.into());
    let m = SuiteManifest::build(&c.suite, &c.sampling, c.master_seed).unwrap();
    // synthetic portfolios: best configuration depends on the class pair with some instance noise
    let mut perf = String::from("class_i,class_j,instance,alpha,portfolio,c1,c2,c3,c4,c5\n");
    for (name, shift) in [("DE", 0usize), ("PSO", 2)] {
        for rec in &m.records {
            let scores: Vec<String> = (0..5usize)
                .map(|k| {
                    let v = (rec.class_i as usize * 7 + rec.class_j as usize * 3 + k * 5 + shift + rec.instance as usize) % 11;
                    v.to_string()
                })
                .collect();
            perf.push_str(&format!(
                "{},{},{},{},{name},{}\n",
                rec.class_i,
                rec.class_j,
                rec.instance,
                rec.alpha,
                scores.join(",")
            ));
        }
    }
    let path = dir.join("performance.csv");
    std::fs::write(&path, perf).unwrap();
    c.analysis.performance.push(path);
    c
}

/// Second representation for the cross-representation analyses: the
/// dispersion and information-content columns of the feature table.
fn write_subset(run: &Path, dest: &Path) {
    let m = SuiteManifest::read(&run.join("manifest.json")).unwrap();
    let ela = ingest_csv(&run.join("features/ela.csv"), "ela", &m).unwrap();
    let keep: Vec<usize> = (0..ela.dim())
        .filter(|&c| ela.columns[c].starts_with("disp.") || ela.columns[c].starts_with("ic."))
        .collect();
    let columns = keep.iter().map(|&c| ela.columns[c].clone()).collect();
    let sub = RepresentationMatrix::new("ela_subset", ela.keys.clone(), columns, ela.values.select_columns(&keep)).unwrap();
    sub.write_csv(dest, &m).unwrap();
}

fn csv_artifacts(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for e in std::fs::read_dir(&dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().is_some_and(|x| x == "csv") && !p.to_string_lossy().ends_with("_timings.csv") {
                let rel = p.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.insert(rel, std::fs::read(&p).unwrap());
            }
        }
    }
    out
}

fn desk_run(dir: &Path, jobs: Option<usize>) -> (PathBuf, f64) {
    let run = dir.join("run");
    let t = Instant::now();
    let mut config = desk_config(dir);
    with_jobs(jobs, || {
        let mut p = Pipeline::open(&run, config.clone(), false).unwrap();
        p.generate().unwrap();
        p.features().unwrap();
    })
    .unwrap();
    let subset = dir.join("ela_subset.csv");
    write_subset(&run, &subset);
    config.representations.push(RepresentationSource {
        name: "ela_subset".into(),
        path: subset,
        standardize: Some(true),
    });
    with_jobs(jobs, || Pipeline::open(&run, config, false).unwrap().run_all().unwrap()).unwrap();
    (run, t.elapsed().as_secs_f64())
}

fn end_to_end(r: &mut Report) {
    let tmp = tempfile::tempdir().unwrap();
    let (run, secs) = desk_run(tmp.path(), None);
    let m = SuiteManifest::read(&run.join("manifest.json")).unwrap();

    // coverage conservation on every clustered representation
    let mut cov_ok = m.len() == 60;
    let mut cov_detail = Vec::new();
    for name in ["ela", "ela_subset"] {
        let labels = read_assignment_csv(&run.join(format!("clusters/{name}_assignment.csv")), &m).unwrap();
        let cov = coverage(name, &labels, &m).unwrap();
        let mut sizes = vec![0u64; cov.n_clusters];
        for l in &labels {
            sizes[*l] += 1;
        }
        let ok = cov.total() == m.len() as u64
            && cov.row_sums().iter().all(|s| *s == m.variants_per_combination() as u64)
            && cov.column_sums() == sizes;
        cov_ok &= ok;
        cov_detail.push(format!("{name}: {} x {} total {}", cov.combos.len(), cov.n_clusters, cov.total()));
    }
    r.check(
        "Coverage conservation",
        cov_ok,
        format!("{}; row sums = {}, column sums = cluster sizes", cov_detail.join(", "), m.variants_per_combination()),
    );

    // best silhouette against random labelings with the same k
    let best: BestSummary =
        serde_json::from_str(&std::fs::read_to_string(run.join("clusters/ela_best.json")).unwrap()).unwrap();
    let processed = ingest_csv(&run.join("processed/ela.csv"), "ela", &m).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let baselines: Vec<f64> = (0..20)
        .map(|_| {
            let labels: Vec<usize> = (0..m.len()).map(|_| rng.random_range(0..best.k)).collect();
            silhouette(&processed.values, &labels, None, 0).unwrap()
        })
        .collect();
    let baseline = baselines.iter().sum::<f64>() / 20.0;
    let rescored = silhouette(
        &processed.values,
        &read_assignment_csv(&run.join("clusters/ela_assignment.csv"), &m).unwrap(),
        None,
        0,
    )
    .unwrap();

    let cells = std::fs::read_to_string(run.join("clusters/ela_scores.csv")).unwrap().lines().count() - 1;
    let analysis_ok = run.join("analysis/similarity_ela__ela_subset.csv").exists()
        && run.join("analysis/performance_alignment.csv").exists()
        && run.join("viz/bundle.json").exists();
    let t = Instant::now();
    let rep = replay(&run.join(RUN_MANIFEST), &tmp.path().join("replayed")).unwrap();
    let replay_secs = t.elapsed().as_secs_f64();
    r.check(
        "End-to-end desk scale",
        secs + replay_secs < 600.0
            && best.silhouette > baseline
            && (rescored - best.silhouette).abs() < 1e-12
            && cells == 50
            && analysis_ok
            && rep.mismatches.is_empty(),
        format!(
            "{} problems, {cells} grid cells; best {} {} k={} silhouette {:.4} > random mean {baseline:.4}; \
             analysis artifacts {analysis_ok}; replay {} of {} hashes equal; run {secs:.1} s, replay {replay_secs:.1} s",
            m.len(),
            best.algorithm,
            best.params,
            best.k,
            best.silhouette,
            rep.checked - rep.mismatches.len(),
            rep.checked
        ),
    );

    // a second independent run, single-threaded, in a fresh directory
    let tmp2 = tempfile::tempdir().unwrap();
    let (run2, _) = desk_run(tmp2.path(), Some(1));
    let a = csv_artifacts(&run);
    let b = csv_artifacts(&run2);
    let differing: Vec<&String> = a.keys().filter(|k| b.get(*k) != a.get(*k)).collect();
    r.check(
        "Determinism",
        !a.is_empty() && a.len() == b.len() && differing.is_empty(),
        format!(
            "{} CSV artifacts compared across two runs (parallel and single-threaded), {} differ",
            a.len(),
            differing.len()
        ),
    );
}

/// Restricted families and target silhouettes for the published representations.
const PUBLISHED: [(&str, &str, f64); 4] = [
    ("ela", "agglomerative k=5..500:5 linkage=ward,average,complete", 0.350519),
    ("deepela", "kmeans k=5..500:5 n_init=10,20", 0.201622),
    ("doe2vec", "kmeans k=5..500:5 n_init=10,20", 0.172239),
    ("transoptas", "agglomerative k=5..500:5 linkage=ward,average,complete", 0.266997),
];

/// Homogeneity, completeness and V-measure against the best portfolio configuration.
const ALIGNMENT: [(&str, &str, [f64; 3]); 8] = [
    ("DE", "ela", [0.0649, 0.0397, 0.0492]),
    ("DE", "deepela", [0.1532, 0.0392, 0.0625]),
    ("DE", "doe2vec", [0.2990, 0.0320, 0.0579]),
    ("DE", "transoptas", [0.0493, 0.0597, 0.0540]),
    ("PSO", "ela", [0.0359, 0.0388, 0.0373]),
    ("PSO", "deepela", [0.0927, 0.0420, 0.0578]),
    ("PSO", "doe2vec", [0.1923, 0.0365, 0.0614]),
    ("PSO", "transoptas", [0.0305, 0.0655, 0.0417]),
];

fn ingestion_mode(r: &mut Report) {
    const NAME: &str = "Ingestion-mode reproduction";
    let files = ["ela.csv", "deepela.csv", "doe2vec.csv", "transoptas.csv", "performance.csv"];
    let Some(dir) = std::env::var_os("LANDMAP_PUBLISHED_DATA").map(PathBuf::from) else {
        r.skip(
            NAME,
            format!(
                "LANDMAP_PUBLISHED_DATA is not set; it should name a directory holding {} keyed by \
                 class_i,class_j,instance,alpha (performance.csv with a portfolio column and five scores)",
                files.join(", ")
            ),
        );
        return;
    };
    let missing: Vec<&str> = files.into_iter().filter(|f| !dir.join(f).exists()).collect();
    if !missing.is_empty() {
        r.skip(NAME, format!("{} lacks {}", dir.display(), missing.join(", ")));
        return;
    }
    let t = Instant::now();
    let m = SuiteManifest::build(&SuiteConfig::default(), &Default::default(), 42).unwrap();
    let perf = match PerformanceTable::read_csv(&dir.join("performance.csv"), Orientation::Lower) {
        Ok(p) => p,
        Err(e) => {
            r.skip(NAME, format!("performance.csv cannot be read: {e}"));
            return;
        }
    };
    let mut ok = true;
    let mut detail = Vec::new();
    let mut labels = BTreeMap::new();
    for (stem, grid, target) in PUBLISHED {
        let raw = match ingest_csv(&dir.join(format!("{stem}.csv")), stem, &m) {
            Ok(raw) => raw,
            Err(e) => {
                r.skip(NAME, format!("{stem}.csv cannot be mapped onto the suite: {e}"));
                return;
            }
        };
        let x = preprocess(&raw, Default::default(), stem == "ela").unwrap();
        let grid = parse_grid(grid, 42).unwrap();
        let best = grid_search(&x.values, &grid, stem, &GridOptions::default()).unwrap().best;
        ok &= (best.silhouette - target).abs() <= 0.02;
        detail.push(format!("{stem} silhouette {:.4} vs {target}", best.silhouette));
        labels.insert(stem, best.labels);
    }
    let keys = m.keys();
    for (portfolio, stem, [h, c, v]) in ALIGNMENT {
        let Some(table) = perf.iter().find(|p| p.portfolio == portfolio) else {
            ok = false;
            detail.push(format!("{portfolio} missing from performance.csv"));
            continue;
        };
        let s = perf_alignment(&labels[stem], &keys, table).unwrap();
        ok &= (s.homogeneity - h).abs() <= 0.02 && (s.completeness - c).abs() <= 0.02 && (s.v_measure - v).abs() <= 0.02;
        detail.push(format!(
            "{portfolio}/{stem} h/c/v {:.4}/{:.4}/{:.4} vs {h}/{c}/{v}",
            s.homogeneity, s.completeness, s.v_measure
        ));
    }
    detail.push(format!("{:.0} s", t.elapsed().as_secs_f64()));
    r.check(NAME, ok, detail.join("; "));
}

fn main() {
    let mut r = Report { rows: Vec::new() };
    suite_counts(&mut r);
    bbob_oracle(&mut r);
    affine_identities(&mut r);
    clustering_oracles(&mut r);
    metric_identities(&mut r);
    end_to_end(&mut r);
    ingestion_mode(&mut r);

    println!("\nacceptance criteria");
    let mut failed = 0;
    for (outcome, name, detail) in &r.rows {
        let tag = match outcome {
            Outcome::Pass => "PASS",
            Outcome::Fail => {
                failed += 1;
                "FAIL"
            }
            Outcome::Skip => "SKIP",
        };
        println!("[{tag}] {name}: {detail}");
    }
    println!("{} criteria, {failed} failed\n", r.rows.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
