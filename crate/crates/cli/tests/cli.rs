//! End-to-end runs of the `gel` binary: exit codes, report schema,
//! determinism, and the wire formats.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gel_cli::npy::{read_npy, write_npy};
use gel_cli::report::Report;
use gel_core::linalg::Mat;
use gel_core::rng::Rng;

fn gel() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gel"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = gel().args(args).output().expect("spawn gel");
    assert!(
        out.status.success(),
        "gel {:?} failed:\n{}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn report_from(out: &Output) -> Report {
    serde_json::from_slice(&out.stdout).expect("report JSON on stdout")
}

fn write_matrix(dir: &Path, name: &str, rows: &[Vec<f64>]) -> PathBuf {
    let path = dir.join(name);
    write_npy(&path, &Mat::from_rows(rows).unwrap()).unwrap();
    path
}

fn randn_file(dir: &Path, name: &str, n: usize, d: usize, seed: u64) -> PathBuf {
    let mut rng = Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.normal()).collect()).collect();
    write_matrix(dir, name, &rows)
}

#[test]
fn npy_files_round_trip_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let m = Mat::from_rows(&[vec![1.5, -0.0, 3e-308], vec![f64::MAX, -1.0, 0.25]]).unwrap();
    let path = dir.path().join("x.npy");
    write_npy(&path, &m).unwrap();
    let back = read_npy(&path).unwrap();
    for (a, b) in m.data().iter().zip(back.data()) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
}

#[test]
fn mean_test_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let data = randn_file(dir.path(), "data.npy", 60, 3, 1);
    let model = randn_file(dir.path(), "model.npy", 80, 3, 2);
    let report_path = dir.path().join("report.json");

    let out = run_ok(&[
        "mean-test",
        "--data",
        data.to_str().unwrap(),
        "--model",
        model.to_str().unwrap(),
        "--divergence",
        "et",
        "--out",
        report_path.to_str().unwrap(),
    ]);
    // Summary line lands on stdout when writing to a file.
    assert!(String::from_utf8_lossy(&out.stdout).contains("status="));

    let report: Report = serde_json::from_str(&fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report.status, "Converged");
    let weights = report.weights_data.expect("weights in report");
    let sum: f64 = weights.weights.iter().sum();
    assert!((sum - 1.0).abs() < 1e-9);
    assert_eq!(weights.ids.len(), 60);
    assert!(report.score_value.is_some());
    assert!(report.divergence_nats.is_some());
}

#[test]
fn kgel2_on_identical_files_scores_one() {
    let dir = tempfile::tempdir().unwrap();
    let data = randn_file(dir.path(), "data.npy", 150, 4, 3);
    let pool = randn_file(dir.path(), "pool.npy", 100, 4, 4);

    let out = run_ok(&[
        "kgel2",
        "--data",
        data.to_str().unwrap(),
        "--model",
        data.to_str().unwrap(),
        "--witness-pool",
        pool.to_str().unwrap(),
        "--witness-count",
        "16",
        "--seed",
        "9",
    ]);
    let report = report_from(&out);
    assert_eq!(report.status, "Converged");
    let sm = report.score_model.unwrap();
    let sd = report.score_data.unwrap();
    assert!((sm - 1.0).abs() <= 0.001, "model score {sm}");
    assert!((sd - 1.0).abs() <= 0.001, "data score {sd}");
    assert_eq!(report.score, "1.000/1.000");
}

#[test]
fn hull_failure_is_a_completed_run() {
    let dir = tempfile::tempdir().unwrap();
    // Data in [0, 1], model mean at 5: outside the hull.
    let data = write_matrix(dir.path(), "data.npy", &[vec![0.0], vec![0.5], vec![1.0]]);
    let model = write_matrix(dir.path(), "model.npy", &[vec![5.0], vec![5.0]]);

    let out = run_ok(&[
        "mean-test",
        "--data",
        data.to_str().unwrap(),
        "--model",
        model.to_str().unwrap(),
        "--divergence",
        "el",
    ]);
    let report = report_from(&out);
    assert_eq!(report.status, "HullFail");
    assert_eq!(report.score, "+inf");
    assert!(report.score_value.is_none());
    assert!(report.divergence_nats.is_none());
}

#[test]
fn reports_are_byte_identical_modulo_timing() {
    let dir = tempfile::tempdir().unwrap();
    let data = randn_file(dir.path(), "data.npy", 50, 3, 5);
    let model = randn_file(dir.path(), "model.npy", 50, 3, 6);
    let pool = randn_file(dir.path(), "pool.npy", 40, 3, 7);

    let args = [
        "kgel",
        "--data",
        data.to_str().unwrap(),
        "--model",
        model.to_str().unwrap(),
        "--witness-pool",
        pool.to_str().unwrap(),
        "--witness-count",
        "8",
        "--seed",
        "17",
    ];
    let mut canonical = Vec::new();
    for _ in 0..2 {
        let out = run_ok(&args);
        let mut report = report_from(&out);
        report.timing_ms = 0.0;
        canonical.push(report.to_json());
    }
    assert_eq!(canonical[0], canonical[1]);
}

#[test]
fn labeled_test_without_labels_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let data = randn_file(dir.path(), "data.npy", 20, 2, 8);
    let pool = randn_file(dir.path(), "pool.npy", 20, 2, 9);

    let out = gel()
        .args([
            "label-test",
            "--data",
            data.to_str().unwrap(),
            "--model",
            data.to_str().unwrap(),
            "--witness-pool",
            pool.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("labels"));
}

#[test]
fn missing_file_is_a_config_error() {
    let out = gel()
        .args(["mean-test", "--data", "/nonexistent/x.npy", "--model", "/nonexistent/y.npy"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn csv_input_works() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    fs::write(&data, "x,y\n1,2\n3,4\n-1,0\n2,-2\n").unwrap();
    let model = dir.path().join("model.csv");
    fs::write(&model, "1,1\n2,1\n1,2\n").unwrap();

    let out = run_ok(&[
        "mean-test",
        "--data",
        data.to_str().unwrap(),
        "--model",
        model.to_str().unwrap(),
        "--divergence",
        "euclidean",
    ]);
    let report = report_from(&out);
    assert_eq!(report.status, "Converged");
    assert!(report.hotelling_t2.is_some());
}

#[test]
fn rank_lists_lowest_weights_first() {
    let dir = tempfile::tempdir().unwrap();
    let data = randn_file(dir.path(), "data.npy", 40, 2, 10);
    let model = randn_file(dir.path(), "model.npy", 40, 2, 11);

    let out = run_ok(&[
        "rank",
        "--data",
        data.to_str().unwrap(),
        "--model",
        model.to_str().unwrap(),
        "--bottom-k",
        "5",
    ]);
    let report = report_from(&out);
    let ranking = report.ranking.expect("ranking");
    assert_eq!(ranking.len(), 5);
    for pair in ranking.windows(2) {
        assert!(pair[0].1 <= pair[1].1);
    }
}

#[test]
fn mode_report_aggregates_and_scores_against_oracle() {
    let dir = tempfile::tempdir().unwrap();
    // Two well-separated classes; the model misses class "1".
    let mut rng = Rng::seed_from_u64(12);
    let mut data_rows = Vec::new();
    let mut data_labels = String::new();
    for i in 0..60 {
        let off = if i % 2 == 0 { 0.0 } else { 8.0 };
        data_rows.push(vec![off + rng.normal(), off + rng.normal()]);
        data_labels.push_str(if i % 2 == 0 { "0\n" } else { "1\n" });
    }
    let model_rows: Vec<Vec<f64>> =
        (0..80).map(|_| vec![rng.normal(), rng.normal()]).collect();
    let pool_rows: Vec<Vec<f64>> = (0..60)
        .map(|i| {
            let off = if i % 2 == 0 { 0.0 } else { 8.0 };
            vec![off + rng.normal(), off + rng.normal()]
        })
        .collect();

    let data = write_matrix(dir.path(), "data.npy", &data_rows);
    let model = write_matrix(dir.path(), "model.npy", &model_rows);
    let pool = write_matrix(dir.path(), "pool.npy", &pool_rows);
    let labels = dir.path().join("labels.txt");
    fs::write(&labels, data_labels).unwrap();

    let out = run_ok(&[
        "mode-report",
        "--data",
        data.to_str().unwrap(),
        "--model",
        model.to_str().unwrap(),
        "--witness-pool",
        pool.to_str().unwrap(),
        "--witness-count",
        "12",
        "--labels-data",
        labels.to_str().unwrap(),
        "--dropped",
        "1",
        "--rescale-present",
        "1",
    ]);
    let report = report_from(&out);
    assert_eq!(report.status, "Converged");
    let class_report = report.class_report.expect("class report");
    let mass1 = class_report.class_mass["1"];
    assert!(mass1 < 0.02, "dropped-class mass {mass1}");
    let h = class_report.hellinger_to_oracle.expect("hellinger");
    assert!(h < 0.2, "hellinger {h}");
}

#[test]
fn per_class_mode_reports_each_class() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = Rng::seed_from_u64(13);
    let mk_rows = |n: usize, rng: &mut Rng| -> (Vec<Vec<f64>>, String) {
        let mut rows = Vec::new();
        let mut labels = String::new();
        for i in 0..n {
            let off = if i % 2 == 0 { 0.0 } else { 6.0 };
            rows.push(vec![off + rng.normal(), off + rng.normal()]);
            labels.push_str(if i % 2 == 0 { "a\n" } else { "b\n" });
        }
        (rows, labels)
    };
    let (data_rows, data_labels) = mk_rows(60, &mut rng);
    let (model_rows, model_labels) = mk_rows(60, &mut rng);
    let (pool_rows, pool_labels) = mk_rows(80, &mut rng);

    let data = write_matrix(dir.path(), "data.npy", &data_rows);
    let model = write_matrix(dir.path(), "model.npy", &model_rows);
    let pool = write_matrix(dir.path(), "pool.npy", &pool_rows);
    for (name, contents) in [
        ("ld.txt", &data_labels),
        ("lm.txt", &model_labels),
        ("lw.txt", &pool_labels),
    ] {
        fs::write(dir.path().join(name), contents).unwrap();
    }

    let out = run_ok(&[
        "mode-report",
        "--data",
        data.to_str().unwrap(),
        "--model",
        model.to_str().unwrap(),
        "--witness-pool",
        pool.to_str().unwrap(),
        "--witness-count",
        "10",
        "--labels-data",
        dir.path().join("ld.txt").to_str().unwrap(),
        "--labels-model",
        dir.path().join("lm.txt").to_str().unwrap(),
        "--labels-witness",
        dir.path().join("lw.txt").to_str().unwrap(),
        "--per-class",
    ]);
    let report = report_from(&out);
    let per_class = report.per_class.expect("per-class entries");
    assert_eq!(per_class.len(), 2);
    let classes: Vec<&str> = per_class.iter().map(|e| e.class.as_str()).collect();
    assert_eq!(classes, vec!["a", "b"]);
    for entry in &per_class {
        assert_eq!(entry.status, "Converged");
        assert_eq!(entry.n_data, 30);
    }
}

#[test]
fn bench_reports_timings() {
    let out = run_ok(&[
        "bench",
        "--n",
        "300",
        "--dim",
        "4",
        "--witness-count",
        "8",
        "--seed",
        "21",
    ]);
    let report = report_from(&out);
    let bench = report.bench.expect("bench section");
    assert_eq!(bench.n, 300);
    assert_eq!(bench.witness_count, 8);
    assert!(bench.solve_ms >= 0.0);
    assert!(report.timing_ms > 0.0);
    assert_eq!(report.status, "Converged");
}

#[test]
fn user_moments_flow_through_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let data = randn_file(dir.path(), "data.npy", 5, 2, 22);
    // All-zero moment rows: uniform weights regardless of the features.
    let moments = write_matrix(dir.path(), "m.npy", &vec![vec![0.0, 0.0]; 5]);

    let out = run_ok(&[
        "mean-test",
        "--data",
        data.to_str().unwrap(),
        "--moments",
        moments.to_str().unwrap(),
        "--divergence",
        "el",
    ]);
    let report = report_from(&out);
    assert_eq!(report.status, "Converged");
    for w in &report.weights_data.unwrap().weights {
        assert!((w - 0.2).abs() < 1e-12);
    }
}

#[test]
fn hull_check_reports_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_matrix(dir.path(), "data.npy", &[vec![0.0], vec![1.0], vec![2.0]]);
    let inside_model = write_matrix(dir.path(), "m_in.npy", &[vec![1.0]]);
    let outside_model = write_matrix(dir.path(), "m_out.npy", &[vec![9.0]]);

    let out = run_ok(&[
        "hull-check",
        "--data",
        data.to_str().unwrap(),
        "--model",
        inside_model.to_str().unwrap(),
    ]);
    assert_eq!(report_from(&out).hull.unwrap().verdict, "inside");

    let out = run_ok(&[
        "hull-check",
        "--data",
        data.to_str().unwrap(),
        "--model",
        outside_model.to_str().unwrap(),
    ]);
    let report = report_from(&out);
    assert_eq!(report.hull.unwrap().verdict, "outside");
    assert_eq!(report.score, "+inf");
}

#[test]
fn no_weights_flag_omits_them() {
    let dir = tempfile::tempdir().unwrap();
    let data = randn_file(dir.path(), "data.npy", 30, 2, 40);
    let model = randn_file(dir.path(), "model.npy", 30, 2, 41);
    let out = run_ok(&[
        "mean-test",
        "--data",
        data.to_str().unwrap(),
        "--model",
        model.to_str().unwrap(),
        "--no-weights",
    ]);
    let report = report_from(&out);
    assert!(report.weights_data.is_none());
    assert!(report.beta_zero_data.is_some()); // counts survive the flag
}

#[test]
fn label_test_with_hierarchy_kernel_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = Rng::seed_from_u64(50);
    let mk = |n: usize, rng: &mut Rng| -> (Vec<Vec<f64>>, String) {
        let mut rows = Vec::new();
        let mut labels = String::new();
        for i in 0..n {
            // Keep exponents O(1): the label kernel does the separating.
            let off = if i % 2 == 0 { -1.0 } else { 1.0 };
            rows.push(vec![off + 0.5 * rng.normal(), off + 0.5 * rng.normal()]);
            labels.push_str(if i % 2 == 0 { "collie\n" } else { "mug\n" });
        }
        (rows, labels)
    };
    let (data_rows, data_labels) = mk(40, &mut rng);
    let (model_rows, model_labels) = mk(40, &mut rng);
    let (pool_rows, pool_labels) = mk(40, &mut rng);
    let data = write_matrix(dir.path(), "data.npy", &data_rows);
    let model = write_matrix(dir.path(), "model.npy", &model_rows);
    let pool = write_matrix(dir.path(), "pool.npy", &pool_rows);
    for (name, text) in [("ld", data_labels), ("lm", model_labels), ("lw", pool_labels)] {
        fs::write(dir.path().join(format!("{name}.txt")), text).unwrap();
    }
    let hierarchy = dir.path().join("hier.json");
    fs::write(
        &hierarchy,
        r#"{"collie": ["animal", "dog", "collie"], "mug": ["artifact", "mug"]}"#,
    )
    .unwrap();

    let out = run_ok(&[
        "label-test",
        "--data",
        data.to_str().unwrap(),
        "--model",
        model.to_str().unwrap(),
        "--witness-pool",
        pool.to_str().unwrap(),
        "--witness-count",
        "10",
        "--labels-data",
        dir.path().join("ld.txt").to_str().unwrap(),
        "--labels-model",
        dir.path().join("lm.txt").to_str().unwrap(),
        "--labels-witness",
        dir.path().join("lw.txt").to_str().unwrap(),
        "--hierarchy",
        hierarchy.to_str().unwrap(),
    ]);
    let report = report_from(&out);
    assert_eq!(report.status, "Converged");
}

#[test]
fn pca_flag_preserves_mean_test_weights() {
    let dir = tempfile::tempdir().unwrap();
    let data = randn_file(dir.path(), "data.npy", 40, 3, 30);
    let model = randn_file(dir.path(), "model.npy", 40, 3, 31);

    let base_args = [
        "mean-test",
        "--data",
        data.to_str().unwrap(),
        "--model",
        model.to_str().unwrap(),
        "--tol",
        "1e-11",
    ];
    let plain = report_from(&run_ok(&base_args));
    let mut with_pca: Vec<&str> = base_args.to_vec();
    with_pca.push("--pca");
    let pca = report_from(&run_ok(&with_pca));

    let a = plain.weights_data.unwrap().weights;
    let b = pca.weights_data.unwrap().weights;
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-6);
    }
}
