//! End-to-end tests of the binary: exit codes, emitted files, and
//! byte-level determinism across runs and worker counts.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_specsearch"))
}

fn repo_file(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

/// Small four-variable dataset: one source driving two correlated
/// children, one of which drives a leaf.
fn demo_csv(dir: &Path, rows: usize) -> PathBuf {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    let mut out = String::from("w,x,y,z\n");
    let mut normal = || {
        // Box-Muller from two uniforms
        let (u1, u2): (f64, f64) = (rng.gen_range(1e-9..1.0), rng.gen_range(0.0..1.0));
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    };
    for _ in 0..rows {
        let w = normal();
        let x = 1.2 * w + normal();
        let y = -1.1 * w + normal();
        let z = 0.9 * y + normal();
        out.push_str(&format!("{w:.6},{x:.6},{y:.6},{z:.6}\n"));
    }
    write(dir, "data.csv", &out)
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const OUTPUT_FILES: [&str; 5] = [
    "edge_stability.csv",
    "path_stability.csv",
    "bic_curve.csv",
    "model.dot",
    "summary.json",
];

#[test]
fn search_writes_all_outputs_and_reports_thresholds() {
    let tmp = tempfile::tempdir().unwrap();
    let data = demo_csv(tmp.path(), 120);
    let out_dir = tmp.path().join("out");
    let run = bin()
        .args(["search", "--data"])
        .arg(&data)
        .args(["--subsets", "8", "--generations", "4", "--population", "20"])
        .args(["--seed", "5", "--out"])
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(run.status.success(), "stderr: {}", stderr(&run));
    for name in OUTPUT_FILES {
        assert!(out_dir.join(name).exists(), "{name} missing");
    }
    let text = stdout(&run);
    assert!(text.contains("pi_sel: 0.6"));
    assert!(text.contains("pi_bic:"));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["thresholds"]["pi_sel"], 0.6);
    assert_eq!(summary["seed"], 5);
    let header = std::fs::read_to_string(out_dir.join("edge_stability.csv")).unwrap();
    assert!(header.starts_with("complexity,var_a,var_b,probability,n_models\n"));
}

#[test]
fn search_rejects_constraint_with_unknown_column() {
    let tmp = tempfile::tempdir().unwrap();
    let data = demo_csv(tmp.path(), 120);
    let constraints = write(tmp.path(), "c.txt", "# knowledge\nw -/-> nosuch\n");
    let run = bin()
        .args(["search", "--data"])
        .arg(&data)
        .arg("--constraints")
        .arg(&constraints)
        .args(["--seed", "5"])
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(2));
    let err = stderr(&run);
    assert!(err.contains("line 2"), "diagnostic was: {err}");
    assert!(err.contains("nosuch"));
}

#[test]
fn search_rejects_malformed_csv_cell_with_line() {
    let tmp = tempfile::tempdir().unwrap();
    let data = write(tmp.path(), "bad.csv", "a,b\n1,2\n3,4\n5,x\n6,7\n8,9\n");
    let run = bin()
        .args(["search", "--data"])
        .arg(&data)
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(2));
    assert!(stderr(&run).contains("line 4"));
}

#[test]
fn search_exits_three_when_most_subsets_fail() {
    let tmp = tempfile::tempdir().unwrap();
    // third column is an exact linear combination: every subsample's
    // covariance is singular
    let mut csv = String::from("a,b,c\n");
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for _ in 0..60 {
        let a: f64 = rng.gen_range(-1.0..1.0);
        let b: f64 = rng.gen_range(-1.0..1.0);
        csv.push_str(&format!("{a},{b},{}\n", a + b));
    }
    let data = write(tmp.path(), "singular.csv", &csv);
    let run = bin()
        .args(["search", "--data"])
        .arg(&data)
        .args(["--subsets", "5", "--generations", "2", "--population", "10", "--seed", "1"])
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(3), "stderr: {}", stderr(&run));
}

#[test]
fn search_outputs_are_byte_identical_across_runs_and_workers() {
    let tmp = tempfile::tempdir().unwrap();
    let data = demo_csv(tmp.path(), 120);
    let constraints = write(tmp.path(), "c.txt", "z -/-> w\n");
    let run_with = |label: &str, workers: &str| {
        let out_dir = tmp.path().join(label);
        let run = bin()
            .args(["search", "--data"])
            .arg(&data)
            .arg("--constraints")
            .arg(&constraints)
            .args(["--subsets", "10", "--generations", "4", "--population", "20"])
            .args(["--seed", "42", "--workers", workers, "--out"])
            .arg(&out_dir)
            .output()
            .unwrap();
        assert!(run.status.success(), "stderr: {}", stderr(&run));
        out_dir
    };
    let a = run_with("first", "1");
    let b = run_with("second", "8");
    for name in OUTPUT_FILES {
        let file_a = std::fs::read(a.join(name)).unwrap();
        let file_b = std::fs::read(b.join(name)).unwrap();
        assert_eq!(file_a, file_b, "{name} differs");
    }
}

#[test]
fn benchmark_reports_all_four_auc_entries() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("bench");
    let run = bin()
        .args(["benchmark", "--truth"])
        .arg(repo_file("data/waste_incinerator.json"))
        .args(["--reps", "2", "--samples", "400", "--subsets", "6"])
        .args(["--generations", "4", "--population", "20", "--seed", "4", "--out"])
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(run.status.success(), "stderr: {}", stderr(&run));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert!(report["auc"]["averaging"]["edge"].is_f64());
    assert!(report["auc"]["averaging"]["path"].is_f64());
    assert_eq!(report["auc"]["individual"]["edge"].as_array().unwrap().len(), 2);
    assert_eq!(report["auc"]["individual"]["path"].as_array().unwrap().len(), 2);
    assert!(out_dir.join("roc_edge.csv").exists());
    assert!(out_dir.join("roc_path.csv").exists());
    let roc = std::fs::read_to_string(out_dir.join("roc_edge.csv")).unwrap();
    assert!(roc.starts_with("fpr,tpr\n0,0\n"));
}

#[test]
fn benchmark_rejects_malformed_truth_json() {
    let tmp = tempfile::tempdir().unwrap();
    let truth = write(tmp.path(), "bad.json", "{ not json");
    let run = bin()
        .args(["benchmark", "--truth"])
        .arg(&truth)
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn convert_labels_collider_and_propagates() {
    let tmp = tempfile::tempdir().unwrap();
    let graph = write(tmp.path(), "g.txt", "a -> c\nb -> c\nc -> d\ne\n");
    let run = bin().args(["convert", "--graph"]).arg(&graph).output().unwrap();
    assert!(run.status.success());
    let dot = stdout(&run);
    assert!(dot.contains("\"a\" -> \"c\";"));
    assert!(dot.contains("\"b\" -> \"c\";"));
    assert!(dot.contains("\"c\" -> \"d\";"));
    assert!(dot.contains("\"e\";"));
    assert!(!dot.contains("dir=none"));
}

#[test]
fn convert_respects_constraints_on_chains() {
    let tmp = tempfile::tempdir().unwrap();
    let graph = write(tmp.path(), "g.txt", "a -> b\nb -> c\n");
    let unconstrained = bin().args(["convert", "--graph"]).arg(&graph).output().unwrap();
    assert!(stdout(&unconstrained).contains("\"a\" -> \"b\" [dir=none];"));

    let constraints = write(tmp.path(), "c.txt", "b -/-> a\n");
    let out_file = tmp.path().join("out.dot");
    let constrained = bin()
        .args(["convert", "--graph"])
        .arg(&graph)
        .arg("--constraints")
        .arg(&constraints)
        .arg("--out")
        .arg(&out_file)
        .output()
        .unwrap();
    assert!(constrained.status.success());
    let dot = std::fs::read_to_string(&out_file).unwrap();
    // the pre-labeled arc plus downstream propagation
    assert!(dot.contains("\"a\" -> \"b\";"));
    assert!(dot.contains("\"b\" -> \"c\";"));
}

#[test]
fn convert_rejects_cyclic_input() {
    let tmp = tempfile::tempdir().unwrap();
    let graph = write(tmp.path(), "g.txt", "a -> b\nb -> a\n");
    let run = bin().args(["convert", "--graph"]).arg(&graph).output().unwrap();
    assert_eq!(run.status.code(), Some(2));
}
