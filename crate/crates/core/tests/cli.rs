use std::path::Path;
use std::process::Command;

fn defer_lab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_defer-lab"))
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn dataset_gen_writes_expected_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mix.csv");
    let status = defer_lab().args(["dataset", "gen", "mixture", "50", "3"]).arg(&out).status().unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.starts_with("x_0,x_1,"));
    assert!(header.ends_with("x_19,y,m"));
    assert_eq!(text.lines().count(), 51);
    let back = defer_lab::harness::dataset::read_csv(text.as_bytes()).unwrap();
    assert!(back.iter().all(|s| (1..=10).contains(&s.y) && s.m.is_some()));
}

#[test]
fn dataset_gen_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = ["a.csv", "b.csv", "c.csv"].iter().map(|n| dir.path().join(n)).collect();
    for (p, seed) in paths.iter().zip(["1", "1", "2"]) {
        assert!(defer_lab().args(["dataset", "gen", "fig4", "100", seed]).arg(p).status().unwrap().success());
    }
    let read = |p: &Path| std::fs::read(p).unwrap();
    assert_eq!(read(&paths[0]), read(&paths[1]));
    assert_ne!(read(&paths[0]), read(&paths[2]));
}

#[test]
fn unknown_world_and_bad_config_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let status = defer_lab().args(["dataset", "gen", "moon", "5", "0"]).arg(dir.path().join("x.csv")).status().unwrap();
    assert_eq!(status.code(), Some(2));
    let cfg = write(dir.path(), "bad.toml", "[experiment]\nkind = \"theorem1\"\ntypo = 3\n");
    assert_eq!(defer_lab().arg("run").arg(&cfg).status().unwrap().code(), Some(2));
    let status = defer_lab().args(["verify", "--suite", "nope"]).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn run_writes_identical_csv_twice() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "mc.toml",
        "[experiment]\nkind = \"model_complexity\"\nrandom_worlds = 30\n[hypotheses]\nd_values = [1, 2, 3]\n",
    );
    for sub in ["a", "b"] {
        let status = defer_lab().arg("run").arg(&cfg).arg("--out").arg(dir.path().join(sub)).status().unwrap();
        assert!(status.success());
    }
    let a = std::fs::read_to_string(dir.path().join("a/model_complexity.csv")).unwrap();
    let b = std::fs::read_to_string(dir.path().join("b/model_complexity.csv")).unwrap();
    assert_eq!(a, b);
    let mut lines = a.lines();
    assert_eq!(lines.next(), Some("classifier_class_size,joint_minus_staged_accuracy_gap,stderr"));
    let gaps: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    // Lightest point mass of the gap world: 0.9 / (d + 1).
    for (d, g) in gaps.iter().enumerate() {
        assert!((g - 0.9 / (d as f64 + 2.0)).abs() < 1e-12);
    }
}

#[test]
fn failing_check_exits_with_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "g.toml", "[experiment]\nkind = \"gradient_check\"\ntrials = 5\nflip_sign = true\n");
    let status = defer_lab().arg("run").arg(&cfg).arg("--out").arg(dir.path()).status().unwrap();
    assert_eq!(status.code(), Some(1));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("gradient_check.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], false);
}

#[test]
fn verify_single_suite_reports_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let status = defer_lab().args(["verify", "--suite", "theorem1", "--out"]).arg(&out).status().unwrap();
    assert!(status.success());
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["suites"].as_array().unwrap().len(), 1);
}
