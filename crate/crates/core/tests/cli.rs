mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn zo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zoperturb"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn run_files(dir: &Path) -> Vec<Vec<u8>> {
    ["report.json", "curve.csv", "resources.json"]
        .iter()
        .map(|f| fs::read(dir.join(f)).unwrap())
        .collect()
}

#[test]
fn gaussian_run_converges_with_curve_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = common::write(
        tmp.path(),
        "q.toml",
        &common::quadratic_toml(&out, "gaussian", 2000),
    );
    let o = zo(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("diverged=false"), "{stdout}");

    let curve = fs::read_to_string(out.join("curve.csv")).unwrap();
    let mut lines = curve.lines();
    assert_eq!(lines.next(), Some("step,loss,metric"));
    assert_eq!(lines.count(), 2000 / 50);

    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["diverged"], false);
    assert!(report["final_loss"].as_f64().unwrap() < 1e-2);
}

#[test]
fn raw_integer_run_exits_diverged() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = common::write(
        tmp.path(),
        "q.toml",
        &common::quadratic_toml(&out, "uniform-int", 2000),
    );
    let o = zo(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["diverged"], true);
}

#[test]
fn repeated_runs_emit_identical_files() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for (name, out) in [("a.toml", &a), ("b.toml", &b)] {
        let cfg = common::write(
            tmp.path(),
            name,
            &common::logistic_toml(out, "otf", 300, &[]),
        );
        assert_eq!(code(&zo(&["run", "--config", cfg.to_str().unwrap()])), 0);
    }
    assert_eq!(run_files(&a), run_files(&b));
}

#[test]
fn missing_dataset_names_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let text = common::quadratic_toml(tmp.path(), "gaussian", 10).replace(
        "kind = \"quadratic\"\nd = 20\ninit = 5.0",
        "kind = \"logistic\"\n\n[task.data]\nsource = \"csv\"\npath = \"nope.csv\"\nlabel_column = \"y\"",
    );
    let cfg = common::write(tmp.path(), "bad.toml", &text);
    let o = zo(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("task.data.path"));
}

#[test]
fn usage_errors_exit_three() {
    assert_eq!(code(&zo(&["run"])), 3);
    assert_eq!(code(&zo(&["frobnicate"])), 3);
    let tmp = tempfile::tempdir().unwrap();
    let cfg = common::write(
        tmp.path(),
        "q.toml",
        &common::quadratic_toml(tmp.path(), "pool", 10),
    );
    let o = zo(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--axis",
        "width",
        "--values",
        "1",
    ]);
    assert_eq!(code(&o), 3);
    assert_eq!(code(&zo(&["--help"])), 0);
}

#[test]
fn sweep_and_compare_write_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("sw");
    let cfg = common::write(
        tmp.path(),
        "p.toml",
        &common::logistic_toml(&out, "pool", 100, &[1, 2]),
    );
    let o = zo(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--axis",
        "pool_size",
        "--values",
        "255,1023",
        "--seeds",
        "4,5",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 2);
    assert!(out.join("runs/pool_size=1023_seed=5.json").is_file());
    assert!(out.join("sweep.csv").is_file());

    let other = common::write(
        tmp.path(),
        "g.toml",
        &common::logistic_toml(&out, "gaussian", 100, &[1, 2]),
    );
    let list = format!("{},{}", cfg.display(), other.display());
    let o = zo(&["compare", "--configs", &list]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("compare/compare.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 2);

    let quad = common::write(
        tmp.path(),
        "q.toml",
        &common::quadratic_toml(&out, "pool", 10),
    );
    let list = format!("{},{}", cfg.display(), quad.display());
    let o = zo(&["compare", "--configs", &list]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("task"));
}

#[test]
fn resources_and_lut_dump_print() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = common::write(
        tmp.path(),
        "o.toml",
        &common::logistic_toml(tmp.path(), "otf", 10, &[]),
    );
    let o = zo(&["resources", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["generator_count"], 7);

    let o = zo(&["lut", "dump", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        String::from_utf8(o.stdout).unwrap().lines().count(),
        1 + 2 * 255
    );
}

#[test]
fn rng_emit_prints_words() {
    let o = zo(&[
        "rng", "emit", "--bits", "4", "--taps", "4,3", "--seed", "1", "--count", "15",
    ]);
    assert_eq!(code(&o), 0);
    let words: Vec<u32> = String::from_utf8(o.stdout)
        .unwrap()
        .lines()
        .map(|l| l.parse().unwrap())
        .collect();
    assert_eq!(&words[..4], &[2, 4, 9, 3]);
    assert_eq!(*words.last().unwrap(), 1);
    let mut sorted = words.clone();
    sorted.sort_unstable();
    assert_eq!(sorted, (1..=15).collect::<Vec<_>>());

    assert_eq!(code(&zo(&["rng", "emit", "--bits", "8", "--seed", "0"])), 3);
}
