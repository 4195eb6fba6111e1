use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn brwlab(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_brwlab"));
    cmd.args(args);
    if let Some(t) = threads {
        cmd.env("BRWLAB_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn presets_are_listed() {
    let out = brwlab(&["presets"], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["gw-example", "gaussian-brw", "two-point-walk", "deterministic-step", "symmetric-walk"] {
        assert!(text.contains(name), "{name} missing from\n{text}");
    }
}

#[test]
fn analyze_gw_example_reports_theta() {
    let dir = tempfile::tempdir().unwrap();
    let out = brwlab(&["analyze", "--preset", "gw-example", "--seed", "1", "--out", path(dir.path())], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.lines().any(|l| l == "theta=1.5"), "{report}");
    assert!(report.lines().any(|l| l == "verdict=applies"), "{report}");
    assert!(report.lines().any(|l| l == "gamma=0.5"), "{report}");
}

#[test]
fn renewal_deterministic_step_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = brwlab(&["renewal", "--preset", "deterministic-step", "--seed", "4", "--paths", "64", "--out", path(dir.path())], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("renewal.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let (est, exact) = (col("estimate"), col("closed_form"));
    let mut count = 0;
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let (e, c): (f64, f64) = (f[est].parse().unwrap(), f[exact].parse().unwrap());
        assert!((e / c - 1.0).abs() < 1e-12, "{line}");
        count += 1;
    }
    assert_eq!(count, 16);
}

#[test]
fn malformed_config_exits_2_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.conf");
    fs::write(&cfg, "# scenario\nkind = galton-watson\ncount = poisson two\nseed = 1\n").unwrap();
    let out = brwlab(&["analyze", "--config", path(&cfg), "--a", "0.1"], None);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 3: "), "{err}");
}

#[test]
fn seed_is_required() {
    let out = brwlab(&["analyze", "--preset", "gw-example"], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("seed"));
}

#[test]
fn config_file_with_inline_model() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("walk.conf");
    let out_dir = dir.path().join("res");
    fs::write(&cfg, format!("task = analyze\nkind = step\nstep = atoms -1:1 2:2\na = 0.3\nseed = 2\nout = {}\n", out_dir.display())).unwrap();
    let out = brwlab(&["analyze", "--config", path(&cfg)], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = fs::read_to_string(out_dir.join("report.txt")).unwrap();
    assert!(report.contains("finiteness=infinite\ncase=a-iii\n"), "{report}");
    assert!(report.contains("R=0.231049060187\n"), "{report}");
}

#[test]
fn wrong_subject_and_infinite_series_fail_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let out = brwlab(&["brw", "--preset", "symmetric-walk", "--seed", "1", "--out", path(dir.path())], None);
    assert_eq!(out.status.code(), Some(2));
    let out = brwlab(&["renewal", "--preset", "symmetric-walk", "--seed", "1", "--out", path(dir.path())], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("infinite"));
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    for entry in walk(dir) {
        out.push((entry.strip_prefix(dir).unwrap().display().to_string(), fs::read(&entry).unwrap()));
    }
    out.sort();
    out
}

fn walk(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let runs: Vec<Vec<(String, Vec<u8>)>> = ["1", "3"]
        .iter()
        .map(|threads| {
            let dir = tempfile::tempdir().unwrap();
            let brw_dir = dir.path().join("brw");
            let ren_dir = dir.path().join("renewal");
            let out = brwlab(
                &["brw", "--preset", "gaussian-brw", "--seed", "5", "--replicates", "6", "--n-max", "6", "--out", path(&brw_dir)],
                Some(threads),
            );
            assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
            let out = brwlab(
                &["renewal", "--preset", "gaussian-walk", "--seed", "5", "--paths", "9000", "--grid", "0,4,8", "--out", path(&ren_dir)],
                Some(threads),
            );
            assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
            files(dir.path())
        })
        .collect();
    assert_eq!(runs[0].len(), 6 + 2 + 1);
    assert_eq!(runs[0], runs[1]);
}
