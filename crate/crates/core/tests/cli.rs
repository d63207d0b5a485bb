//! Command-line contract: exit codes, artifact sets, headers, determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const SMALL: &str =
    "case = aligned_oblique_shock\nnx = 24\nny = 24\nwindow = 8\nmax_iterations = 150\n";

fn shockfv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shockfv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("run.cfg");
    fs::write(&p, text).unwrap();
    p
}

fn run_in(dir: &Path, command: &str, config: &str, out: &str) -> Output {
    let cfg = write_config(dir, config);
    let out = dir.join(out);
    shockfv(&[
        command,
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ])
}

fn listing(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .map(|rd| {
            rd.map(|e| e.unwrap().file_name().into_string().unwrap())
                .collect()
        })
        .unwrap_or_default();
    names.sort();
    names
}

fn data_rows(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(String::from)
        .collect()
}

#[test]
fn run_writes_the_four_artifacts_with_headers() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = format!("{SMALL}limiting = restricted\nk = 0.05\n");
    let out = run_in(tmp.path(), "run", &cfg, "out");
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let dir = tmp.path().join("out");
    assert_eq!(
        listing(&dir),
        [
            "field.csv",
            "mask.csv",
            "report.csv",
            "residual_history.csv"
        ]
    );
    for name in listing(&dir) {
        let text = fs::read_to_string(dir.join(&name)).unwrap();
        let head: Vec<&str> = text.lines().take(6).collect();
        assert!(head[0].starts_with("# config_hash = "), "{name}");
        assert_eq!(head[1], "# case = aligned_oblique_shock");
        assert_eq!(head[2], "# mode = steady");
        assert_eq!(head[4], "# K = 0.05");
        assert_eq!(head[5], "# grid = 24x24");
    }
    assert_eq!(data_rows(&dir.join("field.csv")).len(), 24 * 24);
    assert_eq!(data_rows(&dir.join("mask.csv")).len(), 24 * 24);
    let report = data_rows(&dir.join("report.csv"));
    let regions: Vec<&str> = report
        .iter()
        .map(|r| r.split(',').nth(3).unwrap())
        .collect();
    assert_eq!(regions, ["pre", "post", "overall"]);
}

#[test]
fn optional_outputs_follow_the_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = format!("{SMALL}vtk = true\nline_profile = true\n");
    let out = run_in(tmp.path(), "run", &cfg, "out");
    assert_eq!(out.status.code(), Some(0));
    let names = listing(&tmp.path().join("out"));
    assert!(names.contains(&"density.vtk".to_string()));
    assert_eq!(
        data_rows(&tmp.path().join("out/line_profile.csv")).len(),
        24
    );
}

#[test]
fn malformed_config_is_exit_2_without_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    for (cfg, needle) in [
        (format!("{SMALL}colour = red\n"), "colour"),
        (format!("{SMALL}nx 24\n"), "key = value"),
        (format!("{SMALL}limiting = restricted\n"), "`k`"),
        (format!("{SMALL}window = 40\n"), "window"),
    ] {
        let out = run_in(tmp.path(), "run", &cfg, "out");
        assert_eq!(out.status.code(), Some(2), "{cfg}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(needle), "{err}");
        assert!(!tmp.path().join("out").exists());
    }
}

#[test]
fn missing_config_file_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = shockfv(&[
        "run",
        "--config",
        "/nonexistent/run.cfg",
        "--out",
        tmp.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn refuses_non_empty_output_without_force() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("out");
    fs::create_dir(&dir).unwrap();
    fs::write(dir.join("keep.txt"), "x").unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let args = [
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ];
    assert_eq!(shockfv(&args).status.code(), Some(2));
    assert_eq!(listing(&dir), ["keep.txt"]);
    let mut forced = args.to_vec();
    forced.push("--force");
    assert_eq!(shockfv(&forced).status.code(), Some(0));
    assert_eq!(listing(&dir).len(), 5);
}

#[test]
fn identical_runs_give_identical_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = format!("{SMALL}limiting = restricted\nk = 0.02\n");
    assert_eq!(run_in(tmp.path(), "run", &cfg, "a").status.code(), Some(0));
    assert_eq!(run_in(tmp.path(), "run", &cfg, "b").status.code(), Some(0));
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(listing(&a), listing(&b));
    for name in listing(&a) {
        assert_eq!(
            fs::read(a.join(&name)).unwrap(),
            fs::read(b.join(&name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn flag_writes_one_mask_per_threshold() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = format!("{SMALL}k_list = 0.02, 0.05, 0.1\n");
    let out = run_in(tmp.path(), "flag", &cfg, "out");
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let dir = tmp.path().join("out");
    assert_eq!(
        listing(&dir),
        [
            "flag_summary.csv",
            "mask_K0.02.csv",
            "mask_K0.05.csv",
            "mask_K0.1.csv"
        ]
    );
    let counts: Vec<usize> = data_rows(&dir.join("flag_summary.csv"))
        .iter()
        .map(|r| r.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(counts.len(), 3);
    assert!(counts.windows(2).all(|w| w[0] >= w[1]), "{counts:?}");
    for (k, n) in ["0.02", "0.05", "0.1"].iter().zip(&counts) {
        let flagged = data_rows(&dir.join(format!("mask_K{k}.csv")))
            .iter()
            .filter(|r| r.ends_with(",1"))
            .count();
        assert_eq!(flagged, *n);
    }
}

#[test]
fn flag_without_thresholds_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(tmp.path(), "flag", SMALL, "out");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("k_list"));
}

#[test]
fn compare_keeps_the_listed_order() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = format!("{SMALL}compare = shock_straddle, everywhere, restricted:0.05\n");
    let out = run_in(tmp.path(), "compare", &cfg, "out");
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let dir = tmp.path().join("out");
    let settings: Vec<String> = data_rows(&dir.join("compare.csv"))
        .iter()
        .map(|r| r.split(',').next().unwrap().to_string())
        .collect();
    assert_eq!(
        settings,
        ["shock_straddle", "everywhere", "restricted(K=0.05)"]
    );
    for tag in ["shock_straddle", "everywhere", "restricted_K0.05"] {
        for kind in ["residual_history", "field", "mask", "line_profile"] {
            assert!(
                dir.join(format!("{kind}_{tag}.csv")).exists(),
                "{kind}_{tag}"
            );
        }
    }
    assert_eq!(data_rows(&dir.join("report.csv")).len(), 9);
}

#[test]
fn compare_rejects_mismatched_grids() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = format!("{SMALL}compare = everywhere@24x24, restricted:0.05@32x32\n");
    let out = run_in(tmp.path(), "compare", &cfg, "out");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("mismatched grids"));
}

#[test]
fn unsteady_run_logs_every_step() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg =
        "case = riemann2d\nnx = 32\nny = 32\nlimiting = restricted\nk = 0.05\nfinal_time = 0.05\n";
    let out = run_in(tmp.path(), "run", cfg, "out");
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let dir = tmp.path().join("out");
    let steps = data_rows(&dir.join("unsteady_steps.csv"));
    assert!(!steps.is_empty());
    let last_time: f64 = steps
        .last()
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!((last_time - 0.05).abs() < 1e-12);
    assert_eq!(
        data_rows(&dir.join("residual_history.csv")).len(),
        steps.len()
    );
    assert!(data_rows(&dir.join("report.csv")).is_empty());
}

#[test]
fn cases_list_names_every_case() {
    let out = shockfv(&["cases-list"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for name in shockfv::cases::CASE_NAMES {
        assert!(text.contains(name));
    }
}
