use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, Output};

fn sigrep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sigrep")).args(args).output().expect("binary runs")
}

fn read_records(path: &Path) -> Vec<(f64, u64, String, f64)> {
    let mut r = csv::Reader::from_path(path).unwrap();
    assert_eq!(r.headers().unwrap(), vec!["t", "path_id", "series", "value"]);
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            (rec[0].parse().unwrap(), rec[1].parse().unwrap(), rec[2].to_string(), rec[3].parse().unwrap())
        })
        .collect()
}

#[test]
fn check_rejects_level_zero() {
    let out = sigrep(&["check", "--level", "0"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--level"));
}

#[test]
fn check_passes_and_reports_each_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = sigrep(&["check", "--level", "6", "--seed", "7", "--paths", "2000", "--out", d]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("check_report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    let entries = report["entries"].as_array().unwrap();
    let shuffle = entries.iter().find(|e| e["name"] == "shuffle_pathwise").expect("shuffle entry");
    assert_eq!(shuffle["metric"], "max_abs_residual");
    assert!(shuffle["measured"].as_f64().unwrap() < 1e-10);
    for e in entries {
        assert!(e["measured"].is_number() && e["threshold"].is_number(), "{e}");
    }
}

#[test]
fn simulate_rl_has_reference_and_one_series_per_truncation() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = sigrep(&[
        "simulate", "--model", "rl", "--hurst", "0.3", "--eps", "0.019230769230769232", "--truncation", "2,4,8,16",
        "--paths", "1", "--steps", "100", "--out", d,
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let recs = read_records(&dir.path().join("trajectories_rl.csv"));
    let series: BTreeSet<&str> = recs.iter().map(|r| r.2.as_str()).collect();
    assert_eq!(series, BTreeSet::from(["ref", "sig_M2", "sig_M4", "sig_M8", "sig_M16"]));
    assert_eq!(recs.len(), 5 * 101);
    assert!(recs.iter().all(|r| r.1 == 0 && r.3.is_finite()));
    let last_t = recs.iter().map(|r| r.0).fold(0.0, f64::max);
    assert_eq!(last_t, 1.0);
}

#[test]
fn simulate_delay_scenario_a() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = sigrep(&[
        "simulate", "--model", "delay", "--scenario", "a", "--truncation", "2,4,8", "--paths", "2", "--steps", "50",
        "--out", d,
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let recs = read_records(&dir.path().join("trajectories_delay.csv"));
    let series: BTreeSet<&str> = recs.iter().map(|r| r.2.as_str()).collect();
    assert_eq!(series.len(), 1 + 3);
    assert_eq!(recs.len(), 2 * 4 * 51);
}

#[test]
fn outputs_are_byte_identical_across_runs_and_workers() {
    let run = |threads: &str, sub: &str| {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path().to_str().unwrap();
        let args: Vec<&str> = match sub {
            "simulate" => vec![
                "simulate", "--model", "rl", "--hurst", "0.7", "--paths", "3", "--steps", "60", "--seed", "11",
                "--threads", threads, "--out", d,
            ],
            _ => vec![
                "table", "rl-mse", "--paths", "30", "--paths-high", "10", "--steps", "60", "--seed", "11",
                "--threads", threads, "--out", d,
            ],
        };
        let out = sigrep(&args);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let name = if sub == "simulate" { "trajectories_rl.csv" } else { "rl_mse.csv" };
        std::fs::read(dir.path().join(name)).unwrap()
    };
    for sub in ["simulate", "table"] {
        let a = run("1", sub);
        assert_eq!(a, run("1", sub));
        assert_eq!(a, run("3", sub));
    }
}

#[test]
fn table_layout() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = sigrep(&["table", "delay-mse", "--paths", "20", "--paths-high", "5", "--steps", "40", "--out", d]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("delay_mse.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "M,a,b");
    let ms: Vec<&str> = lines[1..].iter().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ms, ["2", "4", "8", "16"]);
    for l in &lines[1..] {
        assert!(l.split(',').skip(1).all(|c| c.parse::<f64>().unwrap() >= 0.0));
    }
    assert!(dir.path().join("delay_mse_stderr.csv").exists());
}

#[test]
fn config_file_is_read() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "model = \"gbm\"\ntruncations = [2, 4]\nsteps = 30\n[gbm]\ny = 1.0\nb1 = 0.1\nb2 = 0.3\n").unwrap();
    let out = sigrep(&["simulate", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(read_records(&dir.path().join("trajectories_gbm.csv")).len(), 3 * 31);

    std::fs::write(&cfg, "unknown_key = 3\n").unwrap();
    assert!(!sigrep(&["simulate", "--config", cfg.to_str().unwrap()]).status.success());
}

#[test]
fn approx_kernel_errors_decrease() {
    let dir = tempfile::tempdir().unwrap();
    let out = sigrep(&["approx-kernel", "--hurst", "0.1", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut r = csv::Reader::from_path(dir.path().join("approx_kernel.csv")).unwrap();
    let errs: Vec<f64> = r.records().map(|rec| rec.unwrap()[4].parse().unwrap()).collect();
    assert_eq!(errs.len(), 4);
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let target = blocker.join("sub");
    let out = sigrep(&["simulate", "--model", "ou", "--steps", "10", "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("creating"));
}
