use std::path::{Path, PathBuf};
use std::process::Command;

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn thermoflow(args: &[&str], threads: Option<&str>) -> std::process::Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_thermoflow"));
    cmd.args(args).env_remove("THERMOFLOW_THREADS");
    if let Some(t) = threads {
        cmd.env("THERMOFLOW_THREADS", t);
    }
    cmd.output().unwrap()
}

fn run_ok(command: &str, cfg: &Path, out: &Path) {
    let o = thermoflow(&[command, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], None);
    assert!(o.status.success(), "{command}: {}", String::from_utf8_lossy(&o.stderr));
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    (header, lines.map(|l| l.split(',').map(String::from).collect()).collect())
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

fn binomial_tail(n: u64, eps: f64) -> f64 {
    let mut c = 1.0f64;
    let mut total = 0.0;
    for k in 0..=n {
        if (k as f64 / n as f64 - 0.5).abs() >= eps - 1e-12 {
            total += c;
        }
        c = c * (n - k) as f64 / (k + 1) as f64;
    }
    total / 2f64.powi(n as i32)
}

#[test]
fn ld_run_reproduces_binomial_tails() {
    let dir = tempfile::tempdir().unwrap();
    run_ok("theorem1", &config("binomial.json"), dir.path());
    let (header, rows) = read_csv(&dir.path().join("theorem1.csv"));
    assert_eq!(
        header,
        ["t", "Z_exact", "Z_mc", "mc_stderr", "bound_thm1", "bound_prop32", "X", "Y", "T0", "D", "epsilon"]
    );
    let (t, z, mc, se) = (column(&header, "t"), column(&header, "Z_exact"), column(&header, "Z_mc"), column(&header, "mc_stderr"));
    for row in &rows {
        let n: u64 = row[t].parse().unwrap();
        let exact: f64 = row[z].parse().unwrap();
        assert!((exact - binomial_tail(n, 0.3)).abs() < 1e-14, "t = {n}");
        let (m, s): (f64, f64) = (row[mc].parse().unwrap(), row[se].parse().unwrap());
        assert!((m - exact).abs() <= 4.0 * s.max(1e-3), "t = {n}: {m} vs {exact}");
    }
}

#[test]
fn escape_run_on_uniform_shift_has_gamma_half_and_w_two() {
    let dir = tempfile::tempdir().unwrap();
    run_ok("theorem2", &config("escape_uniform.json"), dir.path());
    let (header, rows) = read_csv(&dir.path().join("escape.csv"));
    assert_eq!(header.len(), 17);
    assert_eq!(header[12..], ["nested_1", "nested_2", "nested_3", "nested_4", "nested_5"]);
    for row in &rows {
        assert_eq!(row[column(&header, "gamma")], "0.5");
        assert_eq!(row[column(&header, "W")], "2");
        assert_eq!(row[column(&header, "lower_bound")], "0.25");
        let mu: f64 = row[column(&header, "mu_In")].parse().unwrap();
        let slab: f64 = row[column(&header, "nu_slab")].parse().unwrap();
        assert_eq!(mu, slab);
    }
    assert!(dir.path().join("escape_diagnostics.csv").exists());
}

#[test]
fn missing_block_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = thermoflow(
        &["theorem2", "--config", config("golden_mean.json").to_str().unwrap(), "--out", dir.path().to_str().unwrap()],
        None,
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing escape block"));
    assert!(!dir.path().join("manifest.json").exists());
}

#[test]
fn degenerate_constants_are_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let o = thermoflow(
        &["ld-bound", "--config", config("binomial.json").to_str().unwrap(), "--out", dir.path().to_str().unwrap()],
        None,
    );
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("seminorm"));
}

#[test]
fn unreadable_or_invalid_configs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"sft": {"alphabet_size": 2, "transition": [[1, 1], [1, 1]], "theta": 0.5}, "roof": {"depth": 1, "table": {"1": 0.5, "2": 1.0}}}"#).unwrap();
    let o = thermoflow(&["validate", "--config", bad.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("roof below 1"));
    let o = thermoflow(&["pressure", "--config", dir.path().join("absent.json").to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    let o = thermoflow(&["validate", "--config", config("golden_mean.json").to_str().unwrap()], None);
    assert!(o.status.success());
}

#[test]
fn manifest_records_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("golden_mean.json");
    let o = thermoflow(&["simulate", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "--threads", "2"], None);
    assert!(o.status.success());
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    let keys: Vec<&str> = m.as_object().unwrap().keys().map(String::as_str).collect();
    for k in ["config_sha256", "command", "seed", "threads", "duration_ms", "tool_version"] {
        assert!(keys.contains(&k), "{k}");
    }
    assert_eq!(m["command"], "simulate");
    assert_eq!(m["seed"], 2024);
    assert_eq!(m["threads"], 2);
    assert_eq!(m["config_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    for (command, cfg) in [("theorem1", "binomial.json"), ("theorem2", "escape_roof.json"), ("simulate", "golden_mean.json")] {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let cfg = config(cfg);
        for (dir, threads) in [(&a, "1"), (&b, "3")] {
            let o = thermoflow(&[command, "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()], Some(threads));
            assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        }
        let mut names: Vec<_> = std::fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.retain(|n| n.to_string_lossy().ends_with(".csv"));
        assert!(!names.is_empty());
        for n in names {
            assert_eq!(std::fs::read(a.path().join(&n)).unwrap(), std::fs::read(b.path().join(&n)).unwrap(), "{command} {n:?}");
        }
    }
}
