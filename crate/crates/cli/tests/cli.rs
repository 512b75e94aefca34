use std::path::Path;
use std::process::{Command, Output};

fn factor(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_factor"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn line_with<'a>(text: &'a str, prefix: &str) -> &'a str {
    text.lines().find(|l| l.starts_with(prefix)).unwrap_or("")
}

#[test]
fn n15_preset_reports_three_and_five() {
    let dir = tempfile::tempdir().unwrap();
    let o = factor(dir.path(), &["tpt", "--n", "15", "--preset", "paper-fig-n15"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(line_with(&stdout(&o), "factors found"), "factors found: 3, 5");
    assert!(dir.path().join("tpt-n15.csv").exists());
    assert!(dir.path().join("tpt-n15.json").exists());
}

#[test]
fn pulse_train_example_assembles_1911() {
    let dir = tempfile::tempdir().unwrap();
    let o = factor(dir.path(), &["pulsetrain", "--n", "1911", "--pulses", "21", "--ells", "2..44"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(line_with(&out, "factors found"), "factors found: 3, 7, 13, 21, 39");
    assert_eq!(line_with(&out, "factorization"), "factorization: 1911 = 3 * 7^2 * 13");
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("pulsetrain-n1911.json")).unwrap()).unwrap();
    assert_eq!(json["report"]["factors_found"], serde_json::json!([3, 7, 13, 21, 39]));
    assert_eq!(json["factorization"][1], serde_json::json!({"prime": 7, "exponent": 2}));
}

#[test]
fn floquet_presets() {
    let dir = tempfile::tempdir().unwrap();
    let o = factor(dir.path(), &["floquet", "--preset", "paper-fig-n21"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(line_with(&stdout(&o), "factors found"), "factors found: 3, 7");
    let o = factor(dir.path(), &["floquet", "--preset", "paper-fig-n21", "--phi", "0", "--detector", "zero"]);
    assert_eq!(line_with(&stdout(&o), "factors found"), "factors found: 3, 7");
    let o = factor(dir.path(), &["floquet", "--preset", "paper-fig-n105"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(line_with(&stdout(&o), "factors found"), "factors found: 3, 5, 7, 15, 21, 35");
}

#[test]
fn gauss_sum_prints_complex_value() {
    let dir = tempfile::tempdir().unwrap();
    let o = factor(dir.path(), &["gauss-sum", "--kind", "A", "--n", "15", "--m", "1", "--ell", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "-0.3333333333333333 + 0i");
    let o = factor(dir.path(), &["gauss-sum", "--kind", "A", "--n", "15", "--m", "1", "--ell", "3"]);
    assert_eq!(stdout(&o).trim(), "1 + 0i");
    let o = factor(dir.path(), &["gauss-sum", "--kind", "nope", "--n", "15", "--m", "1", "--ell", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`kind`"));
}

#[test]
fn validation_errors_exit_two_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let o = factor(dir.path(), &["tpt", "--n", "15", "--kappa", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--kappa"));

    let o = factor(dir.path(), &["teleport", "--n", "15"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("teleport"));

    let o = factor(dir.path(), &["tpt", "--n", "15", "--delta", "0.03"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`n`"), "{}", stderr(&o));

    let o = factor(dir.path(), &["tpt", "--preset", "paper-fig-n21"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`preset`"));

    let o = factor(dir.path(), &["floquet", "--n", "21", "--detector", "line", "--scan", "0:4:100"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`scan`"));

    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "n = 15\nkappa = 3\n").unwrap();
    let o = factor(dir.path(), &["tpt", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`kappa`"), "{}", stderr(&o));

    let o = factor(dir.path(), &["encode", "--scheme", "tpt", "--n", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn computation_error_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    // the Bessel table for this modulation index would not fit in memory
    let o = factor(dir.path(), &["floquet", "--n", "21", "--kappa", "1e300", "--ells", "3", "--detector", "line"]);
    assert_eq!(o.status.code(), Some(3), "{}{}", stdout(&o), stderr(&o));
}

#[test]
fn contradiction_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    // a loose unit threshold accepts coprime trials
    let o = factor(
        dir.path(),
        &["pulsetrain", "--n", "1911", "--pulses", "3", "--ells", "2..10", "--tau-unit", "0.9"],
    );
    assert_eq!(o.status.code(), Some(4), "{}{}", stdout(&o), stderr(&o));
    assert_ne!(line_with(&stdout(&o), "contradictions"), "contradictions: -");
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# N = 21 floquet\nn = 21\nscan = 0:8:50\ndetector = peak\n").unwrap();
    let o = factor(dir.path(), &["floquet", "--config", cfg.to_str().unwrap(), "--scan", "0:8:100"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("floquet-n21.csv")).unwrap();
    assert!(csv.contains("# scan = 0:8:100\n"));
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 1 + 801);
}

#[test]
fn encode_round_trips_through_config() {
    let dir = tempfile::tempdir().unwrap();
    for (scheme, n, first) in [
        ("tpt", "15", "delta = 0.0225"),
        ("floquet", "21", "delta = 0.063"),
        ("pulsetrain", "1911", "delta = 12007.16712202019"),
    ] {
        let o = factor(dir.path(), &["encode", "--scheme", scheme, "--n", n]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let text = stdout(&o);
        assert!(text.lines().any(|l| l == first), "{text}");
        let cfg = dir.path().join(format!("{scheme}.cfg"));
        // the encoded file carries the parameters but not N itself
        let without_n: String = text.lines().filter(|l| !l.starts_with("n = ")).map(|l| format!("{l}\n")).collect();
        std::fs::write(&cfg, without_n).unwrap();
        let mut args = vec![scheme, "--config", cfg.to_str().unwrap()];
        if scheme == "tpt" {
            args.extend(["--scan", "0:4:20"]);
        }
        if scheme == "floquet" {
            args.extend(["--scan", "0:5:20"]);
        }
        let o = factor(dir.path(), &args);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let csv = std::fs::read_to_string(dir.path().join(format!("{scheme}-n{n}.csv"))).unwrap();
        assert!(csv.contains(&format!("\n# n = {n}\n")), "{csv}");
    }
    let pt = factor(dir.path(), &["encode", "--scheme", "pulsetrain", "--n", "1911", "--period", "1"]);
    let delta: f64 = line_with(&stdout(&pt), "delta = ")[8..].parse().unwrap();
    assert_eq!(delta, 2.0 * std::f64::consts::PI * 1911.0);
}

#[test]
fn trace_file_layout() {
    let dir = tempfile::tempdir().unwrap();
    let o = factor(dir.path(), &["tpt", "--preset", "paper-fig-n15", "--plot"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("tpt-n15.csv")).unwrap();
    let mut lines = csv.lines().skip_while(|l| l.starts_with('#'));
    assert_eq!(lines.next(), Some("xi,re,im,abs2"));
    assert!(csv.starts_with("# scheme = tpt\n# n = 15\n"));
    assert!(csv.contains("# normalization = max\n"));
    let mut last = f64::NEG_INFINITY;
    let mut rows = 0;
    for l in lines {
        let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(v.len(), 4);
        assert!(v[0] > last);
        last = v[0];
        assert!((v[1] * v[1] + v[2] * v[2] - v[3]).abs() < 1e-12);
        rows += 1;
    }
    assert_eq!(rows, 1601);
    let svg = std::fs::read_to_string(dir.path().join("tpt-n15.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn identical_runs_write_identical_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let o = factor(a.path(), &["floquet", "--preset", "paper-fig-n21"]);
    assert_eq!(o.status.code(), Some(0));
    let o = factor(b.path(), &["floquet", "--preset", "paper-fig-n21", "--threads", "3"]);
    assert_eq!(o.status.code(), Some(0));
    for f in ["floquet-n21.csv", "floquet-n21.json"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn out_directory_is_created() {
    let dir = tempfile::tempdir().unwrap();
    let o = factor(dir.path(), &["pulsetrain", "--n", "35", "--out", "runs/a"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(dir.path().join("runs/a/pulsetrain-n35.csv").exists());
}

#[test]
fn verify_oracle_passes_for_n21() {
    let dir = tempfile::tempdir().unwrap();
    let o = factor(dir.path(), &["verify-oracle", "--n", "21", "--seed", "7", "--samples", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 3);
}

#[test]
fn presets_are_listed() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout(&factor(dir.path(), &["presets"]));
    for p in ["paper-fig-n15", "paper-fig-n21", "paper-fig-n105", "paper-fig-n1911"] {
        assert!(out.contains(p));
    }
}
