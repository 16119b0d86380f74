use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn otm(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_otm"))
        .args(args)
        .env("OTM_OUT_DIR", dir)
        .output()
        .unwrap()
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "status {:?}: {}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn gen_piped_into_ot() {
    let dir = tempfile::tempdir().unwrap();
    let gen = otm(&["gen", "--seed", "1", "--duration-s", "30", "--output", "-"], dir.path());
    ok(&gen);
    let mut child = Command::new(env!("CARGO_BIN_EXE_otm"))
        .args(["ot", "--input", "-", "--holding-ms", "100,1000"])
        .env("OTM_OUT_DIR", dir.path())
        .stdin(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(&gen.stdout).unwrap();
    let out = child.wait_with_output().unwrap();
    ok(&out);
    let csv = fs::read_to_string(dir.path().join("ot.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "symbol,date,holding_ms,profit_ticks_cash,trades,shares,avg_shares,avg_profit,avg_return,profit_dollars"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("SYN1,2008-10-01,100,"));
    assert!(rows[1].starts_with("SYN1,2008-10-01,1000,"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, "# test run\nseed = 5\nduration_s = 5\nsymbol = CFG\n").unwrap();
    let out = otm(&["gen", "--config", cfg.to_str().unwrap(), "--symbol", "FLAG"], dir.path());
    ok(&out);
    let feed = fs::read_to_string(dir.path().join("FLAG.events.csv")).unwrap();
    assert!(feed.starts_with("#symbol=FLAG,"));
    assert!(!dir.path().join("CFG.events.csv").exists());
}

#[test]
fn bad_invocations_fail_with_message() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["frobnicate"],
        vec!["ot", "--input", "/nonexistent/feed.csv"],
        vec!["ot"],
        vec!["gen", "--seed", "many"],
    ] {
        let out = otm(&args, dir.path());
        assert!(!out.status.success(), "{args:?} succeeded");
        assert!(!out.stderr.is_empty(), "{args:?} printed nothing");
    }
    let cfg = dir.path().join("bad.conf");
    fs::write(&cfg, "colour = blue\n").unwrap();
    let out = otm(&["gen", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    ok(&otm(&["gen", "--seed", "0", "--duration-s", "20"], dir.path()));
    let feed = dir.path().join("SYN0.events.csv");
    let feed = feed.to_str().unwrap();
    let mut runs = Vec::new();
    for i in 0..2 {
        let out_dir = dir.path().join(format!("run{i}"));
        fs::create_dir(&out_dir).unwrap();
        ok(&otm(&["ot", "--input", feed, "--holding-ms", "1000", "--seed", "0"], &out_dir));
        runs.push(fs::read(out_dir.join("ot.csv")).unwrap());
    }
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn fit_then_extrapolate() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("table.csv");
    let mut rows = String::from("symbol,quotes,profit\n");
    for (i, q) in [1_000.0f64, 10_000.0, 50_000.0, 200_000.0, 1_000_000.0].iter().enumerate() {
        rows += &format!("S{i},{q},{}\n", 0.02 * q.powf(1.1));
    }
    fs::write(&table, rows).unwrap();
    ok(&otm(&["fit", "--input", table.to_str().unwrap()], dir.path()));
    let fit: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("fit.json")).unwrap()).unwrap();
    assert!((fit["b"].as_f64().unwrap() - 1.1).abs() < 1e-9);
    assert!((fit["a"].as_f64().unwrap() - 0.02).abs() < 1e-9);
    assert!((fit["r_squared"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let model = dir.path().join("fit.json");
    ok(&otm(
        &[
            "extrapolate",
            "--model",
            model.to_str().unwrap(),
            "--input",
            table.to_str().unwrap(),
        ],
        dir.path(),
    ));
    let ext: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("extrapolation.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(ext["symbols"], 5);
    let predictions = fs::read_to_string(dir.path().join("predictions.csv")).unwrap();
    assert_eq!(predictions.lines().count(), 6);
}

#[test]
fn out_dir_flag_beats_environment() {
    let dir = tempfile::tempdir().unwrap();
    let flag_dir = dir.path().join("flag");
    let out = otm(
        &["gen", "--duration-s", "2", "--out-dir", flag_dir.to_str().unwrap()],
        dir.path(),
    );
    ok(&out);
    assert!(flag_dir.join("SYN1.events.csv").exists());
    assert!(!dir.path().join("SYN1.events.csv").exists());
}
