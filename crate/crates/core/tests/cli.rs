use std::path::Path;
use std::process::{Command, Output};

fn gridrisk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gridrisk")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn fixture_in(dir: &Path, months: &str) -> String {
    let out = gridrisk(&["fixture", "--out", dir.to_str().unwrap(), "--seed", "7", "--months", months]);
    assert!(out.status.success(), "{}", stderr(&out));
    dir.join("config.toml").to_str().unwrap().to_owned()
}

#[test]
fn report_succeeds_and_prints_dgc() {
    let dir = tempfile::tempdir().unwrap();
    let config = fixture_in(dir.path(), "600");
    let out_dir = dir.path().join("run");
    let out = gridrisk(&["sri", "report", "--config", &config, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("dgc 0.26785714285714285 (15 of 56"), "{text}");
    assert!(out_dir.join("network.dot").is_file());
    assert!(out_dir.join("report.csv").is_file());
}

#[test]
fn verbs_stop_at_their_stage() {
    let dir = tempfile::tempdir().unwrap();
    let config = fixture_in(dir.path(), "120");
    let listing = |verb: &[&str], sub: &str| {
        let out_dir = dir.path().join(sub);
        let mut args = verb.to_vec();
        args.extend(["--config", &config, "--out", out_dir.to_str().unwrap()]);
        let out = gridrisk(&args);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        let mut names: Vec<String> = std::fs::read_dir(&out_dir)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        names.sort();
        names
    };
    assert_eq!(listing(&["cri", "compute"], "cri"), ["cri.csv"]);
    assert_eq!(listing(&["sri", "fit"], "fit"), ["cri.csv", "model.json", "panel.csv"]);
    assert_eq!(
        listing(&["sri", "network", "--format", "dot", "--format", "json"], "network"),
        ["model.json", "network.dot", "network.json"]
    );
    assert_eq!(
        listing(&["export", "--stage", "fit", "--format", "json"], "export"),
        ["model.json"]
    );
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = fixture_in(dir.path(), "120");
    let out = gridrisk(&["sri", "fit", "--config", &config, "--alpha", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("alpha"), "{}", stderr(&out));
    let missing = gridrisk(&["sri", "fit", "--config", dir.path().join("nope.toml").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2), "{}", stderr(&missing));
}

#[test]
fn data_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let config = fixture_in(dir.path(), "120");
    let csv = dir.path().join("synthetic_cri.csv");
    let text = std::fs::read_to_string(&csv).unwrap().replacen(",climate,", ",climate,oops", 1);
    std::fs::write(&csv, text).unwrap();
    let out = gridrisk(&["sri", "report", "--config", &config]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("line"), "{}", stderr(&out));
}

#[test]
fn numerical_errors_exit_with_four() {
    let dir = tempfile::tempdir().unwrap();
    let config = fixture_in(dir.path(), "12");
    let out = gridrisk(&["sri", "report", "--config", &config]);
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
    assert!(stderr(&out).contains("sample too small"), "{}", stderr(&out));
}
