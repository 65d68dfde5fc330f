use std::path::Path;
use std::process::{Command, Output};

fn sqlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqlab")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn out_arg(dir: &Path) -> String {
    dir.to_string_lossy().into_owned()
}

#[test]
fn successful_run_writes_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let out = out_arg(&tmp.path().join("learn"));
    let o = sqlab(&[
        "learn", "--n", "3", "--epsilon", "0.1", "--tau", "0.05", "--class", "conjunctions", "--oracle", "grid",
        "--seeds", "0,1", "--out", &out,
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let dir = Path::new(&out);
    for f in ["summary.csv", "config.toml", "manifest.json", "learn-00000.csv", "learn-00015.csv"] {
        assert!(dir.join(f).exists(), "{f} missing");
    }
    let summary = std::fs::read_to_string(dir.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 17);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&sqlab(&[])), 1);
    assert_eq!(code(&sqlab(&["frobnicate"])), 1);
    assert_eq!(code(&sqlab(&["learn", "--n", "three"])), 1);
    let tmp = tempfile::tempdir().unwrap();
    let out = out_arg(tmp.path());
    let missing_tau = sqlab(&["learn", "--n", "3", "--epsilon", "0.1", "--class", "conjunctions", "--out", &out]);
    assert_eq!(code(&missing_tau), 1);
    assert!(String::from_utf8_lossy(&missing_tau.stderr).contains("tau"));
    let bad_class = sqlab(&["dim", "--n", "3", "--epsilon", "0.1", "--class", "circles", "--out", &out]);
    assert_eq!(code(&bad_class), 1);
    assert!(String::from_utf8_lossy(&bad_class.stderr).contains("class"));
}

#[test]
fn help_exits_zero() {
    assert_eq!(code(&sqlab(&["--help"])), 0);
    assert_eq!(code(&sqlab(&["evolve", "--help"])), 0);
}

#[test]
fn lying_oracle_exits_two_and_keeps_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let out = out_arg(&tmp.path().join("biased"));
    let o = sqlab(&[
        "learn", "--n", "3", "--epsilon", "0.1", "--tau", "0.05", "--class", "conjunctions", "--oracle", "biased:0.5",
        "--out", &out,
    ]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("invariant-breach"));
    let manifest = std::fs::read_to_string(Path::new(&out).join("manifest.json")).unwrap();
    assert!(manifest.contains("oracle validity"));
}

#[test]
fn unreadable_paths_exit_three() {
    let o = sqlab(&["dim", "--config", "/nonexistent/experiment.toml", "--out", "/tmp/x"]);
    assert_eq!(code(&o), 3);
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let out = out_arg(&blocker.join("sub"));
    let o = sqlab(&["dim", "--n", "2", "--epsilon", "0.1", "--class", "parities", "--out", &out]);
    assert_eq!(code(&o), 3);
}

#[test]
fn flags_override_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("exp.toml");
    let first = tmp.path().join("from-file");
    std::fs::write(
        &cfg,
        format!(
            "n = 3\nepsilon = 0.1\nclass = \"parities\"\nseeds = [0, 1, 2]\nformat = \"json\"\nout = {:?}\n",
            first.to_string_lossy()
        ),
    )
    .unwrap();
    let cfg_arg = cfg.to_string_lossy().into_owned();
    assert_eq!(code(&sqlab(&["dim", "--config", &cfg_arg])), 0);
    assert!(first.join("summary.jsonl").exists());
    let second = out_arg(&tmp.path().join("overridden"));
    let o = sqlab(&["dim", "--config", &cfg_arg, "--n", "2", "--format", "csv", "--out", &second]);
    assert_eq!(code(&o), 0);
    let saved = std::fs::read_to_string(Path::new(&second).join("config.toml")).unwrap();
    assert!(saved.contains("n = 2"));
    assert!(saved.contains("command = \"dim\""));
    let summary = std::fs::read_to_string(Path::new(&second).join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 4);
}
