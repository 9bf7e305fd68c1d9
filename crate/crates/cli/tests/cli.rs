use std::fs;
use std::process::{Command, Output};

fn emlimit(args: &[&str], dir: &std::path::Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_emlimit"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

#[test]
fn oracle_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = emlimit(&["oracle"], dir.path());
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.lines().filter(|l| l.starts_with("pass")).count() > 20);
    assert!(!text.contains("FAIL"));
}

#[test]
fn unknown_subcommand_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(emlimit(&["bogus"], dir.path()).status.code(), Some(1));
}

#[test]
fn bad_config_values_are_validation_errors() {
    let dir = tempfile::tempdir().unwrap();
    for set in ["n=7", "c=[8,4]", "nonsense=1"] {
        let out = emlimit(&["simulate", "mhd", "--set", set], dir.path());
        assert_eq!(out.status.code(), Some(1), "{set}");
    }
    let out = emlimit(&["simulate", "mhd", "--set", "nonsense=1"], dir.path());
    assert!(String::from_utf8_lossy(&out.stderr).contains("nonsense"));
}

#[test]
fn cfl_violation_is_a_blow_up() {
    let dir = tempfile::tempdir().unwrap();
    let out = emlimit(
        &["simulate", "em", "--set", "cfl=10", "--set", "dt_max=1", "--set", "T=2", "--set", "c=[4]"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Courant"));
}

#[test]
fn missing_config_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = emlimit(&["sweep", "--config", "absent.toml"], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn sweep_output_is_deterministic_and_refits_identically() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.toml"), "n = 8\nT = 0.125\nc = [2, 4, 8]\nt_star = 0.0625\nfamily = \"F1\"\n").unwrap();
    for o in ["a", "b"] {
        let out = emlimit(&["sweep", "--config", "run.toml", "--set", &format!("output=\"{o}\"")], dir.path());
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for f in ["series.csv", "sweep.csv", "rates.csv", "summary.json"] {
        let a = fs::read(dir.path().join("a").join(f)).unwrap();
        let b = fs::read(dir.path().join("b").join(f)).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "{f} differs between identical runs");
    }
    let out = emlimit(&["rates", "--input", "a", "--set", "output=\"c\""], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        fs::read(dir.path().join("a/rates.csv")).unwrap(),
        fs::read(dir.path().join("c/rates.csv")).unwrap()
    );
}

#[test]
fn simulate_writes_checkpoints() {
    let dir = tempfile::tempdir().unwrap();
    for system in ["em", "mhd", "linear"] {
        let out = emlimit(
            &["simulate", system, "--set", "n=8", "--set", "T=0.0625", "--set", "t_star=0.0625", "--set", "c=[4]"],
            dir.path(),
        );
        assert_eq!(out.status.code(), Some(0), "{system}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let names: Vec<String> = fs::read_dir(dir.path().join("out"))
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    for f in ["em_c4.ckpt", "mhd.ckpt", "linear_c4.ckpt", "series.csv"] {
        assert!(names.iter().any(|n| n == f), "{f} missing from {names:?}");
    }
    let ck = emlimit_core::io::read_checkpoint(&dir.path().join("out/em_c4.ckpt")).unwrap();
    assert_eq!(ck.n, 8);
    assert_eq!(ck.c, 4.0);
    assert!((ck.t - 0.0625).abs() < 1e-12);
}
