use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn eqls(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eqls")).args(args).env_remove("EQLS_WORKERS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("eqls-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&d);
    fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn list_gates_shows_the_catalog() {
    let o = eqls(&["list-gates"]);
    assert!(o.status.success());
    let s = stdout(&o);
    for id in ["CNOT3", "CZ3", "H3", "P02", "P12", "TOFFOLI"] {
        assert!(s.contains(id), "{id}");
    }
}

#[test]
fn verify_passes() {
    let o = eqls(&["verify"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn identity_run_reports_success() {
    let o = eqls(&["run", "--target", "identity", "--gates", "WIRE", "--pop", "4"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("success: true"));
    assert!(s.contains("generations: 0"));
}

#[test]
fn table_file_target() {
    let dir = scratch("table");
    let t = dir.join("id2.txt");
    fs::write(&t, "00 00\n01 01\n10 10\n11 11\n").unwrap();
    let report = dir.join("out.txt");
    let o = eqls(&["run", "--target", t.to_str().unwrap(), "--gates", "WIRE", "--pop", "4", "--report", report.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(fs::read_to_string(&report).unwrap().contains("success: true"));
}

#[test]
fn bench_writes_reports() {
    let dir = scratch("bench");
    let o = eqls(&[
        "bench", "toffoli", "--runs", "2", "--pop", "10", "--gens", "3", "--mode", "classical,lamarckian",
        "--report", dir.to_str().unwrap(), "--workers", "1",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let runs = fs::read_to_string(dir.join("Toffoli-runs.tsv")).unwrap();
    assert_eq!(runs.lines().count(), 1 + 4);
    assert!(dir.join("Toffoli-summary.tsv").is_file());
    assert!(dir.join("Toffoli-lamarckian-1.txt").is_file());
    assert!(stdout(&o).contains("classical Gen"));
}

#[test]
fn config_file_and_flag_override() {
    let dir = scratch("config");
    let cfg = dir.join("ga.conf");
    fs::write(&cfg, "# small run\npop=6\ngens=2\nmode=baldwinian\nseed=5\n").unwrap();
    let o = eqls(&["run", "--target", "toffoli", "--config", cfg.to_str().unwrap(), "--gens", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    for line in ["population: 6", "max_generations: 1", "mode: baldwinian", "seed: 5"] {
        assert!(s.lines().any(|l| l == line), "{line}");
    }
    fs::write(&cfg, "pop=x\n").unwrap();
    assert!(!eqls(&["run", "--target", "toffoli", "--config", cfg.to_str().unwrap()]).status.success());
}

#[test]
fn errors_are_reported() {
    let o = eqls(&["bench", "nonesuch"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("nonesuch"));
    assert!(!eqls(&["run", "--target", "toffoli", "--mode", "sideways"]).status.success());
    assert!(!eqls(&["run", "--target", "toffoli", "--restrict", "H3=9"]).status.success());
}

#[test]
fn same_seed_same_report() {
    let args = ["run", "--target", "toffoli", "--pop", "12", "--gens", "20", "--mode", "lamarckian", "--seed", "3"];
    let a = stdout(&eqls(&args));
    let mut with_workers = args.to_vec();
    with_workers.extend(["--workers", "4"]);
    assert_eq!(a, stdout(&eqls(&with_workers)));
}
