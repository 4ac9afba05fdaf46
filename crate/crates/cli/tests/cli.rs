use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn liftdiff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liftdiff"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn sweep_writes_table_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let o = liftdiff(&["sweep", "--n-points", "6", "--methods", "crw:0,exact", "--out", path_str(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("h,method,order,value,error_bound,exact,wall_time_ms"));
    assert_eq!(lines.count(), 12);
    assert!(text.contains("\n0.4,crw,0,0.2,"));
    let manifest: String = fs::read_to_string(dir.path().join("t.json")).unwrap();
    assert!(manifest.contains("\"n_points\": 6"));
    assert!(manifest.contains("\"version\""));
}

#[test]
fn sweep_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = liftdiff(&[
            "sweep",
            "--n-points",
            "5",
            "--methods",
            "crw:1,prw:2,markov:1,mc",
            "--particles",
            "1000",
            "--steps",
            "100",
            "--seed",
            "9",
            "--out",
            path_str(p),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("from-file.csv");
    fs::write(
        &cfg,
        format!("# small grid\nn_points = 3\nmethods = crw:0\nh_max = 0.5\nout = {}\n", out.display()),
    )
    .unwrap();
    let o = liftdiff(&["sweep", "--config", path_str(&cfg), "--n-points", "4"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.lines().last().unwrap().starts_with("0.5,crw,0,0.25,"));
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(code(&liftdiff(&["frobnicate"])), 1);
    assert_eq!(code(&liftdiff(&["sweep", "--h-min", "0.7", "--h-max", "0.2", "--out", "x.csv"])), 1);
    assert_eq!(code(&liftdiff(&["sweep", "--methods", "prw:5", "--out", "x.csv"])), 1);
    assert_eq!(code(&liftdiff(&["plot-script", "--table", "x.csv", "--style", "pie"])), 1);
    assert_eq!(code(&liftdiff(&["--help"])), 0);
}

#[test]
fn io_errors_exit_with_three() {
    let o = liftdiff(&["plot-script", "--table", "/definitely/not/here.csv"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("/definitely/not/here.csv"));
    let o = liftdiff(&["sweep", "--n-points", "2", "--out", "/definitely/not/here.csv"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn numerical_failures_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    // Two terms cannot reach the order-2 tail tolerance.
    let o = liftdiff(&[
        "sweep",
        "--n-points",
        "3",
        "--h-min",
        "0.6",
        "--h-max",
        "0.9",
        "--methods",
        "prw:2,crw:1",
        "--prw2-max-terms",
        "2",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains(",prw,2,,,error,"));
    assert!(text.contains(",crw,1,"));
}

#[test]
fn compare_reports_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cmp.csv");
    let o = liftdiff(&["compare", "--n-points", "101", "--methods", "crw:0-10", "--out", path_str(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("crw: mean error strictly decreases with order"));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 12);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",0")));
}

#[test]
fn plot_script_layouts() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("t.csv");
    let o = liftdiff(&[
        "sweep",
        "--n-points",
        "5",
        "--methods",
        "crw:0-3,prw:1-2,exact",
        "--out",
        path_str(&table),
    ]);
    assert_eq!(code(&o), 0);
    let script = dir.path().join("p.gp");
    let o = liftdiff(&["plot-script", "--table", path_str(&table), "--style", "prw", "--out", path_str(&script)]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(&script).unwrap();
    assert!(text.contains("set multiplot layout 1,2"));
    assert_eq!(text.matches("\nplot ").count(), 2);
    assert!(text.contains("sel('exact', 0)"));

    let o = liftdiff(&["plot-script", "--table", path_str(&table), "--style", "markov", "--zoom", "0.2,0.3"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("set multiplot layout 2,2"));
    assert!(text.contains("set xrange [0.2:0.3]"));
    assert!(text.contains("no rows for markov order 1"));
}

#[test]
fn mc_check_passes_on_small_ensemble() {
    let o = liftdiff(&["mc-check", "--h", "0.5,1", "--particles", "20000", "--steps", "200", "--seed", "4"]);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(code(&o), 0, "{stdout}");
    assert_eq!(stdout.matches("PASS").count(), 2);
}
