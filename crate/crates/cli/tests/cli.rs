use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn splitfem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_splitfem")).args(args).env_remove("RUST_BACKTRACE").output().unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn test1_writes_error_table_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = splitfem(&["--experiment", "test1", "--h", "2^-10", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("4 iterations"), "{stdout}");
    let errors = read(dir.path(), "errors.csv");
    let mut lines = errors.lines();
    assert_eq!(lines.next(), Some("h,E1,E2,E3,E4,E5"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let e1: f64 = row[1].parse().unwrap();
    assert!((e1 - 6.03e-3).abs() < 0.05 * 6.03e-3);
    assert!(row[1].contains('e'));
    for name in ["history.csv", "levels.csv", "rates.csv", "timings.csv", "config.csv"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    assert!(read(dir.path(), "history.csv").starts_with("iteration,max_diff,"));
}

#[test]
fn reruns_produce_identical_tables() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = |d: &Path| {
        vec![
            "--experiment".to_string(),
            "rand-diff-a2".into(),
            "--samples".into(),
            "200".into(),
            "--h".into(),
            "0.1,0.05".into(),
            "--set".into(),
            "stop_h=0.05".into(),
            "--out".into(),
            d.to_str().unwrap().into(),
        ]
    };
    for d in [a.path(), b.path()] {
        let args = args(d);
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        assert!(splitfem(&refs).status.success());
    }
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() > 3);
    for name in names {
        let name = name.to_str().unwrap();
        if name == "timings.csv" {
            continue;
        }
        assert_eq!(read(a.path(), name), read(b.path(), name), "{name}");
    }
    let orders = read(a.path(), "orders.csv");
    assert!(orders.starts_with("h,H1_err,H1_order,L2_err,L2_order"));
}

#[test]
fn config_file_and_flags_combine() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# small grouped run\nname = test2\nnx = 8\nJ = 40\nn_c = 3\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = splitfem(&[
        "--experiment",
        "test2",
        "--config",
        cfg.to_str().unwrap(),
        "--compare-individual",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let grouping = read(&out_dir, "grouping.csv");
    assert!(grouping.starts_with("group,size,region_min,region_max,center,rho,iterations,converged,max_err"));
    assert_eq!(grouping.lines().count(), 4);
    let config = read(&out_dir, "config.csv");
    assert!(config.contains("nx,8") && config.contains("samples,40"));
}

#[test]
fn bad_values_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let out = splitfem(&["--experiment", "test1", "--tol", "fast", "--out", dir.path().to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("'tol'"));

    let out = splitfem(&["--experiment", "table11"]);
    assert!(!out.status.success());

    let out = splitfem(&["--experiment", "test1", "--set", "colour=blue"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("'colour'"));
}

#[test]
fn speedup_table_goes_to_its_own_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = splitfem(&[
        "--experiment",
        "speedup-bench",
        "--nx",
        "8",
        "--samples",
        "20",
        "--centers",
        "2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let speedup = read(dir.path(), "speedup.csv");
    assert!(speedup.starts_with("N,J,K,T_it,T_ind,S_f_measured,S_f_formula"));
    assert!(speedup.lines().nth(1).unwrap().starts_with("81,20,"));
}
