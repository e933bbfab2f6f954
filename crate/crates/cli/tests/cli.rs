use hkreduce_cli::{read_report, CliError, parse_spec_str};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn specs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../specs")
}

fn hk(args: &[&str], spec: Option<&Path>, out: &Path) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hkreduce"));
    c.args(args).arg("--out").arg(out).env_remove("HKREDUCE_SEED");
    if let Some(s) = spec {
        c.arg("--spec").arg(s);
    }
    c.output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn passing_spec_exits_zero_and_writes_both_files() {
    let d = tempfile::tempdir().unwrap();
    let o = hk(&["verify", "--quiet"], Some(&specs().join("flat.toml")), d.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let r = read_report(d.path()).unwrap();
    assert!(r.pass && r.checks.iter().all(|c| c.pass));
    assert_eq!(r.seed, 1);
    let csv = std::fs::read_to_string(d.path().join("summary.csv")).unwrap();
    assert!(csv.starts_with("id,anchor,violation,tol,pass\n"));
    assert_eq!(csv.lines().count(), r.checks.len() + 1);
}

#[test]
fn failing_check_exits_one() {
    let d = tempfile::tempdir().unwrap();
    let o = hk(&["verify", "--quiet"], Some(&specs().join("jordan.toml")), d.path());
    assert_eq!(o.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("FAIL quiver.pairing"), "{stdout}");
    let r = read_report(d.path()).unwrap();
    assert!(!r.pass);
    assert_eq!(r.failures().map(|c| c.id.as_str()).collect::<Vec<_>>(), ["quiver.pairing"]);
}

#[test]
fn errors_exit_two() {
    let d = tempfile::tempdir().unwrap();
    let missing = hk(&["verify"], Some(&d.path().join("nope.toml")), d.path());
    assert_eq!(missing.status.code(), Some(2));
    let no_spec = hk(&["verify"], None, d.path());
    assert_eq!(no_spec.status.code(), Some(2));
    let bad_tol = hk(&["verify", "--tol", "-1"], Some(&specs().join("flat.toml")), d.path());
    assert_eq!(bad_tol.status.code(), Some(2));
    let bad = write(d.path(), "bad.toml", "kind = \"flat\"\nseed = 1\n[flat]\nhermitian_dim = 0\n");
    let o = hk(&["verify"], Some(&bad), d.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("hermitian_dim"));
}

#[test]
fn seed_precedence() {
    let d = tempfile::tempdir().unwrap();
    let spec = write(d.path(), "s.toml", "kind = \"flat\"\n[flat]\nhermitian_dim = 1\n");
    let out = d.path().join("out");
    let none = hk(&["verify", "--quiet"], Some(&spec), &out);
    assert_eq!(none.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&none.stderr).contains("HKREDUCE_SEED"));

    let env = Command::new(env!("CARGO_BIN_EXE_hkreduce"))
        .args(["verify", "--quiet", "--spec"])
        .arg(&spec)
        .arg("--out")
        .arg(&out)
        .env("HKREDUCE_SEED", "42")
        .status()
        .unwrap();
    assert_eq!(env.code(), Some(0));
    assert_eq!(read_report(&out).unwrap().seed, 42);

    let flag = Command::new(env!("CARGO_BIN_EXE_hkreduce"))
        .args(["verify", "--quiet", "--seed", "9", "--spec"])
        .arg(&spec)
        .arg("--out")
        .arg(&out)
        .env("HKREDUCE_SEED", "42")
        .status()
        .unwrap();
    assert_eq!(flag.code(), Some(0));
    assert_eq!(read_report(&out).unwrap().seed, 9);

    let seeded = hk(&["verify", "--quiet"], Some(&specs().join("flat.toml")), &out);
    assert_eq!(seeded.status.code(), Some(0));
    assert_eq!(read_report(&out).unwrap().seed, 1);
}

#[test]
fn tol_replaces_every_default() {
    let d = tempfile::tempdir().unwrap();
    let o = hk(&["prequant", "--quiet", "--tol", "0.25"], Some(&specs().join("prequant.toml")), d.path());
    let r = read_report(d.path()).unwrap();
    assert!(r.checks.iter().all(|c| c.tol == 0.25));
    // 0.2 away from ½ℤ is now on the lattice, so the expected-false payload fails.
    assert_eq!(o.status.code(), Some(1));
    assert!(!r.checks.iter().find(|c| c.id == "prequant.2.quiver-J").unwrap().pass);
}

#[test]
fn same_seed_gives_identical_csv_and_other_seeds_differ_only_numerically() {
    let d = tempfile::tempdir().unwrap();
    let spec = specs().join("a1.toml");
    let run = |sub: &str, seed: &str| {
        let out = d.path().join(sub);
        hk(&["verify", "--quiet", "--seed", seed], Some(&spec), &out);
        std::fs::read_to_string(out.join("summary.csv")).unwrap()
    };
    let a = run("a", "3");
    assert_eq!(a, run("b", "3"));
    let c = run("c", "4");
    let ids = |s: &str| s.lines().map(|l| l.split(',').next().unwrap().to_string()).collect::<Vec<_>>();
    assert_eq!(ids(&a), ids(&c));
}

#[test]
fn solve_writes_solution_and_report_reprints() {
    let d = tempfile::tempdir().unwrap();
    let o = hk(&["solve", "--quiet"], Some(&specs().join("nahm_inverse.toml")), d.path());
    assert_eq!(o.status.code(), Some(0));
    let sol = std::fs::read_to_string(d.path().join("solution.csv")).unwrap();
    assert!(sol.starts_with("i,s,a,row,col,re,im\n"));
    assert_eq!(sol.lines().count(), 1 + 600 * 4 * 4);
    let r = hk(&["report"], None, d.path());
    assert_eq!(r.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&r.stdout).contains("nahm.solve"));
    let empty = tempfile::tempdir().unwrap();
    assert_eq!(hk(&["report"], None, empty.path()).status.code(), Some(2));
}

#[test]
fn output_dir_in_spec_is_relative_to_the_spec() {
    let d = tempfile::tempdir().unwrap();
    let spec = write(d.path(), "s.toml", "kind = \"flat\"\nseed = 2\n[flat]\nhermitian_dim = 1\n[output]\ndir = \"res\"\n");
    let st = Command::new(env!("CARGO_BIN_EXE_hkreduce")).args(["verify", "--quiet", "--spec"]).arg(&spec).status().unwrap();
    assert_eq!(st.code(), Some(0));
    assert!(d.path().join("res/report.toml").exists());
}

#[test]
fn schema_errors_carry_field_and_line() {
    let dup = parse_spec_str("kind = \"flat\"\nseed = 1\nseed = 2\n").unwrap_err();
    assert!(matches!(dup, CliError::Schema { line: Some(3), .. }), "{dup:?}");
    let missing = parse_spec_str("kind = \"quiver\"\nseed = 1\n[quiver]\nvertices = 1\nedges = []\nv = [1]\nw = [2]\nzeta_r = [0.5]\n").unwrap_err();
    assert!(matches!(&missing, CliError::Schema { field, .. } if field.contains("zeta_c")), "{missing:?}");
    let neg_h = parse_spec_str("kind = \"flat\"\n[flat]\nhermitian_dim = 1\n[verify]\nh = -1e-4\n").unwrap_err();
    assert!(matches!(&neg_h, CliError::Schema { field, .. } if field.contains("h")), "{neg_h:?}");
    let unknown = parse_spec_str("kind = \"flat\"\n[flat]\nhermitian_dim = 1\nextra = 3\n").unwrap_err();
    assert!(matches!(unknown, CliError::Schema { .. }));
}

#[test]
fn spec_tol_applies_and_the_flag_overrides_it() {
    let d = tempfile::tempdir().unwrap();
    let spec = write(d.path(), "s.toml", "kind = \"flat\"\nseed = 2\n[flat]\nhermitian_dim = 1\n[verify]\ntol = 1e-3\n");
    let out = d.path().join("out");
    assert_eq!(hk(&["verify", "--quiet"], Some(&spec), &out).status.code(), Some(0));
    assert!(read_report(&out).unwrap().checks.iter().all(|c| c.tol == 1e-3));
    assert_eq!(hk(&["verify", "--quiet", "--tol", "1e-8"], Some(&spec), &out).status.code(), Some(0));
    assert!(read_report(&out).unwrap().checks.iter().all(|c| c.tol == 1e-8));
}
