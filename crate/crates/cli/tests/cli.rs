use std::path::Path;
use std::process::{Command, Output};

fn lpp(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lpp"))
        .arg("--out-dir")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn manifest(out: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(out.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn invalid_lattice_parameters_exit_1() {
    let d = tempfile::tempdir().unwrap();
    let o = lpp(d.path(), &["dist", "lattice-a", "--q", "0.9", "--qp", "1.2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("must lie in [0,1)"));
}

#[test]
fn unknown_flag_exits_1_and_help_exits_0() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(lpp(d.path(), &["dist", "square", "--bogus"]).status.code(), Some(1));
    assert_eq!(lpp(d.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn dist_writes_table_and_manifest() {
    let d = tempfile::tempdir().unwrap();
    let o = lpp(d.path(), &["dist", "square", "--t", "1", "--lmax", "6"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(d.path().join("dist_square.csv")).unwrap();
    assert_eq!(csv.lines().count(), 8);
    assert!(csv.starts_with("ell,p,log_p\n0,3.67879441171442"));
    let m = manifest(d.path());
    assert_eq!(m["command"], "dist");
    assert_eq!(m["outputs"].as_array().unwrap().len(), 2);
    assert_eq!(m["outputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn mc_is_independent_of_worker_count() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = [
        "mc",
        "external",
        "--alpha-plus",
        "0.4",
        "--alpha-minus",
        "0.2",
        "--trials",
        "20000",
    ];
    assert!(lpp(a.path(), &[&["--workers", "1"], &args[..]].concat())
        .status
        .success());
    assert!(lpp(b.path(), &[&["--workers", "4"], &args[..]].concat())
        .status
        .success());
    let read = |p: &Path| std::fs::read(p.join("mc_external.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
    assert_eq!(manifest(a.path())["seed"], 1);
}

#[test]
fn verification_failure_exits_3() {
    // Y11 deviations decay like 1/k, outside the k^{-2/3} ± 0.2 band.
    let d = tempfile::tempdir().unwrap();
    let o = lpp(
        d.path(),
        &["verify", "corner-asymptotics", "--x", "0", "--k", "40,60,90"],
    );
    assert_eq!(o.status.code(), Some(3));
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(d.path().join("verify_corner-asymptotics.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], false);
    assert_eq!(report["report"]["studies"][0]["y21_order_ok"], true);
}

#[test]
fn dpii_suite_passes() {
    let d = tempfile::tempdir().unwrap();
    let o = lpp(d.path(), &["verify", "dpii", "--t", "2", "--kmax", "20"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value =
        serde_json::from_slice(&std::fs::read(d.path().join("verify_dpii.json")).unwrap()).unwrap();
    assert!(r["report"]["max_residual"].as_f64().unwrap() < 1e-8);
}
