use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bhlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bhlab")).args(args).env("BHLAB_THREADS", "2").output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = bhlab(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn summary(dir: &Path, command: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join(format!("{command}.summary.json"))).unwrap()).unwrap()
}

fn csv(path: PathBuf) -> (String, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines.map(|l| l.split(',').map(|x| x.parse().unwrap_or(f64::NAN)).collect()).collect();
    (header, rows)
}

fn recipe(name: &str) -> String {
    format!("{}/recipes/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn basis_reports_dimension_and_sectors() {
    let dir = TempDir::new().unwrap();
    let stdout = ok(&["basis", "--n", "5", "--l", "5", "--out", dir.path().to_str().unwrap()]);
    assert!(stdout.contains("dimension 126"), "{stdout}");
    let text = fs::read_to_string(dir.path().join("basis.csv")).unwrap();
    assert!(text.starts_with("kappa_index,parity,dim\n"));
    let total: usize = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<usize>().unwrap()).sum();
    assert_eq!(total, 126);
    assert_eq!(summary(dir.path(), "basis")["results"]["dimension"], 126);
}

#[test]
fn sector_spectra_reassemble_the_full_spectrum() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let common = ["spectrum", "--n", "4", "--l", "5", "--u-param", "0.4"];
    ok(&[&common[..], &["--out", a.path().to_str().unwrap()]].concat());
    ok(&[&common[..], &["--sectors", "--out", b.path().to_str().unwrap()]].concat());
    let (header, full) = csv(a.path().join("spectrum.csv"));
    assert_eq!(header, "index,eigenvalue");
    let (_, union) = csv(b.path().join("spectrum.csv"));
    assert_eq!(full.len(), 70);
    for (x, y) in full.iter().zip(&union) {
        assert!((x[1] - y[1]).abs() < 1e-10);
    }
    let (sector_header, _) = csv(b.path().join("spectrum.sectors.csv"));
    assert_eq!(sector_header, "kappa_index,parity,index,eigenvalue");
}

#[test]
fn sweep_writes_one_row_per_grid_point() {
    let dir = TempDir::new().unwrap();
    ok(&["sweep-u", "--n", "3", "--l", "3", "--points", "11", "--out", dir.path().to_str().unwrap()]);
    let (header, rows) = csv(dir.path().join("sweep-u.csv"));
    assert!(header.starts_with("u,e0,e1,"));
    assert_eq!(header.split(',').count(), 1 + 10);
    assert_eq!(rows.len(), 11);
    assert_eq!(rows[10][0], 1.0);
    // u = 0: free atoms, ground energy -N J
    assert!((rows[0][1] + 3.0).abs() < 1e-12);
}

#[test]
fn odd_block_sweep_has_no_crossings() {
    let dir = TempDir::new().unwrap();
    let d = dir.path().to_str().unwrap();
    ok(&["sweep-u", "--n", "5", "--l", "5", "--kappa", "0", "--parity", "odd", "--u-min", "0.05", "--u-max", "0.95", "--points", "19", "--out", d]);
    let gap = summary(dir.path(), "sweep-u")["results"]["min_adjacent_gap"].as_f64().unwrap();
    assert!(gap > 1e-8);
}

#[test]
fn config_file_values_yield_to_flags() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"command": "basis", "n": 5, "l": 5}"#).unwrap();
    assert!(ok(&["run", "--config", cfg.to_str().unwrap()]).contains("dimension 126"));
    assert!(ok(&["run", "--config", cfg.to_str().unwrap(), "--l", "4"]).contains("dimension 56"));
    assert!(ok(&["basis", "--config", cfg.to_str().unwrap(), "--n", "2"]).contains("dimension 15"));
}

#[test]
fn invalid_input_exits_with_two() {
    let cases: &[&[&str]] = &[
        &["basis", "--l", "5"],
        &["spectrum", "--n", "3", "--l", "3", "--u-param", "0.2", "--u", "1"],
        &["spectrum", "--n", "3", "--l", "3", "--epsilon-max", "-1"],
        &["bloch-quantum", "--n", "2", "--l", "3", "--t-max", "3-periods"],
        &["spectrum", "--n", "3", "--l", "1"],
        &["stats", "--n", "3", "--l", "4", "--epsilon-max", "0.2", "--sectors"],
        &["basis", "--n", "5", "--l", "5", "--bogus", "1"],
        &["run"],
    ];
    for args in cases {
        let out = bhlab(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let err = String::from_utf8(bhlab(&["spectrum", "--n", "3", "--l", "1"]).stderr).unwrap();
    assert!(err.starts_with("error[domain]:"), "{err}");
}

#[test]
fn numerical_failure_exits_with_three() {
    // six levels cannot support a density fit
    let out = bhlab(&["stats", "--n", "2", "--l", "3", "--sectors", "false"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("error[insufficient-data]:"));
}

#[test]
fn quantum_run_reproduces_from_its_summary() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    ok(&["bloch-quantum", "--n", "4", "--l", "4", "--u", "0.3", "--f", "1", "--t-max", "6-periods", "--out", a.path().to_str().unwrap()]);
    let s = summary(a.path(), "bloch-quantum");
    assert_eq!(s["config"]["t-max"], "6-periods");
    assert!(s["results"]["decay_fit"]["gamma"].is_f64());
    assert!(s["results"]["norm_drift"].as_f64().unwrap() < 1e-9);
    let cfg = a.path().join("bloch-quantum.summary.json");
    ok(&["run", "--config", cfg.to_str().unwrap(), "--out", b.path().to_str().unwrap()]);
    let first = fs::read(a.path().join("bloch-quantum.csv")).unwrap();
    assert_eq!(first, fs::read(b.path().join("bloch-quantum.csv")).unwrap());
    assert!(String::from_utf8(first).unwrap().starts_with("t,p,S\n"));
}

#[test]
fn ensemble_run_reproduces_across_thread_counts() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let args = ["bloch-classical", "--n", "10", "--l", "4", "--u", "0.1", "--f", "0.5", "--t-max", "2-periods", "--members", "60", "--seed", "9"];
    ok(&[&args[..], &["--out", a.path().to_str().unwrap()]].concat());
    let cfg = a.path().join("bloch-classical.summary.json");
    let out = Command::new(env!("CARGO_BIN_EXE_bhlab"))
        .args(["run", "--config", cfg.to_str().unwrap(), "--out", b.path().to_str().unwrap()])
        .env("BHLAB_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
    let first = fs::read(a.path().join("bloch-classical.csv")).unwrap();
    assert_eq!(first, fs::read(b.path().join("bloch-classical.csv")).unwrap());
    assert!(String::from_utf8(first).unwrap().starts_with("t,p_mean,p_stderr\n"));
    let s = summary(a.path(), "bloch-classical");
    assert_eq!(s["seed"], 9);
    assert_eq!(s["results"]["members"], 60);
    assert!((s["results"]["lambda"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(s["results"]["critical_field"]["weak"].is_f64());
    assert!(s["results"]["periodic_orbit"]["classification"].is_string());
}

#[test]
fn random_matrix_spacings_follow_their_law() {
    let dir = TempDir::new().unwrap();
    ok(&["rmt", "--kind", "gue", "--dims", "2,60", "--samples", "400", "--out", dir.path().to_str().unwrap()]);
    let s = summary(dir.path(), "rmt");
    for e in s["results"]["ensembles"].as_array().unwrap() {
        let ks = &e["ks"];
        assert!(ks["gue"].as_f64().unwrap() < ks["goe"].as_f64().unwrap(), "{e}");
        assert!(ks["gue"].as_f64().unwrap() < ks["poisson"].as_f64().unwrap());
    }
    let (header, rows) = csv(dir.path().join("rmt.dim2.csv"));
    assert_eq!(header, "s");
    assert_eq!(rows.len(), 400);
    assert!(s["results"]["ensembles"][1]["semicircle_l1"].as_f64().unwrap() < 1.0);
    assert!(s["results"]["ensembles"][0]["semicircle_l1"].is_null());
}

#[test]
fn stats_on_a_disordered_ring_pool_all_levels() {
    let dir = TempDir::new().unwrap();
    ok(&["stats", "--n", "5", "--l", "6", "--u", "1", "--epsilon-max", "0.5", "--seed", "2", "--out", dir.path().to_str().unwrap()]);
    let s = summary(dir.path(), "stats");
    assert_eq!(s["config"]["sectors"], false);
    assert_eq!(s["results"]["spacings"], 201);
    let (header, _) = csv(dir.path().join("stats.cdf.csv"));
    assert_eq!(header, "s,I,I_poisson,I_goe,I_gue");
}

#[test]
fn overlap_profile_has_a_width() {
    let dir = TempDir::new().unwrap();
    let d = dir.path().to_str().unwrap();
    ok(&["overlap", "--n", "5", "--l", "6", "--u", "0.5", "--u-prime", "0.6", "--epsilon-max", "0.1", "--d-max", "15", "--out", d]);
    let (header, rows) = csv(dir.path().join("overlap.csv"));
    assert_eq!(header, "d,R_mean,fit");
    assert_eq!(rows.len(), 31);
    let s = summary(dir.path(), "overlap");
    assert!(s["results"]["gamma"].as_f64().unwrap() > 0.0);
    assert!(s["results"]["stochasticity_error"].as_f64().unwrap() < 1e-10);
}

#[test]
fn stability_scan_changes_classification() {
    let dir = TempDir::new().unwrap();
    let d = dir.path().to_str().unwrap();
    ok(&["stability", "--l", "8", "--g", "0.1", "--f-min", "0.1", "--f-max", "4", "--points", "14", "--out", d]);
    let text = fs::read_to_string(dir.path().join("stability.csv")).unwrap();
    assert!(text.starts_with("F,max_exponent,max_modulus,classification\n"));
    let first = text.lines().nth(1).unwrap();
    let last = text.lines().last().unwrap();
    assert!(first.ends_with(",unstable") && last.ends_with(",stable"), "{text}");
    assert!(!summary(dir.path(), "stability")["results"]["classification_changes"].as_array().unwrap().is_empty());
}

#[test]
fn recipes_run_with_overrides() {
    let dir = TempDir::new().unwrap();
    let d = dir.path().to_str().unwrap();
    ok(&["run", "--config", &recipe("fig2.json"), "--points", "5", "--out", d]);
    assert_eq!(csv(dir.path().join("sweep-u.csv")).1.len(), 5);
    ok(&["run", "--config", &recipe("fig3.json"), "--n", "7", "--l", "7", "--out", d]);
    ok(&["run", "--config", &recipe("fig4.json"), "--n", "4", "--out", d]);
    assert_eq!(summary(dir.path(), "stats")["config"]["epsilon-max"], 0.1);
    ok(&["run", "--config", &recipe("fig7.json"), "--n", "20", "--out", d]);
    let (header, rows) = csv(dir.path().join("bogoliubov.csv"));
    assert_eq!(header, "n,predicted,exact_mean,deviation,multiplicity");
    assert_eq!(rows[1][4], 2.0);
    ok(&["run", "--config", &recipe("fig10.json"), "--n", "4", "--t-max", "1-periods", "--out", d]);
    assert_eq!(summary(dir.path(), "bloch-quantum")["config"]["f"], 0.1);
}
