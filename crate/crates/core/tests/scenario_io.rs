mod common;

use std::fs;
use std::path::Path;

use common::coarse;
use nhwave::scenario::{
    execute, execute_to_dir, write_outputs, ExecuteOptions, RunManifest, ScenarioConfig,
    FAILED_MARKER,
};
use nhwave::Backend;

fn quick(extra: &[&str]) -> ScenarioConfig {
    let mut o = vec!["stepper.fixed_time_fs=200"];
    o.extend_from_slice(extra);
    coarse("strong-field-strong-int", &o)
}

fn numeric_files(dir: &Path) -> Vec<(String, String)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap()))
        .collect();
    out.sort();
    out
}

#[test]
fn writes_every_table_with_headers() {
    let cfg = quick(&[]);
    let dir = tempfile::tempdir().unwrap();
    let out = execute_to_dir(&cfg, dir.path(), ExecuteOptions::default()).unwrap();
    assert!(out.succeeded());
    for b in ["bloch", "nh1", "nh2"] {
        for stem in ["spectrum", "probe", "coherr"] {
            let text = fs::read_to_string(dir.path().join(format!("{stem}_{b}.csv"))).unwrap();
            assert!(text.contains(&format!("# config_hash: {}", cfg.hash())), "{stem}_{b}");
            let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
            let cols = header.split(',').count();
            let rows: Vec<_> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
            assert!(!rows.is_empty());
            assert!(rows.iter().all(|r| r.split(',').count() == cols));
        }
    }
    let spec = fs::read_to_string(dir.path().join("spectrum_nh2.csv")).unwrap();
    assert!(spec.contains("delta[gamma],R,T,A"));
    let probe = fs::read_to_string(dir.path().join("probe_nh1.csv")).unwrap();
    assert!(probe.contains("t[1/gamma],rho11,rho22,abs_rho12,gamma1[1/s],gamma2[1/s],norm"));
    // the density-matrix run compared with itself
    let own = fs::read_to_string(dir.path().join("coherr_bloch.csv")).unwrap();
    assert!(own.lines().filter(|l| !l.starts_with('#')).skip(1).all(|l| l.ends_with(",0.0000000000e0")));

    let diag: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("diagnostics.json")).unwrap()).unwrap();
    for key in ["vacuum", "bloch", "nh1", "nh2"] {
        assert!(diag[key]["pole_events"].is_u64(), "{key}");
        assert!(diag[key]["max_norm_drift"].is_f64());
        assert!(diag[key]["runtime_s"].is_f64());
    }
    assert!(!dir.path().join(FAILED_MARKER).exists());
}

#[test]
fn manifest_records_derived_quantities() {
    let cfg = quick(&[]);
    let m = RunManifest::new(&cfg).unwrap();
    assert!((m.eta_effective / cfg.medium.eta - 1.0).abs() < 1e-12);
    assert!((m.field_au - 0.0194).abs() < 5e-4);
    assert_eq!(m.config_hash, cfg.hash());
    assert_eq!(m.setup, cfg.sim_setup().unwrap());
}

#[test]
fn identical_configs_give_identical_bytes_and_manifest_replays() {
    let cfg = quick(&["backends=nh2,bloch"]);
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    execute_to_dir(&cfg, a.path(), ExecuteOptions::default()).unwrap();
    execute_to_dir(&cfg, b.path(), ExecuteOptions { parallel: false }).unwrap();
    assert_eq!(numeric_files(a.path()), numeric_files(b.path()));

    let text = fs::read_to_string(a.path().join("manifest.json")).unwrap();
    let m = RunManifest::from_json(&text).unwrap();
    assert_eq!(m.config, cfg);
    let c = tempfile::tempdir().unwrap();
    execute_to_dir(&m.config, c.path(), ExecuteOptions::default()).unwrap();
    assert_eq!(numeric_files(a.path()), numeric_files(c.path()));
}

#[test]
fn single_amplitude_backend_needs_no_reference_model() {
    let cfg = quick(&["backends=nh1"]);
    let out = execute(&cfg, ExecuteOptions::default()).unwrap();
    assert_eq!(out.runs.keys().copied().collect::<Vec<_>>(), vec![Backend::Nh1]);
    assert!(out.runs[&Backend::Nh1].coherence_error.is_none());
    let dir = tempfile::tempdir().unwrap();
    write_outputs(&out, dir.path()).unwrap();
    assert!(dir.path().join("spectrum_nh1.csv").exists());
    assert!(!dir.path().join("coherr_nh1.csv").exists());
}

#[test]
fn solver_abort_leaves_marker_and_partial_outputs() {
    let cfg = coarse(
        "weak-field-strong-int",
        &["stepper.courant=1.0", "medium.density_m3=1e39", "stepper.fixed_time_fs=100", "backends=bloch"],
    );
    // the vacuum reference is stable, the medium run is not
    let dir = tempfile::tempdir().unwrap();
    let out = execute_to_dir(&cfg, dir.path(), ExecuteOptions::default()).unwrap();
    assert!(!out.succeeded());
    assert!(out.failures.contains_key(&Backend::Bloch));
    let marker = fs::read_to_string(dir.path().join(FAILED_MARKER)).unwrap();
    assert!(marker.contains("non-finite"));
    assert!(dir.path().join("manifest.json").exists());
    let diag = fs::read_to_string(dir.path().join("diagnostics.json")).unwrap();
    assert!(diag.contains("error"));
}
