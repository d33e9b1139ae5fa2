use std::path::PathBuf;
use std::process::Command;

use qmcap::io::{load_measurement, ComponentsJson, EnsembleJson, MeasurementJson};
use qmcap_core::encode::Ensemble;
use qmcap_core::measure::{random_measurement, Measurement};
use qmcap_core::ComplexMatrix;

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qmcap-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn qmcap(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qmcap")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn write_measurement(name: &str, m: &Measurement) -> String {
    let json = serde_json::to_string(&MeasurementJson::from_measurement(m)).unwrap();
    scratch(name, &json).display().to_string()
}

#[test]
fn measurement_json_round_trips_bit_exactly() {
    let m = random_measurement(3, 4, false, 12).unwrap();
    let path = write_measurement("rt.json", &m);
    let back = load_measurement(path.as_ref()).unwrap();
    assert_eq!(back.operators(), m.operators());
    assert_eq!(back.labels(), m.labels());
}

#[test]
fn ensemble_and_components_round_trip() {
    let e = Ensemble::uniform_basis(3, None).unwrap();
    let j = EnsembleJson::from_ensemble(&e);
    let back: EnsembleJson = serde_json::from_str(&serde_json::to_string(&j).unwrap()).unwrap();
    assert_eq!(back.to_ensemble().unwrap().priors(), e.priors());
    let pairs = vec![(ComplexMatrix::from_real_diag(&[0.75, 0.25]), 1.0)];
    let c = ComponentsJson::from_pairs(2, &pairs);
    let text = serde_json::to_string(&c).unwrap();
    assert!(text.contains("\"E\""));
    let back: ComponentsJson = serde_json::from_str(&text).unwrap();
    assert_eq!(back.to_pairs().unwrap(), pairs);
}

#[test]
fn capacity_json_and_units() {
    let m = Measurement::binary_symmetric(0.1).unwrap();
    let path = write_measurement("bs.json", &m);
    let (code, out) = qmcap(&["cap", &path, "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let expect = std::f64::consts::LN_2 + 0.1f64 * 0.1f64.ln() + 0.9f64 * 0.9f64.ln();
    assert!((v["value"].as_f64().unwrap() - expect).abs() < 1e-9);
    assert_eq!(v["semantics"], "exact");
    let (_, bits) = qmcap(&["cap", &path, "--json", "--units", "bits"]);
    let b: serde_json::Value = serde_json::from_str(&bits).unwrap();
    assert!((b["value"].as_f64().unwrap() - expect / std::f64::consts::LN_2).abs() < 1e-9);
}

#[test]
fn exit_codes() {
    let incomplete = scratch(
        "half.json",
        r#"{"dim":2,"operators":[{"re":[[1,0],[0,0]],"im":[[0,0],[0,0]]}]}"#,
    );
    let half = incomplete.display().to_string();
    assert_eq!(qmcap(&["validate", &half]).0, 1);
    assert_eq!(qmcap(&["strength", &half]).0, 2);
    assert_eq!(qmcap(&["suite", "no-such-suite"]).0, 2);
    assert_eq!(qmcap(&["cap", &half, "--method", "bogus"]).0, 2);
    let m = write_measurement("id.json", &Measurement::identity(2));
    assert_eq!(qmcap(&["cap", &m, "--method", "ucm"]).0, 2);
    let (code, out) = qmcap(&["suite", "ando-nonneg", "--trials", "20", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["trials"], 20);
}

#[test]
fn suite_output_is_reproducible() {
    let run = || {
        let (_, out) = qmcap(&["suite", "mixing-linearity", "--trials", "30", "--seed", "4", "--json"]);
        let mut v: serde_json::Value = serde_json::from_str(&out).unwrap();
        v.as_object_mut().unwrap().remove("runtime_ms");
        v
    };
    assert_eq!(run(), run());
}

#[test]
fn scalar_commands() {
    let (code, out) = qmcap(&["subentropy", "0.5,0.5", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["subentropy"].as_f64().unwrap() - (std::f64::consts::LN_2 - 0.5)).abs() < 1e-12);
    assert_eq!(qmcap(&["simplex-check", "0.7,0.2,0.1"]).0, 0);
    let ucm = scratch(
        "ucm.json",
        r#"{"dim":2,"components":[{"E":{"re":[[1,0],[0,0]],"im":[[0,0],[0,0]]},"p":1.0}]}"#,
    );
    let (code, out) = qmcap(&["ucm-cap", &ucm.display().to_string(), "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["value"].as_f64().unwrap() - 0.193147).abs() < 5e-7);
}
