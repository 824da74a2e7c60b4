mod common;

use common::*;
use serde_json::Value;

fn json(args: &[&str]) -> Value {
    let (code, out, err) = bshq(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    serde_json::from_str(&out).expect("valid JSON")
}

fn values(v: &Value) -> Vec<f64> {
    v["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["value"].as_f64().unwrap())
        .collect()
}

#[test]
fn golden_files_match() {
    for (file, args) in GOLDEN {
        let (code, out, err) = bshq(args);
        assert!(code == 0, "{file}: {err}");
        let want = std::fs::read_to_string(golden_path(file)).unwrap();
        assert_eq!(out, want, "{file}");
    }
}

#[test]
fn spectra() {
    let v = json(&["spectrum", "--model", "ho1d", "--observable", "H", "--box", "0:5"]);
    assert_eq!(values(&v), [0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
    assert_eq!(v["command"], "spectrum");
    assert_eq!(v["model"], "ho1d");

    let v = json(&["spectrum", "--model", "ho2d", "--observable", "H", "--box", "0:4,0:4"]);
    let vals = values(&v);
    for l in 0..=4 {
        assert_eq!(vals.iter().filter(|x| **x == l as f64).count(), l + 1);
    }

    let v = json(&["spectrum", "--model", "so3", "--n", "2", "--observable", "J1"]);
    for (got, want) in values(&v).iter().zip([-1.0, 0.0, 1.0]) {
        assert!((got - want).abs() < 1e-10);
    }
}

#[test]
fn levels() {
    let v = json(&["levels", "--model", "pendulum", "--hbar", "0.1"]);
    let rows = v["results"].as_array().unwrap();
    assert_eq!(rows.len(), 26);
    assert!(rows.iter().all(|r| r["residual"].as_f64().unwrap() <= 1e-9));
    assert_eq!(v["excluded"][0]["m"], 26);
    assert_eq!(v["excluded"][0]["reason"], "beyond separatrix");

    let v = json(&["levels", "--model", "pendulum", "--hbar", "2.0"]);
    let ms: Vec<i64> = v["results"].as_array().unwrap().iter().map(|r| r["m"].as_i64().unwrap()).collect();
    assert_eq!(ms, [0, 1]);

    let (code, out, _) = bshq(&["levels", "--model", "pendulum", "--hbar", "2.0", "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("m,E,A_residual"));
    assert!(out.ends_with("# excluded m=2: beyond separatrix\n"));
}

#[test]
fn harmonic_model_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("harmonic.json");
    std::fs::write(
        &path,
        r#"{"name": "harmonic", "kind": "potential", "dof": 1, "potential": "alpha^2/2", "domain": "line"}"#,
    )
    .unwrap();
    let v = json(&["levels", "--model", path.to_str().unwrap(), "--hbar", "0.5", "--m-max", "6"]);
    for r in v["results"].as_array().unwrap() {
        let m = r["m"].as_f64().unwrap();
        assert!((r["energy"].as_f64().unwrap() - 0.5 * m).abs() < 1e-9);
    }
}

#[test]
fn lattice_model_file_matches_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ho1d.json");
    std::fs::write(
        &path,
        r#"{
            "name": "ho1d", "kind": "lattice", "dof": 1,
            "constants": {},
            "lattice": { "offsets": [0], "constraints": ["A1 >= 0"] },
            "profiles": { "1": "2*A1" },
            "hamiltonian": "A1",
            "observables": { "H": "A1", "chi": "chi1" }
        }"#,
    )
    .unwrap();
    let p = path.to_str().unwrap();
    for obs in ["H", "chi"] {
        let from_file = bshq(&["export", "--model", p, "--observable", obs, "--box", "0:7"]);
        let builtin = bshq(&["export", "--model", "ho1d", "--observable", obs, "--box", "0:7"]);
        assert_eq!(from_file, builtin);
    }
    let (code, _, _) = bshq(&["verify", "--model", p]);
    assert_eq!(code, 0);
}

#[test]
fn verify() {
    let v = json(&["verify", "--model", "so3", "--n", "4"]);
    assert_eq!(v["results"][0]["residual"].as_f64(), Some(0.0));
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));

    let (code, out, _) = bshq(&["verify", "--model", "so3", "--n", "4", "--convention", "semiclassical-source"]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&out).unwrap();
    let defect = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "ladder-defect").unwrap();
    assert_eq!(defect["pass"], false);
    assert!(v["results"][0]["defect"].as_f64().unwrap() > 0.0);
    assert_eq!(v["results"][0]["boundary_zeros"], true);

    for model in ["ho1d", "ho2d"] {
        assert_eq!(bshq(&["verify", "--model", model]).0, 0, "{model}");
    }
}

#[test]
fn export() {
    let v = json(&["export", "--model", "so3", "--n", "4", "--observable", "J3"]);
    assert_eq!(v["dimension"], 5);
    let bands = v["bands"].as_array().unwrap();
    assert_eq!(bands.len(), 1);
    assert_eq!(bands[0]["offset"], serde_json::json!([0]));
    let re: Vec<f64> = bands[0]["coefficients"].as_array().unwrap().iter().map(|c| c[0].as_f64().unwrap()).collect();
    assert_eq!(re, [-2.0, -1.0, 0.0, 1.0, 2.0]);

    let v = json(&["export", "--model", "ho1d", "--observable", "chi", "--box", "0:3"]);
    let band = &v["bands"][0];
    assert_eq!(band["offset"], serde_json::json!([-1]));
    let want = [0.0, 2f64.sqrt(), 2.0, 6f64.sqrt()];
    for (c, w) in band["coefficients"].as_array().unwrap().iter().zip(want) {
        assert!((c[0].as_f64().unwrap() - w).abs() < 1e-15);
        assert_eq!(c[1].as_f64(), Some(0.0));
    }

    let a = bshq(&["export", "--model", "ho2d", "--observable", "chi1"]);
    let b = bshq(&["export", "--model", "ho2d", "--observable", "chi1"]);
    assert_eq!(a, b);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let (code, stdout, _) = bshq(&[
        "spectrum", "--observable", "H", "--box", "0:2", "--format", "csv", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    assert_eq!(std::fs::read_to_string(path).unwrap(), "m1,value\n0,0\n1,1\n2,2\n");
}

#[test]
fn exit_codes() {
    let cases: &[(&[&str], i32)] = &[
        (&["spectrum", "--model", "ho1d", "--observable", "H"], 0),
        (&["verify", "--model", "so3", "--n", "4", "--convention", "semiclassical-source"], 1),
        (&["spectrum"], 1),
        (&["frobnicate"], 1),
        (&["verify", "--unknown-flag"], 1),
        (&["verify", "--hbar", "0"], 1),
        (&["verify", "--box", "3:1"], 1),
        (&["verify", "--box", "0:4,0:4"], 1),
        (&["verify", "--convention", "wkb"], 1),
        (&["spectrum", "--model", "nope", "--observable", "H"], 2),
        (&["spectrum", "--model", "ho1d", "--observable", "Z"], 2),
        (&["verify", "--model", "pendulum"], 2),
        (&["levels", "--model", "ho1d"], 2),
        (&["verify", "--model", "so3", "--n", "3"], 2),
        (&["spectrum", "--model", "so3", "--observable", "J3"], 1),
    ];
    for (args, want) in cases {
        let (code, _, err) = bshq(args);
        assert_eq!(code, *want, "{args:?}: {err}");
    }
}

#[test]
fn degree_violation_and_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"name": "b", "kind": "lattice", "dof": 1, "lattice": {"constraints": ["A1 >= 0"]},
            "profiles": {"1": "2*A1"}, "hamiltonian": "A1", "observables": {"Q": "chi1*chi1"}}"#,
    )
    .unwrap();
    let (code, _, err) = bshq(&["export", "--model", bad.to_str().unwrap(), "--observable", "Q"]);
    assert_eq!(code, 2);
    assert!(err.contains("observables.Q"), "{err}");

    // no well to quantize around
    for (potential, domain) in [("-(alpha^2)", "line"), ("0*alpha", "circle")] {
        let path = dir.path().join("flat.json");
        let doc = format!(r#"{{"name": "f", "kind": "potential", "dof": 1, "potential": "{potential}", "domain": "{domain}"}}"#);
        std::fs::write(&path, doc).unwrap();
        let (code, _, err) = bshq(&["levels", "--model", path.to_str().unwrap()]);
        assert_eq!(code, 3, "{potential}");
        assert!(err.contains("no confining well"), "{err}");
    }
}

#[test]
fn half_integer_spin_with_offsets() {
    let v = json(&["spectrum", "--model", "so3", "--n", "3", "--offsets", "0.5", "--observable", "J3"]);
    assert_eq!(values(&v), [-1.5, -0.5, 0.5, 1.5]);
    assert_eq!(bshq(&["verify", "--model", "so3", "--n", "3", "--offsets", "0.5"]).0, 0);
}
