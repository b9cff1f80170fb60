use std::path::Path;
use std::process::{Command, Output};

fn photonet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_photonet")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Parses CSV output into (header, rows).
fn csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn column<'a>(header: &[String], rows: &'a [Vec<String>], name: &str) -> Vec<&'a str> {
    let k = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[k].as_str()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    serde_json::from_str(&stdout(&photonet(&all))).unwrap()
}

#[test]
fn symmetric_four_mode_w_state() {
    let (h, rows) = csv(&stdout(&photonet(&["wstate", "--symmetric", "4"])));
    assert_eq!(h[0], "schema_version");
    assert_eq!(rows.len(), 4);
    for a in column(&h, &rows, "alpha_abs") {
        assert!((num(a) - 0.5).abs() < 1e-12);
    }
    for s in column(&h, &rows, "sim_re") {
        assert!((num(s) - 0.5).abs() < 1e-12);
    }
}

#[test]
fn photon_kept_in_first_mode_needs_a_fully_reflecting_splitter() {
    let (h, rows) = csv(&stdout(&photonet(&["wstate", "--coeffs", "1,0"])));
    assert!((num(column(&h, &rows, "theta")[0]) - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    assert_eq!(column(&h, &rows, "theta")[1], "");
}

#[test]
fn json_output_carries_config_and_round_trip() {
    let v = json(&["wstate", "--coeffs", "0.6,0.8"]);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["config"]["command"], "wstate");
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for r in rows {
        assert!(r["round_trip_error"].as_f64().unwrap() < 1e-10);
    }
    assert!((rows[1]["alpha_re"].as_f64().unwrap() - 0.8).abs() < 1e-12);
}

#[test]
fn bad_coefficients_are_usage_errors() {
    for args in [
        &["wstate", "--coeffs", "1,1"][..],
        &["wstate", "--coeffs", "0.6,abc"],
        &["wstate", "--coeffs", "1"],
        &["wstate", "--symmetric", "3", "--phases", "0.1,0.2"],
        &["wstate", "--symmetric", "3", "--phases", "10deg,0,0"],
        &["wstate", "--symmetric", "1"],
        &["wstate"],
    ] {
        let out = photonet(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn symmetric_three_mode_scan_at_unit_efficiency() {
    let (h, rows) = csv(&stdout(&photonet(&["witness-scan", "--symmetric", "3", "--eta", "1"])));
    let kinds = column(&h, &rows, "row_type");
    assert_eq!(kinds, ["pair", "pair", "pair", "summary"]);
    for (r, s) in column(&h, &rows, "ratio_closed").iter().zip(column(&h, &rows, "ratio_sim")).take(3) {
        assert!((num(r) - 11.0 / 15.0).abs() < 1e-10);
        assert!((num(s) - 11.0 / 15.0).abs() < 1e-10);
    }
    assert_eq!(column(&h, &rows, "violated"), ["true"; 4]);
    assert_eq!(column(&h, &rows, "i")[..3], ["1", "1", "2"]);
    assert_eq!(column(&h, &rows, "j")[..3], ["2", "3", "3"]);
}

#[test]
fn weak_detectors_still_certify_the_symmetric_state() {
    let v = json(&["witness-scan", "--symmetric", "5", "--eta", "0.05"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 11);
    let summary = rows.last().unwrap();
    assert_eq!(summary["row_type"], "summary");
    assert_eq!(summary["violated"], true);
}

#[test]
fn product_state_certifies_nothing() {
    let v = json(&["witness-scan", "--coeffs", "1,0,0", "--eta", "1"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.last().unwrap()["violated"], false);
    assert!(rows[..3].iter().all(|r| r["note"] == "zero-coefficient"));
}

#[test]
fn zero_efficiency_is_refused() {
    let out = photonet(&["witness-scan", "--symmetric", "3", "--eta", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("eta"));
}

#[test]
fn ideal_two_party_teleportation() {
    let (h, rows) = csv(&stdout(&photonet(&[
        "teleport", "--N", "2", "--m", "0", "--eta", "1", "--events", "both", "--theta", "0.7853981634",
    ])));
    assert_eq!(rows.len(), 1);
    assert!((num(column(&h, &rows, "fidelity")[0]) - 1.0).abs() < 1e-9);
    assert!((num(column(&h, &rows, "probability")[0]) - 0.5).abs() < 1e-9);
    assert!(num(column(&h, &rows, "residual")[0]) < 1e-8);
}

#[test]
fn critical_efficiencies_for_three_parties() {
    let (h, rows) = csv(&stdout(&photonet(&["teleport", "--critical-eta", "--N", "3"])));
    let eta: Vec<f64> = column(&h, &rows, "critical_eta").into_iter().map(num).collect();
    assert!((eta[0] - 0.382).abs() < 5e-4 && (eta[1] - 0.293).abs() < 5e-4, "{eta:?}");

    let (h, rows) = csv(&stdout(&photonet(&["teleport", "--critical-eta", "--N", "3", "--detector", "onoff"])));
    let eta: Vec<f64> = column(&h, &rows, "critical_eta").into_iter().map(num).collect();
    assert!((eta[0] - 0.583).abs() < 5e-3 && (eta[1] - 0.435).abs() < 5e-3, "{eta:?}");
}

#[test]
fn teleport_grid_is_ordered_and_simulated() {
    let v = json(&["teleport", "--N", "3,4", "--eta", "0.5,1", "--theta", "0.3,1.2", "--detector", "onoff", "--jobs", "3"]);
    let rows = v["rows"].as_array().unwrap();
    // N = 3 has m in {0, 1}, N = 4 has m in {0, 1, 2}.
    assert_eq!(rows.len(), (2 + 3) * 2 * 2);
    let key = |r: &serde_json::Value| (r["n"].as_u64().unwrap(), r["m"].as_u64().unwrap(), r["eta"].as_f64().unwrap(), r["theta"].as_f64().unwrap());
    let keys: Vec<_> = rows.iter().map(key).collect();
    let mut sorted = keys.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(keys, sorted);
    for r in rows {
        assert!(r["residual"].as_f64().unwrap() < 1e-8);
        assert!(r["r_prime_theta"].as_f64().unwrap() > 0.0);
    }
}

#[test]
fn optimized_angles_are_reported() {
    let v = json(&["teleport", "--N", "3", "--m", "1", "--eta", "0.5", "--optimize"]);
    let r = &v["rows"][0];
    assert_eq!(r["optimized"], true);
    let expect = (3.0f64 - 0.5 * 2.0).atan2(2.0 - 0.5);
    assert!((r["theta"].as_f64().unwrap() - expect).abs() < 1e-12);
}

#[test]
fn teleport_rejects_invalid_grids() {
    for args in [
        &["teleport", "--N", "3", "--m", "2", "--eta", "1", "--theta", "0.5"][..],
        &["teleport", "--N", "3", "--eta", "1"],
        &["teleport", "--N", "3", "--eta", "1", "--theta", "2"],
        &["teleport", "--N", "3", "--eta", "1", "--theta", "45deg"],
        &["teleport", "--N", "3", "--eta", "1", "--theta", "0.5", "--events", "d11"],
        &["teleport", "--N", "3", "--eta", "1.5", "--theta", "0.5"],
        &["teleport", "--N", "1", "--critical-eta"],
    ] {
        assert_eq!(photonet(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn default_verification_passes() {
    let out = photonet(&["verify", "--mc-samples", "20000"]);
    let (h, rows) = csv(&stdout(&out));
    assert!(rows.len() >= 15);
    assert!(column(&h, &rows, "passed").iter().all(|p| *p == "true"));
}

#[test]
fn overtight_tolerance_fails_honestly() {
    let out = photonet(&["verify", "--mc-samples", "20000", "--tolerance", "1e-15"]);
    assert_eq!(out.status.code(), Some(1));
    let (h, rows) = csv(&String::from_utf8(out.stdout).unwrap());
    assert!(column(&h, &rows, "passed").contains(&"false"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("verification failed"));
}

#[test]
fn same_seed_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let p = path.to_str().unwrap();
        stdout(&photonet(&["verify", "--seed", "42", "--mc-samples", "20000", "--json", "--output", p]));
        std::fs::read(Path::new(p)).unwrap()
    };
    let a = run("a.json");
    assert!(!a.is_empty());
    assert_eq!(a, run("b.json"));
}
