use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_drumcorners"))
}

#[test]
fn trace_coeffs_square() {
    let dir = std::env::temp_dir().join("drumcorners_cli_trace");
    let out = bin()
        .args(["--out", dir.to_str().unwrap(), "trace-coeffs", "--domain", "square", "--bc", "dirichlet"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&out.stdout)).unwrap();
    assert!((v["c_0"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    // manifest written with the output listed
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("run.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "trace-coeffs");
    assert!(!manifest["outputs"].as_array().unwrap().is_empty());
}

#[test]
fn malformed_config_exits_2() {
    let dir = std::env::temp_dir().join("drumcorners_cli_bad");
    let cfg = dir.join("bad.json");
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(&cfg, "{\"nonsense\": true}").unwrap();
    let out = bin()
        .args(["--out", dir.to_str().unwrap(), "run"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stderr).trim()).unwrap();
    assert_eq!(err["error"], "bad_input");
}

#[test]
fn unknown_preset_exits_2() {
    let out = bin()
        .args(["trace-coeffs", "--domain", "pentagon", "--bc", "dirichlet", "--out", std::env::temp_dir().join("drumcorners_cli_unknown").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sector_green_matches_frozen_value() {
    let dir = std::env::temp_dir().join("drumcorners_cli_sector");
    let out = bin()
        .args([
            "--out", dir.to_str().unwrap(),
            "sector-green", "--gamma", "1.5707963267948966", "--bc", "dirichlet",
            "--s", "1", "--r", "1", "--phi", "0.6", "--r0", "0.7", "--phi0", "0.9",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let row = stdout.lines().nth(1).unwrap();
    let value: f64 = row.split(',').nth(5).unwrap().parse().unwrap();
    assert!((value - 0.108844496454231).abs() < 2e-6, "value = {value}");
}

#[test]
fn classify_from_eigs_round_trip() {
    let dir = std::env::temp_dir().join("drumcorners_cli_roundtrip");
    let out = bin()
        .args([
            "--out", dir.to_str().unwrap(),
            "eigs", "--domain", "square", "--bc", "dirichlet", "--count", "12", "--h", "0.1",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let spectrum = dir.join("spectrum.csv");
    let out = bin()
        .args([
            "--out", dir.to_str().unwrap(), "--tol", "1e-3",
            "classify", "--spectrum", spectrum.to_str().unwrap(),
            "--area", "1", "--perimeter", "4",
            "--t-min", "0.1", "--t-max", "0.3", "--t-points", "12",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&out.stdout)).unwrap();
    assert_eq!(v["verdict"], "Polygonal");
    assert!((v["excess"].as_f64().unwrap() - 1.0 / 12.0).abs() < 0.02);
}
