use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_casimir-pfa"))
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

/// Rows of a CSV body as numbers, skipping the header and non-numeric cells.
fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').filter_map(|c| c.parse().ok()).collect())
        .collect()
}

#[test]
fn coeffs_text_and_json() {
    let em = ok(&["coeffs", "--bc", "EM"]);
    assert!(em.contains("1/3 - 20/π²"));
    assert!(em.contains("-1.69309"));
    let nd: serde_json::Value = serde_json::from_str(&ok(&["coeffs", "--bc", "ND", "--json"])).unwrap();
    assert_eq!(nd["beta_cross"]["exact"], "2/3 + 80/(7π²)");
    let text = ok(&["coeffs", "--bc", "ND"]);
    let printed: f64 = text
        .lines()
        .find(|l| l.starts_with("beta_cross"))
        .and_then(|l| l.split_whitespace().last())
        .unwrap()
        .parse()
        .unwrap();
    let value = nd["beta_cross"]["value"].as_f64().unwrap();
    assert!((printed - value).abs() <= 5e-6 * value.abs());
}

#[test]
fn coeffs_pairs_and_errors() {
    let dn: serde_json::Value = serde_json::from_str(&ok(&["coeffs", "--bc", "D/N", "--json"])).unwrap();
    assert_eq!(dn["first"], "D");
    assert_eq!(dn["second"], "N");
    assert_eq!(code(&["coeffs", "--bc", "Q"]), 2);
    assert_eq!(code(&["coeffs", "--bc", "D/EM"]), 2);
    assert_eq!(code(&["coeffs"]), 2);
    assert_eq!(code(&["coeffs", "-b", "D"]), 2);
}

#[test]
fn geometry_sphere_plate_slope() {
    let text = ok(&["geometry", "--shape", "sphere-plate", "--bc", "D", "--sweep", "0.001,0.003,0.01"]);
    assert!(text.starts_with("d_over_R,E_over_EPFA,method\n"));
    for row in csv_rows(&text) {
        // 12 printed digits leave ~1e-11 absolute on the ratio
        assert!(((row[1] - 1.0) / row[0] - 1.0 / 3.0).abs() < 1e-7);
    }
    let quad = ok(&[
        "geometry", "--shape", "sphere-plate", "--bc", "D", "--sweep", "0.001,0.003,0.01", "--method", "quadrature",
    ]);
    assert!(quad.lines().skip(1).all(|l| l.ends_with(",quadrature")));
    for row in csv_rows(&quad) {
        assert!(((row[1] - 1.0) / row[0] - 1.0 / 3.0).abs() < 0.01);
    }
}

#[test]
fn geometry_hyperboloid_and_cylinders() {
    let text = ok(&["geometry", "--shape", "hyperboloid", "--bc", "EM", "--lambda", "1.2011", "--sweep", "0.01,0.1"]);
    for row in csv_rows(&text) {
        assert!((row[1] - 1.0).abs() < 1e-3 * row[0]);
    }
    let cyl = ok(&["geometry", "--shape", "cylinders", "--theta", "0.6,1.3", "--sweep", "0.01,0.05"]);
    let rows = csv_rows(&cyl);
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0][2], rows[2][2]);
    assert_eq!(rows[1][2], rows[3][2]);
}

#[test]
fn geometry_profile_descriptor() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bump.json");
    std::fs::write(
        &p,
        r#"{"kind":"polynomial","offset":0,"terms":[{"px":2,"py":0,"coeff":0.5},{"px":0,"py":2,"coeff":0.5}]}"#,
    )
    .unwrap();
    let text = ok(&["geometry", "--shape", "profile", "--profile", p.to_str().unwrap(), "--sweep", "0.001"]);
    let row = &csv_rows(&text)[0];
    // paraboloid: E/E_PFA − 1 → 2β d/R
    assert!(((row[1] - 1.0) / row[0] - 4.0 / 3.0).abs() < 0.03);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"kind":"torus"}"#).unwrap();
    let out = run(&["geometry", "--shape", "profile", "--profile", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("torus"));
    assert_eq!(code(&["geometry", "--shape", "profile", "--method", "closed", "--profile", p.to_str().unwrap()]), 2);
}

#[test]
fn geometry_domain_errors() {
    assert_eq!(code(&["geometry", "--shape", "sphere-plate", "--radius", "0"]), 3);
    assert_eq!(code(&["geometry", "--shape", "cylinders", "--theta", "0"]), 3);
}

#[test]
fn kernel_match_reports_beta() {
    let kernel = fixtures().join("kernel_D.csv");
    let v: serde_json::Value =
        serde_json::from_str(&ok(&["kernel-match", "--kernel", kernel.to_str().unwrap(), "--json"])).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for r in rows {
        let beta = r["beta"].as_f64().unwrap();
        assert!((beta - 2.0 / 3.0).abs() <= r["beta_uncertainty"].as_f64().unwrap().max(1e-6));
    }
}

#[test]
fn kernel_match_violation_is_numerical() {
    let dir = tempfile::tempdir().unwrap();
    let src = std::fs::read_to_string(fixtures().join("kernel_D.csv")).unwrap();
    let mut out = String::new();
    for (i, line) in src.lines().enumerate() {
        if i == 0 {
            out.push_str(line);
        } else {
            let mut cells: Vec<String> = line.split(',').map(String::from).collect();
            let g: f64 = cells[2].parse().unwrap();
            cells[2] = format!("{}", g * 1.01);
            out.push_str(&cells.join(","));
        }
        out.push('\n');
    }
    let path = dir.path().join("k.csv");
    std::fs::write(&path, out).unwrap();
    let res = run(&["kernel-match", "--kernel", path.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&res.stderr).contains("gamma"));
}

#[test]
fn pade_subcommands() {
    let d = fixtures().join("ae_D.json");
    let d = d.to_str().unwrap();
    let th: serde_json::Value = serde_json::from_str(&ok(&["pade", "thetas", "--fixture", d, "--json"])).unwrap();
    assert!((th[0]["theta1"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-9);
    assert!((th[0]["theta2"].as_f64().unwrap() - 0.08).abs() < 0.03);
    let poles: serde_json::Value = serde_json::from_str(&ok(&["pade", "poles", "--fixture", d, "--json"])).unwrap();
    assert!(poles["poles"].as_array().unwrap().iter().all(|p| !p["cancelled_by"].is_null()));
    let built: serde_json::Value = serde_json::from_str(&ok(&["pade", "build", "--fixture", d, "--json"])).unwrap();
    assert_eq!(built["m"], 7);
    let eval = ok(&["pade", "eval", "--fixture", d, "--r", "0.0001"]);
    let f = csv_rows(&eval)[0][1];
    // f ≈ f₁ r³ at small r with f₁ = −1/(4π)
    let f1 = -1.0 / (4.0 * std::f64::consts::PI);
    assert!((f / 1e-12 / f1 - 1.0).abs() < 1e-3);
    let em = fixtures().join("ae_EM.json");
    let text = ok(&["pade", "poles", "--fixture", em.to_str().unwrap(), "--energy"]);
    assert!(text.contains("has uncancelled poles"));
    assert_eq!(code(&["pade", "thetas", "--fixture", d, "--energy"]), 2);
    assert_eq!(code(&["pade", "build", "--fixture", d, "--n", "6"]), 2);
}

#[test]
fn pade_curve_round_trips_through_fit_theta() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    ok(&[
        "pade",
        "curve",
        "--fixture",
        fixtures().join("ae_D.json").to_str().unwrap(),
        "--sweep",
        "0.01:0.05:10",
        "--out",
        out.to_str().unwrap(),
    ]);
    let curve = out.join("pade_curve.csv");
    let fit: serde_json::Value = serde_json::from_str(&ok(&[
        "fit-theta",
        "--curve",
        curve.to_str().unwrap(),
        "--range",
        "0.01:0.05",
        "--json",
    ]))
    .unwrap();
    assert!((fit["theta1"].as_f64().unwrap() - 1.0 / 3.0).abs() < 2e-3);
    assert_eq!(code(&["fit-theta", "--curve", curve.to_str().unwrap(), "--range", "0.5:0.9"]), 2);
    assert_eq!(code(&["fit-theta", "--curve", curve.to_str().unwrap(), "--range", "0.5:0.1"]), 2);
}

#[test]
fn out_dir_manifest_digests_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let fx = fixtures().join("ae_D.json");
    let args = |o: &Path| {
        vec![
            "pade".to_string(),
            "curve".into(),
            "--fixture".into(),
            fx.to_str().unwrap().into(),
            "--out".into(),
            o.to_str().unwrap().into(),
        ]
    };
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for o in [&a, &b] {
        let st = bin().args(args(o)).status().unwrap();
        assert!(st.success());
    }
    let m: serde_json::Value = serde_json::from_slice(&std::fs::read(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["command"], "pade curve");
    assert_eq!(m["tool"], "casimir-pfa-cli");
    let digest = |p: &Path| hex::encode(Sha256::digest(std::fs::read(p).unwrap()));
    assert_eq!(m["fixtures"][0]["sha256"], digest(&fx));
    for o in m["outputs"].as_array().unwrap() {
        let name = o["path"].as_str().unwrap();
        assert_eq!(o["sha256"], digest(&a.join(name)));
        assert_eq!(std::fs::read(a.join(name)).unwrap(), std::fs::read(b.join(name)).unwrap());
    }
}

#[test]
fn oracle_commands() {
    let e: serde_json::Value = serde_json::from_str(&ok(&[
        "oracle", "energy", "--d-over-r", "1", "--ell-max", "20", "--json",
    ]))
    .unwrap();
    assert!((e["ratio"].as_f64().unwrap() - 1.2166770).abs() < 1e-6);
    assert!(e["energy"].as_f64().unwrap() < 0.0);
    let curve = ok(&["oracle", "curve", "--grid", "0.5,1", "--ell-max", "20"]);
    assert_eq!(csv_rows(&curve).len(), 2);
    assert_eq!(code(&["oracle", "energy", "--d-over-r", "0.01"]), 3);
    assert_eq!(code(&["oracle", "energy", "--d-over-r", "1", "--ell-max", "5"]), 2);
}

#[test]
fn figure1_without_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig");
    ok(&[
        "figure1",
        "--fixtures",
        fixtures().to_str().unwrap(),
        "--no-oracle",
        "--sweep",
        "0.1:1:8",
        "--out",
        out.to_str().unwrap(),
    ]);
    let read = |bc: &str| csv_rows(&std::fs::read_to_string(out.join(format!("figure1_{bc}.csv"))).unwrap());
    let (d, em) = (read("D"), read("EM"));
    for (rd, re) in d.iter().zip(&em) {
        assert_eq!(rd[0], re[0]);
        assert!(re[1] < rd[1]);
        assert!((rd[2] - (1.0 + rd[0] / 3.0)).abs() < 1e-11);
    }
    let gp = std::fs::read_to_string(out.join("figure1.gp")).unwrap();
    assert!(gp.contains("figure1_N.csv"));
    assert!(out.join("manifest.json").is_file());
}

#[test]
fn figure1_missing_fixture_names_schema() {
    let dir = tempfile::tempdir().unwrap();
    let res = run(&["figure1", "--fixtures", dir.path().to_str().unwrap(), "--no-oracle"]);
    assert_eq!(res.status.code(), Some(2));
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("ae_D.json") && err.contains("coefficients"));
}

#[test]
fn table1_gap_markers() {
    let v: serde_json::Value = serde_json::from_str(&ok(&["table1", "--no-oracle", "--json"])).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r["fit"].is_null()));
    assert!((rows[1]["exact"].as_f64().unwrap() + 3.7195).abs() < 1e-4);
    assert!((rows[2]["exact"].as_f64().unwrap() + 1.6931).abs() < 1e-4);
    let text = ok(&["table1", "--no-oracle"]);
    assert!(text.lines().nth(2).unwrap().contains("n/a"));
    assert!(text.contains("1/3 - 40/π²"));
}
