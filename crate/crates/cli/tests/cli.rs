use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

const SILICON: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/silicon.cfg");
const NEUTRAL: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/neutral.cfg");

// the lab-unit silicon config written in SI
const SILICON_SI: &str = "\
eta = 6.2e8 Pa*s
shear_modulus = 3.1e10 Pa
bulk_modulus = 3.1e10 Pa
surface_energy = 1 J/m2
flux = 3.5e19 /m2/s
strain_per_dose = 5e-21 m2
thickness = 2e-9 m
measured_stress = 1.4e9 Pa
sweep_variable = k
sweep_min = 1e7 /m
sweep_max = 2e9 /m
sweep_count = 40
sweep_spacing = log
";

fn scratch(name: &str, text: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("ionfilm-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path
}

fn ionfilm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ionfilm")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let idx = lines.next().unwrap().split(',').position(|c| c == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().to_string()).collect()
}

fn steady_value(csv: &str, quantity: &str) -> String {
    csv.lines()
        .find_map(|l| l.strip_prefix(&format!("{quantity},")))
        .unwrap_or_else(|| panic!("{quantity} missing"))
        .to_string()
}

#[test]
fn steady_report() {
    let out = ionfilm(&["steady", "--config", SILICON]);
    assert_eq!(out.status.code(), Some(0));
    let csv = stdout(&out);
    let lateral: f64 = steady_value(&csv, "lateral_stress_magnitude").parse().unwrap();
    assert!((lateral - 6.51e8).abs() < 1e-6 * 6.51e8, "{lateral}");
    let ratio: f64 = steady_value(&csv, "measured_to_computed_ratio").parse().unwrap();
    assert!((ratio - 1.4e9 / 6.51e8).abs() < 1e-12, "{ratio}");
}

#[test]
fn dispersion_is_deterministic() {
    let a = ionfilm(&["dispersion", "--config", SILICON]);
    let b = ionfilm(&["dispersion", "--config", SILICON]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let sigma = column(&stdout(&a), "sigma");
    assert_eq!(sigma.len(), 40);
    assert!(sigma.iter().all(|s| s.parse::<f64>().unwrap() < 0.0));
}

#[test]
fn lab_units_match_si_bit_for_bit() {
    let si = scratch("si.cfg", SILICON_SI);
    for mode in ["steady", "dispersion"] {
        let lab = ionfilm(&[mode, "--config", SILICON]);
        let twin = ionfilm(&[mode, "--config", si.to_str().unwrap()]);
        assert_eq!(stdout(&lab), stdout(&twin), "{mode}");
    }
}

#[test]
fn json_round_trips_csv_values() {
    let csv = stdout(&ionfilm(&["dispersion", "--config", SILICON]));
    let json: Value = serde_json::from_slice(&ionfilm(&["dispersion", "--config", SILICON, "--format", "json"]).stdout).unwrap();
    assert_eq!(json["config_echo"]["mode"], "dispersion");
    assert!(json["metadata"]["runtime_s"].as_f64().unwrap() >= 0.0);
    let results = json["results"].as_array().unwrap();
    for (row, text) in results.iter().zip(column(&csv, "sigma")) {
        assert_eq!(row["sigma"].as_f64().unwrap().to_bits(), text.parse::<f64>().unwrap().to_bits());
    }
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("ionfilm-cli-{}-neutral.csv", std::process::id()));
    let out = ionfilm(&["neutral", "--config", NEUTRAL, "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(&path).unwrap();
    let d = column(&csv, "D_star");
    assert_eq!(d.len(), 300);
    // -2C[(2Q)^2/6 + (2Q)^4/120 + (2Q)^6/5040] at Q = 0.01, C = 1
    let series = -2.0 * (4e-4 / 6.0 + 1.6e-7 / 120.0 + 6.4e-11 / 5040.0);
    let first: f64 = d[0].parse().unwrap();
    assert!((first - series).abs() < 1e-12 * series.abs(), "{first}");
}

#[test]
fn viscous_mode_accepts_rigid_moduli() {
    let cfg = scratch(
        "viscous.cfg",
        "eta = 6.2e8 Pa*s\nshear_modulus = inf\nsurface_energy = 1 J/m2\nflux = 0 /m2/s\nstrain_per_dose = 5e-21 m2\nthickness = 2e-9 m\n\
         sweep_variable = Q\nsweep_min = 1\nsweep_max = 1\nsweep_count = 1\n",
    );
    let out = ionfilm(&["viscous", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let sigma: f64 = column(&stdout(&out), "sigma")[0].parse().unwrap();
    // capillary leveling: sigma 2 eta / (k gamma) at hk = 1
    let k = 1.0 / 2e-9;
    let expected = -(2f64.sinh() - 2.0) / (3.0 + 2f64.cosh());
    assert!((sigma * 2.0 * 6.2e8 / k - expected).abs() < 1e-12);
    let rejected = ionfilm(&["dispersion", "--config", cfg.to_str().unwrap()]);
    assert_eq!(rejected.status.code(), Some(1));
}

#[test]
fn zero_flux_steady_state_has_no_ratio() {
    let cfg = scratch(
        "zero-flux.cfg",
        "eta = 6.2e8 Pa*s\nbulk_modulus = 3.1e10 Pa\nflux = 0 /m2/s\nstrain_per_dose = 5e-21 m2\nmeasured_stress = 1e9 Pa\n",
    );
    let out = ionfilm(&["steady", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = stdout(&out);
    assert_eq!(steady_value(&csv, "measured_to_computed_ratio"), "");
    assert_eq!(steady_value(&csv, "stress_xx").parse::<f64>().unwrap(), 0.0);
}

#[test]
fn single_point_verification() {
    let cfg = scratch(
        "verify-one.cfg",
        "eta = 6.2e8 Pa*s\nshear_modulus = 31 GPa\nstrain_per_dose = 5e-21 m2\nthickness = 2e-9 m\n\
         verify_q = 0.5\nverify_d = 0.2\nverify_c = 0.1\nverify_gamma = 10\n",
    );
    let out = ionfilm(&["verify", "--config", cfg.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = json["results"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert!(rows[0]["rel_deviation"].as_f64().unwrap() < 1e-6);
    assert_eq!(json["metadata"]["summary"]["failed_points"], 0.0);
}

#[test]
fn coarse_verification_fails_with_exit_three() {
    let cfg = scratch(
        "verify-coarse.cfg",
        "eta = 6.2e8 Pa*s\nshear_modulus = 31 GPa\nstrain_per_dose = 5e-21 m2\nthickness = 2e-9 m\nn_steps = 10\n\
         verify_q = 2\nverify_d = 1\nverify_c = 0.1\nverify_gamma = 10\n",
    );
    let out = ionfilm(&["verify", "--config", cfg.to_str().unwrap(), "--tol", "1e-10"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn configuration_errors_exit_one() {
    let missing = ionfilm(&["steady", "--config", "/nonexistent/ionfilm.cfg"]);
    assert_eq!(missing.status.code(), Some(1));
    let unknown = scratch("unknown.cfg", "colour = blue\n");
    assert_eq!(ionfilm(&["steady", "--config", unknown.to_str().unwrap()]).status.code(), Some(1));
    let unit = scratch("unit.cfg", "eta = 6.2e8 furlongs\n");
    assert_eq!(ionfilm(&["steady", "--config", unit.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(ionfilm(&["steady", "--config", SILICON, "--format", "xml"]).status.code(), Some(1));
    assert_eq!(ionfilm(&["dispersion", "--config", SILICON, "--gamma-ratio", "-2"]).status.code(), Some(1));
    assert_eq!(ionfilm(&["bogus", "--config", SILICON]).status.code(), Some(1));
    let incomplete = scratch("incomplete.cfg", "eta = 6.2e8 Pa*s\nflux = 1 /m2/s\n");
    let out = ionfilm(&["steady", "--config", incomplete.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bulk_modulus"));
}

#[test]
fn gamma_ratio_override_changes_rates() {
    let base = column(&stdout(&ionfilm(&["dispersion", "--config", SILICON])), "sigma");
    let stiff = ionfilm(&["dispersion", "--config", SILICON, "--gamma-ratio", "inf"]);
    assert_eq!(stiff.status.code(), Some(0));
    let stiff = column(&stdout(&stiff), "sigma");
    assert_ne!(base, stiff);
    assert!(stiff.iter().all(|s| s.parse::<f64>().unwrap() < 0.0));
}
