use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn repulse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_repulse"))
        .args(args)
        .env_remove("REPULSE_SEED")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

fn num(v: &Value, key: &str) -> f64 {
    match &v[key] {
        Value::String(s) => s.parse().expect("decimal string"),
        other => other.as_f64().expect("number"),
    }
}

#[test]
fn salpha_four_brackets_root_two() {
    let o = repulse(&["salpha", "--alpha", "4", "--tol", "1e-12"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    let (lo, hi) = (num(&v, "s_lo"), num(&v, "s_hi"));
    // the root lies between SQRT_2 and the double below it
    let r = std::f64::consts::SQRT_2;
    assert!(lo <= r.next_down() && r <= hi);
    assert!(hi - lo <= 1e-12);
    for k in ["s_pow_alpha_lo", "s_pow_alpha_hi", "energy_lo", "energy_hi"] {
        assert!(v[k].is_string(), "{k} is a decimal string");
    }
}

#[test]
fn salpha_twelve_in_asymptotic_window() {
    let o = repulse(&["salpha", "--alpha", "12"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert!(num(&v, "s_pow_alpha_lo") >= 19.0 && num(&v, "s_pow_alpha_hi") <= 21.0);
}

#[test]
fn salpha_rejects_odd_exponent() {
    assert_eq!(code(&repulse(&["salpha", "--alpha", "7"])), 2);
    assert_eq!(code(&repulse(&["salpha", "--alpha", "2"])), 2);
}

#[test]
fn energy_and_aux_outputs() {
    let o = repulse(&["energy", "--alpha", "4", "--t", "1.4142135623730951"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    let (lo, hi) = (num(&v, "total_lo"), num(&v, "total_hi"));
    let (clo, chi) = (num(&v, "closed_form_lo"), num(&v, "closed_form_hi"));
    assert!(lo <= chi && clo <= hi);

    let o = repulse(&["psi", "--alpha", "6", "--x", "0", "1", "-2"]);
    assert_eq!(code(&o), 0);
    let vals = stdout_json(&o)["values"].as_array().unwrap().clone();
    assert_eq!(vals.len(), 3);
    let at0 = (num(&vals[0], "lo"), num(&vals[0], "hi"));
    assert!(at0.0 <= 1.0 && 1.0 <= at0.1);

    let o = repulse(&["psihat", "--alpha", "4", "--xi", "1.5", "-3"]);
    assert_eq!(code(&o), 0);
    for v in stdout_json(&o)["values"].as_array().unwrap() {
        assert_eq!((num(v, "lo"), num(v, "hi")), (0.0, 0.0));
    }
}

#[test]
fn certify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c4.json");
    let o = repulse(&["certify", "--alpha", "4", "--inequality", "all", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let certs: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let certs = certs.as_array().unwrap();
    assert!(certs.len() >= 4);
    assert!(certs.iter().all(|c| c["status"] == "verified"));
    assert!(Path::new(&format!("{}.manifest.json", out.display())).exists());

    assert_eq!(code(&repulse(&["certify", "--alpha", "6", "--inequality", "L"])), 0);
    assert_eq!(code(&repulse(&["certify", "--alpha", "6", "--inequality", "T", "--max-depth", "0"])), 4);
    assert_eq!(code(&repulse(&["certify", "--alpha", "5", "--inequality", "T"])), 2);
    assert_eq!(code(&repulse(&["certify", "--inequality", "T"])), 2);
}

#[test]
fn certify_large_alpha_uses_closed_bounds() {
    for (ineq, id) in [("T", "T_alpha"), ("L", "L_alpha"), ("eta2", "far_field_const")] {
        let o = repulse(&["certify", "--alpha", "60", "--inequality", ineq]);
        assert_eq!(code(&o), 0, "{ineq}");
        let v = stdout_json(&o);
        assert_eq!(v[0]["inequality_id"], id);
        assert_eq!(v[0]["status"], "verified");
    }
}

#[test]
fn simulate_alpha4_cluster_statistics() {
    let o = repulse(&["simulate", "--alpha", "4", "--rho", "8", "--length", "30", "--seed", "7"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    let m = v["clusters"].as_u64().unwrap();
    assert!((19..=23).contains(&m), "{m} clusters");
    let sp = v["mean_spacing"].as_f64().unwrap();
    assert!((sp / 2f64.sqrt() - 1.0).abs() <= 0.1, "spacing {sp}");
    assert!(v["energy_per_particle"].as_f64().unwrap().is_finite());
}

#[test]
fn simulate_alpha6_spacing_near_solver() {
    let s6 = num(&stdout_json(&repulse(&["salpha", "--alpha", "6"])), "s_lo");
    let o = repulse(&["simulate", "--alpha", "6", "--rho", "10", "--length", "30", "--seed", "1"]);
    assert_eq!(code(&o), 0);
    let sp = stdout_json(&o)["mean_spacing"].as_f64().unwrap();
    assert!((sp / s6 - 1.0).abs() <= 0.1, "spacing {sp} vs {s6}");
}

#[test]
fn simulate_two_particles() {
    let o = repulse(&["simulate", "--alpha", "4", "--rho", "0.02", "--length", "100", "--seed", "1"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["count"], 2);
    assert!((v["mean_spacing"].as_f64().unwrap() - 50.0).abs() < 1e-3);
}

#[test]
fn simulate_rounds_density_with_warning() {
    let o = repulse(&["simulate", "--alpha", "4", "--rho", "0.33", "--length", "10", "--seed", "2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["count"], 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("rounded"));
}

#[test]
fn simulate_reports_non_convergence() {
    let o = repulse(&["simulate", "--alpha", "4", "--rho", "4", "--length", "10", "--iters", "1"]);
    assert_eq!(code(&o), 5);
    assert_eq!(stdout_json(&o)["converged"], false);
}

#[test]
fn env_seed_overrides_flag() {
    let run = |env: Option<&str>, seed: &str| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_repulse"));
        c.args(["simulate", "--alpha", "4", "--rho", "2", "--length", "6", "--seed", seed]);
        match env {
            Some(e) => c.env("REPULSE_SEED", e),
            None => c.env_remove("REPULSE_SEED"),
        };
        stdout_json(&c.output().unwrap())
    };
    let a = run(Some("9"), "1");
    assert_eq!(a["seed"], 9);
    assert_eq!(a, run(None, "9"));
}

#[test]
fn reruns_reproduce_data_files() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    for tag in ["a", "b"] {
        let o = repulse(&[
            "simulate", "--alpha", "6", "--rho", "3", "--length", "10", "--seed", "4",
            "--csv", &p(&format!("{tag}.csv")), "--svg", &p(&format!("{tag}.svg")),
        ]);
        assert_eq!(code(&o), 0);
        let o = repulse(&["certify", "--alpha", "6", "--inequality", "eta0", "--out", &p(&format!("{tag}.json"))]);
        assert_eq!(code(&o), 0);
    }
    for ext in ["csv", "svg"] {
        let a = std::fs::read(p(&format!("a.{ext}"))).unwrap();
        let b = std::fs::read(p(&format!("b.{ext}"))).unwrap();
        assert_eq!(a, b, "{ext} differs");
    }
    let strip = |name: &str| {
        let mut v: Value = serde_json::from_str(&std::fs::read_to_string(p(name)).unwrap()).unwrap();
        for c in v.as_array_mut().unwrap() {
            c["wall_time_ms"] = Value::Null;
        }
        v
    };
    assert_eq!(strip("a.json"), strip("b.json"));

    let man: Value = serde_json::from_str(&std::fs::read_to_string(p("a.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(man["command"], "simulate");
    for out in man["outputs"].as_array().unwrap() {
        assert!(Path::new(out.as_str().unwrap()).exists());
    }
    assert!(man["parameters"]["seed"] == "4");
}

#[test]
fn explicit_manifest_path() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("run.json");
    let o = repulse(&["--manifest", m.to_str().unwrap(), "certify", "--alpha", "8", "--inequality", "w"]);
    assert_eq!(code(&o), 0);
    let man: Value = serde_json::from_str(&std::fs::read_to_string(&m).unwrap()).unwrap();
    assert_eq!(man["command"], "certify");
    assert!(man["finished_unix_ms"].as_u64().unwrap() >= man["started_unix_ms"].as_u64().unwrap());
}
