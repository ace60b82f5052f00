use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn scorza(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scorza")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = scorza(&all);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout));
    });
    (out.status.code().unwrap(), v)
}

fn write_period(dir: &Path) -> String {
    let path = dir.join("omega.json");
    fs::write(&path, r#"{"g": 2, "omega": [[[0.1, 1.2], [0.3, 0.4]], [[0.3, 0.4], [-0.2, 1.5]]]}"#).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn szego_hodge_class_at_genus_three() {
    let (code, v) = json(&["picard", "szego-hodge", "--g", "3"]);
    assert_eq!(code, 0);
    let class = &v["results"];
    assert_eq!(class["lambda"], "103/2");
    assert_eq!(class["alpha"][0], "93/8");
    assert_eq!(class["alpha"][1], "0");
}

#[test]
fn slope_and_pullback() {
    let (code, v) = json(&["picard", "slope", "--g", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["slope"]["finite"], "1132/255");
    let (code, v) = json(&["picard", "pullback-delta0", "--g", "3"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["results"]["alpha"][0], "-5");
    assert_eq!(v["results"]["beta"][0], "-10");
    // c_beta0 = 0, so the G_0 . beta_0 reading does not move the class.
    let (code, v) = json(&["picard", "szego-hodge", "--g", "5", "--g0-beta0", "12"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["alpha"][0], "81/4");
    assert_eq!(v["results"]["lambda"], "90");
}

#[test]
fn thetanull_degeneration_text_report() {
    let out = scorza(&["degeneration", "--divisor", "thetanull", "--g", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("19"), "{text}");
    assert!(text.lines().any(|l| l.starts_with("PASS")), "{text}");
    assert!(!text.lines().any(|l| l.starts_with("FAIL")), "{text}");
}

#[test]
fn indexed_degenerations() {
    for (d, g, i, pa) in [("Ai", "4", "2", 37), ("Bi", "6", "3", 91), ("T-thetanull", "4", "", 19)] {
        let mut args = vec!["degeneration", "--divisor", d, "--g", g];
        if !i.is_empty() {
            args.extend(["--i", i]);
        }
        let (code, v) = json(&args);
        assert_eq!(code, 0, "{d}: {v}");
        assert!(v.to_string().contains(&format!("{pa}")), "{d}: {v}");
    }
    let out = scorza(&["degeneration", "--divisor", "Bi", "--g", "4", "--i", "1"]);
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn theta_jet_and_quartic_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let period = write_period(dir.path());
    let (code, v) = json(&["theta", "--period", &period, "--char", "1,0;0,1", "--point", "0.25,-0.1;-0.3,0.2"]);
    assert_eq!(code, 0);
    let re = v["results"]["value"][0].as_f64().unwrap();
    let im = v["results"]["value"][1].as_f64().unwrap();
    assert!((re - 0.540_490_939_828_441_7).abs() < 1e-11 && (im - 0.160_932_478_433_663_24).abs() < 1e-11);
    let (code, _) = json(&["jet", "--period", &period, "--char", "0,0;0,0"]);
    assert_eq!(code, 0);
    let (code, v) = json(&["quartic", "--period", &period, "--char", "0,0;0,0"]);
    assert_eq!(code, 0, "{v}");
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn szego_eval_flags_the_half_period() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tau.json");
    fs::write(&path, r#"{"g": 1, "omega": [[[0, 1]]]}"#).unwrap();
    let (code, v) = json(&["szego", "eval", "--period", path.to_str().unwrap(), "--char", "0;0", "--point", "0.5,0.5"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["on_locus"], true);
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let period = write_period(dir.path());
    for args in [
        vec!["theta", "--period", &period, "--char", "2,0;0,0"],
        vec!["theta", "--period", "/nonexistent/omega.json", "--char", "0,0;0,0"],
        vec!["theta", "--period", &period, "--char", "0,0;0,0", "--deriv", "0,0,0,0,0"],
        vec!["degeneration", "--divisor", "Z9", "--g", "4"],
    ] {
        let out = scorza(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"g": 1, "omega": [[[0, -1]]]}"#).unwrap();
    let out = scorza(&["theta", "--period", bad.to_str().unwrap(), "--char", "0;0"]);
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn ledger_replay_detects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let (code, v) = json(&["picard", "ledger", "--g", "5"]);
    assert_eq!(code, 0);
    let mut ledger = v["results"]["ledger"].clone();
    let path = dir.path().join("ledger.json");
    fs::write(&path, serde_json::to_string(&ledger).unwrap()).unwrap();
    let (code, _) = json(&["picard", "ledger", "--g", "5", "--replay", path.to_str().unwrap()]);
    assert_eq!(code, 0);

    let entries = ledger["entries"].as_array_mut().unwrap();
    let e = entries.iter_mut().find(|e| e["name"] == "B").unwrap();
    e["value"] = Value::from("1000");
    fs::write(&path, serde_json::to_string(&ledger).unwrap()).unwrap();
    let (code, v) = json(&["picard", "ledger", "--g", "5", "--replay", path.to_str().unwrap()]);
    assert_ne!(code, 0);
    assert_eq!(v["checks"][0]["pass"], false);
}

#[test]
fn json_reports_are_deterministic() {
    let a = scorza(&["picard", "szego-hodge", "--g", "7", "--format", "json"]);
    let b = scorza(&["picard", "szego-hodge", "--g", "7", "--format", "json"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_all_quick_passes() {
    let out = scorza(&["verify-all", "--quick", "--seed", "7"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success(), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 12, "{text}");
}
