use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fflab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fflab")).args(args).output().expect("spawn fflab")
}

fn instance(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "instances", name].iter().collect();
    p.to_str().unwrap().to_owned()
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("one JSON document")
}

#[test]
fn verify_genus1_instance() {
    let v = json(&fflab(&["verify", &instance("genus1_L4.json")]));
    assert_eq!(v["report_version"], 1);
    assert_eq!(v["codim_ok"], true);
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["instance"]["model"]["kind"], "hyperelliptic");
}

#[test]
fn verify_reports_inapplicable_hypothesis_without_failing() {
    let v = json(&fflab(&["verify", &instance("hypothesis_fails.json")]));
    assert_eq!(v["hypothesis_met"], false);
    assert_eq!(v["verdict"], "not-applicable");
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{").unwrap();
    let o = fflab(&["verify", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("malformed input"));
    assert!(o.stdout.is_empty());

    let missing = dir.path().join("missing.json");
    assert_eq!(fflab(&["verify", missing.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(fflab(&["kneser-mod", "--set", "0,x", "--mod", "6"]).status.code(), Some(2));
    assert_eq!(fflab(&["bridge", "--set", "0,1,2", "--char", "4"]).status.code(), Some(2));
}

#[test]
fn bridge_examples() {
    let v = json(&fflab(&["bridge", "--set", "0,1,2,3,5"]));
    assert_eq!(v["gamma_add"], 1);
    assert_eq!(v["codim"], 1);
    assert_eq!(v["dimS2"], 10);
    assert_eq!(v["consistent"], true);

    let v = json(&fflab(&["bridge", "--set", "0,1,3"]));
    assert_eq!(v["hypothesis_met"], false);

    let o = fflab(&["bridge", "--set", "0"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("< 3"));
    assert_eq!(json(&o)["classical"], Value::Null);

    let v = json(&fflab(&["bridge", "--set", "-4,2,8", "--char", "101"]));
    assert_eq!(v["A"], serde_json::json!([0, 1, 2]));
    assert_eq!(v["normalization"]["scale"], 6);
}

#[test]
fn rr_examples() {
    let v = json(&fflab(&["rr", "--genus", "1", "--n", "3"]));
    assert_eq!(v["basis"], serde_json::json!(["1", "x", "y"]));
    let v = json(&fflab(&["rr", "--genus", "2", "--n", "2"]));
    assert_eq!(v["basis"], serde_json::json!(["1", "x"]));
    assert!(v["table"].as_array().unwrap().iter().all(|r| r["ok"] == true));
    let v = json(&fflab(&["rr", "--n", "4", "--char", "7", "--curve", "x^5 + 3"]));
    assert_eq!(v["genus"], 2);
    assert_eq!(v["dim"], 3);
    assert_eq!(fflab(&["rr", "--genus", "3", "--n", "4"]).status.code(), Some(2));
}

#[test]
fn kneser_mod_example() {
    let v = json(&fflab(&["kneser-mod", "--set", "0,2,4", "--mod", "6"]));
    assert_eq!(v["H_generator"], 2);
    assert_eq!(v["H"], serde_json::json!([0, 2, 4]));
    let v = json(&fflab(&["kneser-mod", "--set", "0,1", "--mod", "5"]));
    assert_eq!(v["H_order"], 1);
}

#[test]
fn stabilizer_on_tower_instance() {
    let v = json(&fflab(&["stabilizer", "--instance", &instance("tower.json")]));
    assert_eq!(v["stabilizer"]["ell"], 2);
    assert_eq!(v["stabilizer"]["d"], 4);
    assert_eq!(v["abc"]["iterations"], 1);
}

#[test]
fn eval_report_needs_extension_for_l5() {
    let v = json(&fflab(&["eval-report", "--instance", &instance("genus1_L5.json")]));
    assert!(v["evaluation"]["error"].as_str().unwrap().contains("extend the base field"));
    let v = json(&fflab(&["eval-report", "--instance", &instance("genus1_L5.json"), "--ext", "2"]));
    assert_eq!(v["field"], "F_101^2");
    assert_eq!(v["evaluation"]["equality"], true);
    assert_eq!(v["evaluation"]["kernel_ok"], true);
}

#[test]
fn search_is_deterministic_and_lines_reverify() {
    let args = ["search", "--seed", "42", "--trials", "30", "--genus", "1"];
    let a = fflab(&args);
    let b = fflab(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 30);
    // Each emitted instance re-verifies to the same report.
    let dir = tempfile::tempdir().unwrap();
    for (i, l) in lines.iter().enumerate().step_by(7) {
        assert_eq!(l["trial"], i);
        let path = dir.path().join(format!("t{i}.json"));
        std::fs::write(&path, l["instance"].to_string()).unwrap();
        let v = json(&fflab(&["verify", path.to_str().unwrap()]));
        for key in ["k", "gamma", "codim", "rr_dim", "verdict", "D"] {
            assert_eq!(v[key], l["theorem"][key], "trial {i} field {key}");
        }
    }
}

#[test]
fn search_genus0_passes_assertions() {
    let o = fflab(&["search", "--seed", "3", "--trials", "60", "--genus", "0", "--k-range", "5,10"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().all(|l| !l.contains("\"assertion\"") && !l.contains("\"error\"")));
}

#[test]
fn search_rejects_impossible_configs() {
    assert_eq!(fflab(&["search", "--genus", "3"]).status.code(), Some(2));
    assert_eq!(fflab(&["search", "--k-range", "5,4"]).status.code(), Some(2));
    assert_eq!(fflab(&["search", "--genus", "1", "--char", "2"]).status.code(), Some(2));
}
