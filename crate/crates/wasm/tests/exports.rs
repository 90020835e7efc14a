use fflab_wasm::{bridge_json, kneser_json, rr_json};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn bridge_export() {
    let v = parse(bridge_json("0,1,2,3,5", 0).unwrap());
    assert_eq!(v["report"], "bridge");
    assert_eq!(v["gamma_add"], 1);
    assert!(bridge_json("0,a", 0).unwrap_err().contains("malformed input"));
}

#[test]
fn rr_export() {
    let v = parse(rr_json(1, 3, 101, "").unwrap());
    assert_eq!(v["basis"], serde_json::json!(["1", "x", "y"]));
    assert_eq!(v["table"].as_array().unwrap().len(), 4);
    let v = parse(rr_json(0, 5, 7, "x^5 + x + 3").unwrap());
    assert_eq!(v["genus"], 2);
    assert!(rr_json(1, 3, 101, "x^2").is_err());
}

#[test]
fn kneser_export() {
    let v = parse(kneser_json("0,2,4", 6).unwrap());
    assert_eq!(v["H_generator"], 2);
    assert!(kneser_json("1", 0).is_err());
}
