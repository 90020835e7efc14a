//! `wasm-bindgen` exports for the static demo page in `www/`.
//!
//! Each export returns a pretty-printed JSON document or throws an `Error`
//! whose message is the library error text.

use fflab_core::json::envelope;
use fflab_core::reports;
use wasm_bindgen::prelude::*;

fn render(kind: &str, r: fflab_core::Result<serde_json::Value>) -> Result<String, String> {
    r.map(|body| serde_json::to_string_pretty(&envelope(kind, body, None)).expect("values serialize"))
        .map_err(|e| e.to_string())
}

pub fn bridge_json(set: &str, characteristic: u32) -> Result<String, String> {
    render("bridge", reports::bridge_report(set, characteristic))
}

pub fn rr_json(genus: u32, n: i32, characteristic: u32, curve: &str) -> Result<String, String> {
    let body = reports::rr_model(genus as usize, characteristic, Some(curve)).and_then(|m| reports::rr_report(&m, n.into()));
    render("rr", body)
}

pub fn kneser_json(set: &str, modulus: u32) -> Result<String, String> {
    render("kneser-mod", reports::kneser_mod_report(set, modulus.into()))
}

/// Compare `A` (comma-separated integers) with its monomial subspace over `F_p`, or `Q` when `p = 0`.
#[wasm_bindgen]
pub fn bridge_report(set: &str, characteristic: u32) -> Result<String, JsError> {
    bridge_json(set, characteristic).map_err(|e| JsError::new(&e))
}

/// Riemann-Roch table for `L(n P_inf)`; an empty `curve` selects the default curve of the genus.
#[wasm_bindgen]
pub fn rr_table(genus: u32, n: i32, characteristic: u32, curve: &str) -> Result<String, JsError> {
    rr_json(genus, n, characteristic, curve).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn kneser_mod(set: &str, modulus: u32) -> Result<String, JsError> {
    kneser_json(set, modulus).map_err(|e| JsError::new(&e))
}
