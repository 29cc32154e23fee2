//! Browser bindings. Every export returns a JSON string; failures come back
//! as `{"error": "..."}` so the page never has to catch exceptions.

use mubeq::basis::{is_unbiased, mubness};
use mubeq::dim4::{
    h4_point, is_generic, orbit_map, orbit_separation, triple_equivalent, verify_dim4, TripleParams,
};
use mubeq::linalg::Tolerance;
use mubeq::Result;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const GENERIC_MARGIN: f64 = 1e-3;
const PARAM_EPS: f64 = 1e-6;

fn respond(result: Result<Value>) -> String {
    match result {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

fn params_value(p: TripleParams) -> Value {
    json!({ "y": p.y(), "z": p.z() })
}

fn orbit_report(y: f64, z: f64) -> Result<Value> {
    let p = TripleParams::new(y, z)?;
    let images: Vec<Value> = orbit_map(p).into_iter().map(params_value).collect();
    Ok(json!({
        "params": params_value(p),
        "images": images,
        "generic": is_generic(p, GENERIC_MARGIN),
        "separation": orbit_separation(p),
    }))
}

fn comparison_report(y1: f64, z1: f64, y2: f64, z2: f64) -> Result<Value> {
    let tol = Tolerance::default();
    let (p, q) = (TripleParams::new(y1, z1)?, TripleParams::new(y2, z2)?);
    let (hp, hq) = (h4_point(p), h4_point(q));
    Ok(json!({
        "distance": mubness(&hp, &hq)?,
        "maximum": 3f64.sqrt(),
        "unbiased": is_unbiased(&hp, &hq, tol)?,
        "equivalent": triple_equivalent(p, q, Tolerance::new(PARAM_EPS)?),
    }))
}

fn stabilizer_report(y: f64, z: f64) -> Result<Value> {
    let report = verify_dim4(TripleParams::new(y, z)?, Tolerance::default())?;
    Ok(json!({
        "order": report.stabilizer_order,
        "orbit_size": report.numeric_orbit_size,
        "passed": report.passed(),
        "mismatches": report.mismatches,
    }))
}

/// The images of `(y, z)` under the four-element orbit map.
#[wasm_bindgen]
pub fn dim4_orbit(y: f64, z: f64) -> String {
    respond(orbit_report(y, z))
}

/// Distance between `H4(y1, z1)` and `H4(y2, z2)`, and whether the triples
/// they complete are equivalent.
#[wasm_bindgen]
pub fn compare_triples(y1: f64, z1: f64, y2: f64, z2: f64) -> String {
    respond(comparison_report(y1, z1, y2, z2))
}

/// Order of the stabilizer of `{e, F4(0), H4(y, z)}` with the cross-check verdict.
#[wasm_bindgen]
pub fn triple_stabilizer(y: f64, z: f64) -> String {
    respond(stabilizer_report(y, z))
}
