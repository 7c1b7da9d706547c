//! WebAssembly bindings for the static page in `www/`.
//!
//! Every export returns a JSON string; failures come back as
//! `{"error": "..."}` so the page never has to catch exceptions.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use mvnm::engine::{compute_moment, Engine};
use mvnm::marriage::count_marriages;
use mvnm::pure::{discover, PureOptions, RecurrenceCache, SearchLimits};
use mvnm::{CovarianceSpec, MultiIndex, Var};

/// Largest total order the page accepts, to keep the tab responsive.
pub const MAX_TOTAL: u32 = 400;

fn wrap(r: Result<Value, String>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

fn parse_inputs(k: usize, m: &str, cov: &str) -> Result<(CovarianceSpec, MultiIndex), String> {
    let cov = CovarianceSpec::parse(k, cov.trim()).map_err(|e| e.to_string())?;
    let m: MultiIndex = m.trim().parse().map_err(|e: mvnm::ParseError| e.to_string())?;
    if m.len() != k {
        return Err(format!("expected {k} exponents, got {}", m.len()));
    }
    if m.total() > MAX_TOTAL {
        return Err(format!("total order is limited to {MAX_TOTAL} here"));
    }
    Ok((cov, m))
}

pub fn moment_json(k: usize, m: &str, cov: &str, engine: &str) -> Result<Value, String> {
    let (cov, m) = parse_inputs(k, m, cov)?;
    let engine: Engine = engine.parse().map_err(|e: mvnm::Error| e.to_string())?;
    let r = compute_moment(&cov, &m, engine, &PureOptions::default(), RecurrenceCache::global())
        .map_err(|e| e.to_string())?;
    let mut v: Value = serde_json::from_str(&r.to_json()).map_err(|e| e.to_string())?;
    v["text"] = json!(r.value.to_string());
    Ok(v)
}

/// Counts of pairings of `m1 + m2` people with exactly `r` mixed pairs.
pub fn marriages_json(m1: u32, m2: u32) -> Result<Value, String> {
    if m1 + m2 > MAX_TOTAL {
        return Err(format!("total order is limited to {MAX_TOTAL} here"));
    }
    let m = MultiIndex::new([m1, m2]);
    let mut rows = Vec::new();
    for r in 0..=m1.min(m2) {
        let cross = [(Var::new(1, 2), r)].into();
        let n = count_marriages(&m, &cross).map_err(|e| e.to_string())?;
        if n != 0.into() {
            rows.push(json!({ "r": r, "count": n.to_string() }));
        }
    }
    Ok(json!({ "m": [m1, m2], "rows": rows }))
}

pub fn discover_json(k: usize, direction: usize, fixed: &str, cov: &str) -> Result<Value, String> {
    if direction == 0 || direction > k {
        return Err(format!("direction must be between 1 and {k}"));
    }
    let (cov, fixed) = parse_inputs(k, fixed, cov)?;
    let fixed = fixed.with(direction - 1, 0);
    let rec = discover(&cov, direction - 1, &fixed, &SearchLimits::default()).map_err(|e| e.to_string())?;
    Ok(json!({
        "order": rec.order,
        "degree": rec.degree(),
        "step": rec.step,
        "offset": rec.offset,
        "recurrence": serde_json::from_str::<Value>(&rec.to_json()).map_err(|e| e.to_string())?,
    }))
}

#[wasm_bindgen]
pub fn moment(k: usize, m: &str, cov: &str, engine: &str) -> String {
    wrap(moment_json(k, m, cov, engine))
}

#[wasm_bindgen]
pub fn marriages(m1: u32, m2: u32) -> String {
    wrap(marriages_json(m1, m2))
}

/// `fixed` lists all `k` coordinates; the running one is ignored.
#[wasm_bindgen]
pub fn find_recurrence(k: usize, direction: usize, fixed: &str, cov: &str) -> String {
    wrap(discover_json(k, direction, fixed, cov))
}
