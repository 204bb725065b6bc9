//! Three operations for the static page in `www/`: solve for the D-family,
//! classify one member of it, and integrate the flow.

use wasm_bindgen::prelude::*;

use hamfactor::assign::parse_assignments;
use hamfactor::classifier::conserved_report;
use hamfactor::flow::{run_flow, FlowConfig};
use hamfactor::jordan::JordanSpec;
use hamfactor::report::Report;

/// Browser tabs choke long before the solver does.
const MAX_DIM: usize = 24;

fn load(spec_json: &str) -> Result<Report, String> {
    let spec = JordanSpec::from_json(spec_json).map_err(|e| e.to_string())?;
    spec.ensure_max_dim(MAX_DIM).map_err(|e| e.to_string())?;
    Ok(Report::new(spec))
}

/// `d14=1, d22=-1/2` or one assignment per line.
fn split_assignments(text: &str) -> Vec<String> {
    text.split([',', '\n', ';'])
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}

pub fn solve_d_inner(spec_json: &str) -> Result<String, String> {
    let mut r = load(spec_json)?;
    r.add_family(true);
    Ok(r.to_text())
}

pub fn classify_inner(spec_json: &str, assignments: &str) -> Result<String, String> {
    let mut r = load(spec_json)?;
    let params = r.family().params().to_vec();
    let a = parse_assignments(&split_assignments(assignments), &params).map_err(|e| e.to_string())?;
    r.add_classification(&a).map_err(|e| e.to_string())?;
    Ok(r.to_text())
}

/// CSV with columns `t, H, casimir_1, ...`.
pub fn demo_flow_inner(spec_json: &str, assignments: &str, t_max: f64, steps: usize) -> Result<String, String> {
    if steps == 0 || steps > 100_000 || !(t_max > 0.0 && t_max.is_finite()) {
        return Err("need 1 <= steps <= 100000 and a finite t_max > 0".into());
    }
    let mut r = load(spec_json)?;
    let params = r.family().params().to_vec();
    let a = parse_assignments(&split_assignments(assignments), &params).map_err(|e| e.to_string())?;
    let d = r.family().general.evaluate_or_zero(&a).map_err(|e| e.to_string())?;
    let b = r.spec.realize();
    let casimirs: Vec<_> = conserved_report(&b, &d)
        .map_err(|e| e.to_string())?
        .casimirs
        .into_iter()
        .map(|c| c.c)
        .collect();
    let cfg = FlowConfig { t_max, steps, seed: 0 };
    Ok(run_flow(&b, &d, &casimirs, &cfg).to_csv())
}

#[wasm_bindgen]
pub fn solve_d(spec_json: &str) -> Result<String, JsValue> {
    solve_d_inner(spec_json).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn classify(spec_json: &str, assignments: &str) -> Result<String, JsValue> {
    classify_inner(spec_json, assignments).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn demo_flow(spec_json: &str, assignments: &str, t_max: f64, steps: usize) -> Result<String, JsValue> {
    demo_flow_inner(spec_json, assignments, t_max, steps).map_err(|e| JsValue::from_str(&e))
}
