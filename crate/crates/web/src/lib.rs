//! Browser demo. Each export takes matrices in any of the accepted text
//! forms and returns a JSON string; errors come back as `{"error": ...}` so
//! the page never has to catch exceptions.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use ckflow::aut::picard_quotient;
use ckflow::cylinder::verify_expansion_identities;
use ckflow::invariants::{flow_equivalent, flow_invariant, k0_with_unit};
use ckflow::io::{group_json, int_json, ints_json, matrix_json, parse_matrix};
use ckflow::moves::expand_at_vertex;
use ckflow::{MarkovShift, Result};

/// Keeps the Picard enumeration responsive in the browser.
const PICARD_LIMIT: usize = 20_000;

fn shift(input: &str) -> Result<MarkovShift> {
    MarkovShift::validate(parse_matrix(input)?)
}

fn respond(r: Result<Value>) -> String {
    let v = r.unwrap_or_else(|e| json!({ "error": e.to_string() }));
    serde_json::to_string(&v).expect("JSON values serialize")
}

/// Bowen–Franks group, det(I - A), K0 with the unit class and, when the
/// automorphism group is small enough, the Picard quotient.
pub fn invariants(input: &str) -> Result<Value> {
    let a = shift(input)?;
    let inv = flow_invariant(&a)?;
    let k0 = k0_with_unit(&a)?;
    let picard = match picard_quotient(&a, PICARD_LIMIT) {
        Ok(pq) => json!({
            "aut_order": int_json(&pq.aut_order),
            "aut1_order": int_json(&pq.aut1_order),
            "quotient_order": int_json(&pq.quotient_order),
        }),
        Err(e) => json!({ "unavailable": e.to_string() }),
    };
    Ok(json!({
        "matrix": matrix_json(a.matrix()),
        "bowen_franks": group_json(&inv.bf),
        "det": int_json(&inv.det_value),
        "k0": group_json(&k0.group),
        "unit": ints_json(&k0.unit),
        "picard": picard,
    }))
}

/// Flow-equivalence decision with both invariants.
pub fn compare(a: &str, b: &str) -> Result<Value> {
    let (a, b) = (shift(a)?, shift(b)?);
    let (eq, cmp) = flow_equivalent(&a, &b)?;
    Ok(json!({
        "equivalent": eq,
        "bf_match": cmp.bf_match,
        "det_match": cmp.det_match,
        "a": { "bowen_franks": cmp.left.bf.to_string(), "det": int_json(&cmp.left.det_value) },
        "b": { "bowen_franks": cmp.right.bf.to_string(), "det": int_json(&cmp.right.det_value) },
    }))
}

/// Expansion at a vertex (numbered from 1), the invariants on both sides and
/// the symbolic check of the expansion identities.
pub fn expansion(input: &str, vertex: usize) -> Result<Value> {
    let a = shift(input)?;
    if vertex == 0 || vertex > a.size() {
        return Err(ckflow::Error::InvalidArgument(format!(
            "vertex {vertex} is out of range 1..={}",
            a.size()
        )));
    }
    let expanded = expand_at_vertex(&a, vertex - 1)?;
    let before = flow_invariant(&a)?;
    let after = flow_invariant(&expanded)?;
    let report = verify_expansion_identities(&a, vertex - 1)?;
    let checks: Vec<Value> = report
        .checks
        .iter()
        .map(|c| json!({ "name": c.name, "holds": c.holds }))
        .collect();
    Ok(json!({
        "expanded": matrix_json(expanded.matrix()),
        "before": { "bowen_franks": before.bf.to_string(), "det": int_json(&before.det_value) },
        "after": { "bowen_franks": after.bf.to_string(), "det": int_json(&after.det_value) },
        "identities": checks,
        "passed": report.passed(),
    }))
}

#[wasm_bindgen(js_name = invariants)]
pub fn invariants_js(input: &str) -> String {
    respond(invariants(input))
}

#[wasm_bindgen(js_name = compare)]
pub fn compare_js(a: &str, b: &str) -> String {
    respond(compare(a, b))
}

#[wasm_bindgen(js_name = expansion)]
pub fn expansion_js(input: &str, vertex: usize) -> String {
    respond(expansion(input, vertex))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariants_of_cuntz_four() {
        let v = invariants("[[4]]").unwrap();
        assert_eq!(v["bowen_franks"]["structure"], "Z/3");
        assert_eq!(v["det"], -3);
        assert_eq!(v["picard"]["quotient_order"], 2);
    }

    #[test]
    fn invariants_of_infinite_group() {
        let v = invariants("2 2\n2 1\n1 2").unwrap();
        assert_eq!(v["bowen_franks"]["structure"], "Z");
        assert!(v["picard"]["unavailable"].is_string());
    }

    #[test]
    fn compare_golden_and_full() {
        let v = compare("[[1,1],[1,0]]", "[[1,1],[1,1]]").unwrap();
        assert_eq!(v["equivalent"], true);
        let v = compare("[[2]]", "[[3]]").unwrap();
        assert_eq!(v["equivalent"], false);
    }

    #[test]
    fn expansion_keeps_invariants() {
        let v = expansion("[[1,1],[1,0]]", 2).unwrap();
        assert_eq!(v["passed"], true);
        assert_eq!(v["before"], v["after"]);
    }

    #[test]
    fn errors_are_reported_as_json() {
        let s = invariants_js("[[0,1],[1,0]]");
        let v: Value = serde_json::from_str(&s).unwrap();
        assert!(v["error"].as_str().unwrap().contains("permutation"));
        let v: Value = serde_json::from_str(&expansion_js("[[1,1],[1,0]]", 5)).unwrap();
        assert!(v["error"].is_string());
    }
}
