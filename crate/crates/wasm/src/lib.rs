//! Browser bindings for the pathcmp pipeline. Three entry points, all
//! string-in/string-out so the page needs no extra glue: convert a
//! standoff document to annotated SBML, compute pathway statistics,
//! and score two pathways under all 24 matching strategies.
//!
//! Build with `wasm-pack build crates/wasm --target web --out-dir
//! www/pkg` and open `crates/wasm/www/index.html` from a static server.

use wasm_bindgen::prelude::*;

use pathcmp::annotate::{annotate_reactions, annotate_target_reactions};
use pathcmp::convert::convert;
use pathcmp::defaults;
use pathcmp::matching::enumerate_strategies;
use pathcmp::model::Pathway;
use pathcmp::scoring;
use pathcmp::standoff::parse_standoff;

fn convert_standoff_impl(text: &str, a1: &str, a2: &str) -> Result<String, pathcmp::Error> {
    let doc = parse_standoff("demo", text, a1, a2)?;
    let conversion = convert(&doc, &defaults::conversion_rules())?;
    let mut pathway = conversion.pathway;
    annotate_reactions(&mut pathway, &defaults::mapping_table())?;
    let stats = scoring::stats(&pathway);
    let body = serde_json::json!({
        "sbml": pathcmp::sbml::write_sbml(&pathway),
        "stats": stats,
        "log": {
            "events_total": conversion.log.events_total,
            "events_converted": conversion.log.events_converted,
            "events_dropped": conversion.log.events_dropped,
            "args_dropped": conversion.log.args_dropped,
            "warnings": conversion.log.warnings,
        },
    });
    Ok(serde_json::to_string(&body).expect("json serializes"))
}

fn stats_impl(sbml: &str) -> Result<String, pathcmp::Error> {
    let pathway = pathcmp::sbml::parse_sbml(sbml.as_bytes())?;
    Ok(pathcmp::report::stats_json(
        &pathway.name,
        &scoring::stats(&pathway),
    ))
}

/// Fill missing reaction signatures: state-prefix deduction first, then
/// the event-type mapping (curated files carry names, converted files
/// carry event types).
fn ensure_annotated(pathway: &mut Pathway) -> Result<(), pathcmp::Error> {
    if pathway
        .reactions()
        .iter()
        .any(|r| r.sbo_signature.is_empty())
    {
        annotate_target_reactions(pathway, &defaults::state_prefixes());
        annotate_reactions(pathway, &defaults::mapping_table())?;
    }
    Ok(())
}

fn compare_impl(extracted: &str, target: &str, threshold: u32) -> Result<String, pathcmp::Error> {
    let mut extracted = pathcmp::sbml::parse_sbml(extracted.as_bytes())?;
    let mut target = pathcmp::sbml::parse_sbml(target.as_bytes())?;
    if extracted.name.is_empty() {
        extracted.name = "extracted".to_string();
    }
    if target.name.is_empty() {
        target.name = "target".to_string();
    }
    ensure_annotated(&mut extracted)?;
    ensure_annotated(&mut target)?;
    let ontology = defaults::ontology();
    let mut rows = Vec::new();
    for strategy in enumerate_strategies() {
        let strategy = strategy.with_threshold(threshold);
        let report = scoring::overlap(&extracted, &target, &strategy, &ontology)?;
        let score = scoring::score(&report);
        rows.push((report, score));
    }
    Ok(pathcmp::report::compare_json(&rows))
}

fn to_js<T>(result: Result<T, pathcmp::Error>) -> Result<T, JsValue> {
    result.map_err(|e| JsValue::from_str(&e.to_string()))
}

/// Standoff (.txt/.a1/.a2 bodies) -> JSON with the annotated SBML, its
/// statistics and the conversion log.
#[wasm_bindgen]
pub fn convert_standoff(text: &str, a1: &str, a2: &str) -> Result<String, JsValue> {
    to_js(convert_standoff_impl(text, a1, a2))
}

/// SBML -> statistics JSON.
#[wasm_bindgen]
pub fn pathway_stats(sbml: &str) -> Result<String, JsValue> {
    to_js(stats_impl(sbml))
}

/// Two SBML documents -> scores for all 24 strategies as JSON.
#[wasm_bindgen]
pub fn compare_pathways(extracted: &str, target: &str, threshold: u32) -> Result<String, JsValue> {
    to_js(compare_impl(extracted, target, threshold))
}
