//! Versioned JSON reports. Numbers are written in shortest round-trip form.

use std::path::Path;

use serde_json::{json, Map, Value};
use sqg_core::constants::{ChainReport, ConstantsLedger};
use sqg_core::solver::{LevelSetEnergy, NormSample};

use crate::error::CliError;
use crate::verify::CriterionOutcome;

pub const SCHEMA_ID: &str = "sqg-report";
pub const SCHEMA_VERSION: u32 = 1;
/// The published schema for [`SCHEMA_VERSION`].
pub const SCHEMA_V1: &str = include_str!("../schema/report-v1.json");

pub fn envelope(kind: &str, parameters: Value, results: Value) -> Value {
    json!({
        "schema": SCHEMA_ID,
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "parameters": parameters,
        "results": results,
    })
}

/// Non-finite numbers become `null`.
fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null)
}

pub fn ledger_json(l: &ConstantsLedger, chain: &ChainReport) -> Value {
    let mut m = Map::new();
    for (k, v) in [
        ("alpha", l.alpha),
        ("epsilon", l.epsilon),
        ("c0", l.c0),
        ("omega", l.omega),
        ("r0", l.r0),
        ("a", l.a),
        ("a_max", l.a_max),
        ("shrink", l.shrink),
        ("lambda", l.lambda),
        ("lambda_star", l.lambda_star),
        ("lambda_star_log2", l.lambda_star_log2),
        ("lambda_starstar", l.lambda_starstar),
        ("eta", l.eta),
        ("c1", l.c1),
        ("c_alpha", l.c_alpha),
        ("s", l.s),
        ("q4", l.q4),
        ("epsilon_tilde", l.epsilon_tilde),
    ] {
        m.insert(k.into(), num(v));
    }
    m.insert("k_plus".into(), json!(l.k_plus));
    m.insert("alpha0".into(), l.alpha0.map(num).unwrap_or(Value::Null));
    m.insert("a_lower".into(), l.a_lower.map(num).unwrap_or(Value::Null));
    m.insert("b_upper".into(), l.b_upper.map(num).unwrap_or(Value::Null));
    m.insert(
        "window".into(),
        json!({
            "lower": num(l.window.lower),
            "upper": num(l.window.upper),
            "binding": l.window.binding,
            "empty": l.window.empty,
            "bounds": l.window.bounds.iter().map(|b| json!({"name": b.name, "value": num(b.value)})).collect::<Vec<_>>(),
        }),
    );
    m.insert(
        "chain".into(),
        json!({
            "all_hold": chain.all_hold,
            "verdicts": chain.verdicts.iter().map(|v| json!({
                "name": v.name, "lhs": num(v.lhs), "rhs": num(v.rhs), "slack": num(v.slack), "holds": v.holds,
            })).collect::<Vec<_>>(),
        }),
    );
    Value::Object(m)
}

pub fn outcome_json(o: &CriterionOutcome) -> Value {
    json!({
        "id": o.id,
        "title": o.title,
        "passed": o.passed,
        "summary": o.summary,
        "seconds": num(o.seconds),
        "budget_seconds": num(o.budget_seconds),
        "metrics": o.metrics.iter().map(|m| json!({
            "name": m.name, "value": num(m.value), "bound": m.bound.map(num).unwrap_or(Value::Null),
        })).collect::<Vec<_>>(),
    })
}

pub fn norms_json(s: &NormSample) -> Value {
    json!({ "t": num(s.t), "l2": num(s.l2), "sup": num(s.sup), "h_alpha_half": num(s.h_alpha_half) })
}

/// Both signs of the truncated-energy inequality are recorded.
pub fn level_set_json(e: &LevelSetEnergy) -> Value {
    json!({
        "level": num(e.level),
        "lhs": num(e.lhs),
        "rhs": num(e.rhs),
        "residual": num(e.residual),
        "residual_subtracted": num(e.residual_subtracted),
        "satisfied": e.satisfied,
    })
}

pub fn to_string(report: &Value) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("serializable report");
    s.push('\n');
    s
}

pub fn write_report(path: &Path, report: &Value) -> Result<(), CliError> {
    std::fs::write(path, to_string(report))?;
    Ok(())
}
