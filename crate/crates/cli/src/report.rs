//! Report documents written by `classify`.

use std::time::{SystemTime, UNIX_EPOCH};

use lightcone::analyzer::{Classification, ClassifyConfig};
use serde_json::{json, Value};

/// `{verdict, parameters, residuals, witnesses, seed, config, timestamp}`.
///
/// Everything except `timestamp` is a function of the map, seed and config.
pub fn classification_report(c: &Classification<f64>, config: &ClassifyConfig) -> Value {
    let (parameters, residuals, witnesses) = match c {
        Classification::Similarity { k, q, a, residual } => (
            json!({ "k": k, "Q": q, "a": a }),
            json!({ "affine": residual }),
            json!([]),
        ),
        Classification::Degenerate { vertex, residual } => (
            json!({ "vertex": vertex }),
            json!({ "cone": residual }),
            json!([]),
        ),
        Classification::Violator { witness, magnitude } => (
            json!({ "magnitude": magnitude }),
            json!({ "check_max_normalized": magnitude }),
            json!([witness]),
        ),
        Classification::Inconclusive { diagnostics } => (
            json!({ "diagnostics": diagnostics }),
            json!({
                "check_max_normalized": diagnostics.check_max_normalized,
                "affine": diagnostics.affine_residual,
                "cone": diagnostics.cone_residual,
            }),
            json!([]),
        ),
    };
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    json!({
        "verdict": c.verdict(),
        "parameters": parameters,
        "residuals": residuals,
        "witnesses": witnesses,
        "seed": config.seed,
        "config": config,
        "timestamp": timestamp,
    })
}
