//! Scenario loading: JSON file → overrides → typed config → validation.
//!
//! A missing `--config` means "all defaults". Overrides are dotted-path
//! `key=value` pairs applied to the raw JSON before it is typed, so they
//! go through exactly the same validation as file content; values parse
//! as JSON first and fall back to strings (so `--set solver.variant=oracle`
//! works without inner quotes). Deserialization errors carry the offending
//! key path.

use std::fs;
use std::path::Path;

use aoi_contract::experiments::ScenarioConfig;
use aoi_contract::freshness::FreshnessVariant;
use aoi_contract::{Error, Result};
use serde_json::{Map, Value};

/// Reads, overrides, types, and validates a scenario.
///
/// `seed` (when given) pins both the population seed and the workflow
/// simulator seed; `variant` (when given) selects the freshness closed
/// forms. Both land in the echoed effective config.
pub fn load(
    path: Option<&Path>,
    overrides: &[String],
    seed: Option<u64>,
    variant: Option<FreshnessVariant>,
) -> Result<ScenarioConfig> {
    let (origin, text) = match path {
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| Error::config(p.display().to_string(), format!("cannot read: {e}")))?;
            (p.display().to_string(), text)
        }
        None => ("<defaults>".to_string(), "{}".to_string()),
    };
    let mut raw: Value = serde_json::from_str(&text)
        .map_err(|e| Error::config(&origin, format!("not valid JSON: {e}")))?;
    if !raw.is_object() {
        return Err(Error::config(origin, "top level must be a JSON object"));
    }
    for pair in overrides {
        apply_override(&mut raw, pair)?;
    }
    let mut cfg: ScenarioConfig = serde_path_to_error::deserialize(raw)
        .map_err(|e| Error::config(e.path().to_string(), e.inner().to_string()))?;
    if let Some(seed) = seed {
        cfg.seed = seed;
        cfg.workflow.seed = seed;
    }
    if let Some(variant) = variant {
        cfg.solver.variant = variant;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Applies one `key.path=value` pair to the raw JSON tree, creating
/// intermediate objects as needed.
fn apply_override(root: &mut Value, pair: &str) -> Result<()> {
    let (key, raw_value) = pair
        .split_once('=')
        .ok_or_else(|| Error::config(pair, "override must have the form key.path=value"))?;
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(Error::config(pair, "override key path has an empty segment"));
    }
    // JSON first; bare words (mechanism names, variant names) as strings.
    let value: Value =
        serde_json::from_str(raw_value).unwrap_or_else(|_| Value::String(raw_value.to_string()));
    let segments: Vec<&str> = key.split('.').collect();
    let mut node = root;
    for segment in &segments[..segments.len() - 1] {
        let object = node.as_object_mut().ok_or_else(|| {
            Error::config(key, format!("segment `{segment}` does not address an object"))
        })?;
        node = object
            .entry(segment.to_string())
            .or_insert_with(|| Value::Object(Map::new()));
    }
    let object = node
        .as_object_mut()
        .ok_or_else(|| Error::config(key, "path does not lead into an object"))?;
    object.insert(segments[segments.len() - 1].to_string(), value);
    Ok(())
}
