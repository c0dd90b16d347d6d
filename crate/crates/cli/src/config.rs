//! Loading, overriding and validating JSON run configurations.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u64 = 1;

pub fn load(path: &Path) -> CliResult<Value> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        action: "read",
        path: path.to_path_buf(),
        source,
    })?;
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    if !value.is_object() {
        return Err(CliError::config("configuration must be a JSON object"));
    }
    Ok(value)
}

/// Applies `key.path=value`; the value is parsed as JSON and falls back to a string.
pub fn apply_override(config: &mut Value, assignment: &str) -> CliResult<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::config(format!("override {assignment:?} is not key=value")))?;
    if key.is_empty() {
        return Err(CliError::config(format!("override {assignment:?} has an empty key")));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    set_path(config, key, value)
}

pub fn set_path(config: &mut Value, key: &str, value: Value) -> CliResult<()> {
    let mut node = config;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let last = i + 1 == parts.len();
        node = match node {
            Value::Object(map) => {
                if last {
                    map.insert(part.to_string(), value);
                    return Ok(());
                }
                map.entry(part.to_string()).or_insert_with(|| Value::Object(Map::new()))
            }
            Value::Array(items) => {
                let idx: usize = part
                    .parse()
                    .map_err(|_| CliError::config(format!("override {key}: {part:?} is not an index")))?;
                let len = items.len();
                let slot = items
                    .get_mut(idx)
                    .ok_or_else(|| CliError::config(format!("override {key}: index {idx} out of range ({len})")))?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => {
                return Err(CliError::config(format!(
                    "override {key}: {part:?} is not inside an object"
                )))
            }
        };
    }
    Ok(())
}

/// Checks `schema_version` and removes it.
pub fn take_version(config: &mut Value) -> CliResult<()> {
    let map = config
        .as_object_mut()
        .ok_or_else(|| CliError::config("configuration must be a JSON object"))?;
    match map.remove("schema_version") {
        Some(Value::Number(n)) if n.as_u64() == Some(SCHEMA_VERSION) => Ok(()),
        Some(other) => Err(CliError::config(format!(
            "unsupported schema_version {other}, expected {SCHEMA_VERSION}"
        ))),
        None => Err(CliError::config("missing schema_version")),
    }
}

/// Removes and returns a required field.
pub fn take(config: &mut Value, key: &str) -> CliResult<Value> {
    config
        .as_object_mut()
        .and_then(|m| m.remove(key))
        .ok_or_else(|| CliError::config(format!("missing field {key:?}")))
}

pub fn take_opt(config: &mut Value, key: &str) -> Option<Value> {
    config
        .as_object_mut()
        .and_then(|m| m.remove(key))
        .filter(|v| !v.is_null())
}

pub fn parse<T: DeserializeOwned>(what: &str, value: Value) -> CliResult<T> {
    serde_json::from_value(value).map_err(|e| CliError::config(format!("{what}: {e}")))
}

/// Fails on any field left over after a command took what it understands.
pub fn reject_leftovers(config: &Value) -> CliResult<()> {
    match config.as_object() {
        Some(map) if !map.is_empty() => {
            let keys: Vec<&str> = map.keys().map(String::as_str).collect();
            Err(CliError::config(format!("unknown fields: {}", keys.join(", "))))
        }
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use serde_json::json;

    use super::*;

    #[test]
    fn overrides_parse_json_and_create_objects() {
        let mut c = json!({"p": 2, "sampler": {"seed": 1}, "n_grid": [1, 2]});
        apply_override(&mut c, "p=1.5").unwrap();
        apply_override(&mut c, "sampler.seed=9").unwrap();
        apply_override(&mut c, "solver=grid").unwrap();
        apply_override(&mut c, "n_grid.1=20").unwrap();
        apply_override(&mut c, "scheme.step=0.5").unwrap();
        assert_eq!(
            c,
            json!({"p": 1.5, "sampler": {"seed": 9}, "solver": "grid", "n_grid": [1, 20], "scheme": {"step": 0.5}})
        );
        assert!(apply_override(&mut c, "novalue").is_err());
        assert!(apply_override(&mut c, "n_grid.7=1").is_err());
        assert!(apply_override(&mut c, "p.x=1").is_err());
    }

    #[test]
    fn schema_version_is_required() {
        assert!(take_version(&mut json!({"p": 2})).is_err());
        assert!(take_version(&mut json!({"schema_version": 2})).is_err());
        let mut ok = json!({"schema_version": 1, "p": 2});
        take_version(&mut ok).unwrap();
        assert_eq!(ok, json!({"p": 2}));
    }
}
