//! Flat TOML config files and `key=value` overrides.
//!
//! A config file lists any subset of the [`SystemConfig`] fields; missing
//! fields take their defaults. `ris_size` is accepted wherever a key is and
//! sets both `m_active` and `n_passive`.

use std::path::Path;

use risnoma_core::config::SystemConfig;
use toml::{Table, Value};

use crate::error::{Result, SimError};

/// Sets `m_active` and `n_passive` together.
pub const RIS_SIZE: &str = "ris_size";

pub fn parse_config(text: &str) -> Result<SystemConfig> {
    toml::from_str(text).map_err(|e| SimError::ConfigFile(e.to_string()))
}

pub fn load_config(path: &Path) -> Result<SystemConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| SimError::io(path, e))?;
    parse_config(&text)
}

pub fn to_toml(config: &SystemConfig) -> Result<String> {
    toml::to_string(config).map_err(|e| SimError::ConfigFile(e.to_string()))
}

fn table(config: &SystemConfig) -> Result<Table> {
    Table::try_from(config).map_err(|e| SimError::ConfigFile(e.to_string()))
}

fn fields(key: &str) -> Vec<&str> {
    if key == RIS_SIZE {
        vec!["m_active", "n_passive"]
    } else {
        vec![key]
    }
}

/// Every key accepted by [`set_value`].
pub fn config_keys() -> Vec<String> {
    let mut keys: Vec<String> = table(&SystemConfig::default())
        .map(|t| t.keys().cloned().collect())
        .unwrap_or_default();
    keys.push(RIS_SIZE.to_owned());
    keys
}

pub fn is_config_key(key: &str) -> bool {
    config_keys().iter().any(|k| k == key)
}

/// Coerces numbers to the type already stored under the key.
fn coerce(key: &str, old: &Value, new: Value) -> Result<Value> {
    let bad = |msg: String| SimError::BadValue {
        key: key.to_owned(),
        msg,
    };
    Ok(match (old, new) {
        (Value::Integer(_), Value::Float(f)) => {
            if f.fract() != 0.0 || !f.is_finite() {
                return Err(bad(format!("expected an integer, got {f}")));
            }
            Value::Integer(f as i64)
        }
        (Value::Float(_), Value::Integer(i)) => Value::Float(i as f64),
        (_, v) => v,
    })
}

/// Returns `config` with `key` replaced by the TOML `value`.
pub fn set_value(config: &SystemConfig, key: &str, value: Value) -> Result<SystemConfig> {
    let mut t = table(config)?;
    for f in fields(key) {
        let old = t
            .get(f)
            .ok_or_else(|| SimError::UnknownKey(key.to_owned()))?;
        let v = coerce(key, old, value.clone())?;
        t.insert(f.to_owned(), v);
    }
    t.try_into()
        .map_err(|e: toml::de::Error| SimError::BadValue {
            key: key.to_owned(),
            msg: e.message().to_owned(),
        })
}

pub fn set_number(config: &SystemConfig, key: &str, value: f64) -> Result<SystemConfig> {
    set_value(config, key, Value::Float(value))
}

/// Parses `value` as a TOML value, or takes it as a bare string.
pub fn parse_value(value: &str) -> Value {
    format!("v = {value}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(value.to_owned()))
}

/// Applies one `key=value` override.
pub fn apply_override(config: &SystemConfig, assignment: &str) -> Result<SystemConfig> {
    let (key, value) = assignment
        .split_once('=')
        .ok_or_else(|| SimError::BadValue {
            key: assignment.to_owned(),
            msg: "expected key=value".to_owned(),
        })?;
    set_value(config, key.trim(), parse_value(value.trim()))
}
