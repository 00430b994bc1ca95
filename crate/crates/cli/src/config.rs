//! Layered configuration: built-in defaults, then the JSON file, then
//! `--override key=value` pairs, then dedicated flags.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use crate::{CliError, Common};
use qledger_core::Error;

/// Merged key/value view of a config file plus overrides. `base` is the
/// directory that relative file references resolve against.
pub struct Layered {
    pub map: Map<String, Value>,
    pub base: PathBuf,
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// `K=V` with `V` parsed as JSON when possible, otherwise kept as a string.
pub fn parse_override(raw: &str) -> Result<(String, Value), CliError> {
    let (key, value) = raw
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("override {raw:?} is not of the form key=value")))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(CliError::Usage(format!(
            "override {raw:?} has an empty key"
        )));
    }
    let value =
        serde_json::from_str(value.trim()).unwrap_or_else(|_| Value::String(value.to_string()));
    Ok((key.to_string(), value))
}

pub fn layered(common: &Common) -> Result<Layered, CliError> {
    let (mut map, base) = match &common.config {
        Some(path) => {
            let text = read_text(path)?;
            let value: Value = serde_json::from_str(&text).map_err(|e| {
                CliError::Core(Error::Validation(format!("config {}: {e}", path.display())))
            })?;
            let Value::Object(map) = value else {
                return Err(CliError::Core(Error::Validation(format!(
                    "config {} must be a JSON object",
                    path.display()
                ))));
            };
            let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
            (map, base)
        }
        None => (Map::new(), PathBuf::new()),
    };
    for raw in &common.overrides {
        let (k, v) = parse_override(raw)?;
        map.insert(k, v);
    }
    Ok(Layered { map, base })
}

impl Layered {
    /// Deserializes the merged map, reporting unknown keys as validation errors.
    pub fn parse<T: DeserializeOwned>(&self, what: &str) -> Result<T, CliError> {
        serde_json::from_value(Value::Object(self.map.clone()))
            .map_err(|e| CliError::Core(Error::Validation(format!("{what} config: {e}"))))
    }

    /// Inline JSON value, or the contents of the file a string names.
    pub fn resolve(&self, field: &str, value: &Value) -> Result<Value, CliError> {
        match value {
            Value::String(name) => {
                let path = self.base.join(name);
                let text = read_text(&path)?;
                serde_json::from_str(&text).map_err(|e| {
                    CliError::Core(Error::Validation(format!(
                        "{field} ({}): {e}",
                        path.display()
                    )))
                })
            }
            other => Ok(other.clone()),
        }
    }
}
