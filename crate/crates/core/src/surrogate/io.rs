use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::model::{GbtModel, ModelRole, Target};
use crate::datagen::write_file;
use crate::error::{Error, Result};

pub const MODEL_SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    schema_version: u32,
    model: GbtModel,
}

/// Write a model as JSON: `{"schema_version": 1, "model": {...}}`. Floats
/// are printed in shortest round-trip form, so reloading is lossless.
pub fn save_model(model: &GbtModel, path: &Path) -> Result<()> {
    let file = ModelFile {
        schema_version: MODEL_SCHEMA_VERSION,
        model: model.clone(),
    };
    let text = serde_json::to_string(&file).expect("model serializes");
    write_file(path, text.as_bytes())
}

pub fn load_model(path: &Path) -> Result<GbtModel> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let parse_err = |msg: String| Error::Parse {
        path: path.to_path_buf(),
        msg,
    };
    let raw: serde_json::Value = serde_json::from_str(&text).map_err(|e| parse_err(e.to_string()))?;
    match raw.get("schema_version").and_then(|v| v.as_u64()) {
        Some(v) if v == u64::from(MODEL_SCHEMA_VERSION) => {}
        Some(v) => {
            return Err(Error::Schema {
                path: path.to_path_buf(),
                msg: format!("model schema version {v}, expected {MODEL_SCHEMA_VERSION}"),
            })
        }
        None => return Err(parse_err("missing schema_version".into())),
    }
    let file: ModelFile = serde_json::from_value(raw).map_err(|e| parse_err(e.to_string()))?;
    let m = file.model;
    if m.trees.iter().any(|t| !t.is_well_formed()) || m.scaler.min.len() != m.scaler.max.len() {
        return Err(parse_err("malformed tree or scaler".into()));
    }
    Ok(m)
}

/// Load and check the role and target tags.
pub fn load_model_as(path: &Path, role: ModelRole, target: Target) -> Result<GbtModel> {
    let m = load_model(path)?;
    if m.role != role || m.target != target {
        return Err(Error::ModelMismatch(format!(
            "{} holds a {}/{} model, expected {}/{}",
            path.display(),
            m.role.as_str(),
            m.target.as_str(),
            role.as_str(),
            target.as_str()
        )));
    }
    Ok(m)
}

/// File name used for a model inside a model directory.
pub fn model_file_name(role: ModelRole, target: Target) -> String {
    format!("{}_{}.json", role.as_str(), target.as_str())
}
