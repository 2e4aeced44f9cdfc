//! Versioned model files. Each file records the feature-registry hash it
//! was trained against; loading against a different registry fails.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::registry_hash;

use super::mlp::{MlpModel, MLP_HIDDEN, MLP_INPUTS};
use super::svm::LinearSvmModel;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct SvmModelFile {
    format_version: u32,
    registry_hash: String,
    #[serde(flatten)]
    model: LinearSvmModel,
}

#[derive(Serialize, Deserialize)]
struct MlpModelFile {
    format_version: u32,
    registry_hash: String,
    topology: [usize; 3],
    #[serde(flatten)]
    model: MlpModel,
}

fn check_header(version: u32, hash: &str) -> Result<()> {
    if version != MODEL_FORMAT_VERSION {
        return Err(Error::ModelFormat(format!(
            "unsupported model format version {version}, expected {MODEL_FORMAT_VERSION}"
        )));
    }
    let current = registry_hash();
    if hash != current {
        return Err(Error::RegistryMismatch {
            model_hash: hash.to_string(),
            current_hash: current,
        });
    }
    Ok(())
}

pub fn save_svm_model(model: &LinearSvmModel, path: &Path) -> Result<()> {
    model.validate()?;
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let file = SvmModelFile {
        format_version: MODEL_FORMAT_VERSION,
        registry_hash: registry_hash(),
        model: model.clone(),
    };
    let json = serde_json::to_string_pretty(&file)
        .map_err(|e| Error::ModelFormat(e.to_string()))?;
    std::fs::write(path, json)?;
    Ok(())
}

pub fn load_svm_model(path: &Path) -> Result<LinearSvmModel> {
    let text = std::fs::read_to_string(path)?;
    let file: SvmModelFile =
        serde_json::from_str(&text).map_err(|e| Error::ModelFormat(e.to_string()))?;
    check_header(file.format_version, &file.registry_hash)?;
    file.model.validate()?;
    Ok(file.model)
}

pub fn save_mlp_model(model: &MlpModel, path: &Path) -> Result<()> {
    model.validate()?;
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let file = MlpModelFile {
        format_version: MODEL_FORMAT_VERSION,
        registry_hash: registry_hash(),
        topology: [MLP_INPUTS, MLP_HIDDEN, 1],
        model: model.clone(),
    };
    let json = serde_json::to_string_pretty(&file)
        .map_err(|e| Error::ModelFormat(e.to_string()))?;
    std::fs::write(path, json)?;
    Ok(())
}

pub fn load_mlp_model(path: &Path) -> Result<MlpModel> {
    let text = std::fs::read_to_string(path)?;
    let file: MlpModelFile =
        serde_json::from_str(&text).map_err(|e| Error::ModelFormat(e.to_string()))?;
    check_header(file.format_version, &file.registry_hash)?;
    if file.topology != [MLP_INPUTS, MLP_HIDDEN, 1] {
        return Err(Error::ModelFormat(format!(
            "unexpected topology {:?}",
            file.topology
        )));
    }
    file.model.validate()?;
    Ok(file.model)
}
