//! Two-stage risk classification: a calibrated linear SVM produces a
//! Low/Medium/High level, and Medium (indeterminate) cases are resolved
//! by the neural second stage so the cascade never ends on Medium.

mod mlp;
mod persist;
mod scaling;
mod svm;

pub use mlp::{
    ann_risk_level, mlp_assess, mlp_forward, mlp_gradients, mlp_loss, train_mlp, MlpGradients,
    MlpHyper, MlpModel, MLP_HIDDEN, MLP_INPUTS,
};
pub use persist::{
    load_mlp_model, load_svm_model, save_mlp_model, save_svm_model, MODEL_FORMAT_VERSION,
};
pub use scaling::{learn_bounds, scale_features, scale_value};
pub use svm::{
    svm_assess, svm_objective, svm_rfe, svm_risk_level, train_svm, LinearSvmModel, RfeResult,
    SvmFit, SvmHyper,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassLabel {
    Melanoma,
    NonMelanoma,
}

impl ClassLabel {
    pub fn sign(self) -> f64 {
        match self {
            ClassLabel::Melanoma => 1.0,
            ClassLabel::NonMelanoma => -1.0,
        }
    }

    pub fn target(self) -> f64 {
        match self {
            ClassLabel::Melanoma => 1.0,
            ClassLabel::NonMelanoma => 0.0,
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            ClassLabel::Melanoma => ClassLabel::NonMelanoma,
            ClassLabel::NonMelanoma => ClassLabel::Melanoma,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "melanoma" | "malignant" | "1" => Ok(ClassLabel::Melanoma),
            "non-melanoma" | "nonmelanoma" | "non_melanoma" | "benign" | "0" => {
                Ok(ClassLabel::NonMelanoma)
            }
            other => Err(Error::InvalidInput(format!("unknown label '{other}'"))),
        }
    }
}

impl std::fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClassLabel::Melanoma => write!(f, "melanoma"),
            ClassLabel::NonMelanoma => write!(f, "non-melanoma"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RiskLevel {
    Low,
    Medium,
    High,
}

impl std::fmt::Display for RiskLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RiskLevel::Low => write!(f, "Low"),
            RiskLevel::Medium => write!(f, "Medium"),
            RiskLevel::High => write!(f, "High"),
        }
    }
}

/// Which classifier produced the terminal verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Svm,
    Ann,
    Cascade,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Stage::Svm => write!(f, "svm"),
            Stage::Ann => write!(f, "ann"),
            Stage::Cascade => write!(f, "cascade"),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RiskAssessment {
    pub probability_pct: f64,
    pub level: RiskLevel,
    pub stage: Stage,
    pub ann_output: Option<f64>,
}

/// GLCM statistics feeding the neural stage, averaged over the four
/// offsets; the eighth input is the gray-channel skewness.
pub const ANN_GLCM_STATS: [&str; 7] = [
    "mean",
    "correlation",
    "homogeneity",
    "contrast",
    "energy",
    "kurtosis",
    "dissimilarity",
];

/// Extracts the 8 raw neural-stage inputs from a full feature vector.
pub fn ann_inputs(f: &FeatureVector) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(MLP_INPUTS);
    for stat in ANN_GLCM_STATS {
        let mut acc = 0.0;
        for angle in ["0", "45", "90", "135"] {
            let name = format!("glcm_{stat}_{angle}");
            acc += f
                .get(&name)
                .ok_or_else(|| Error::InvalidInput(format!("feature '{name}' missing")))?;
        }
        out.push(acc / 4.0);
    }
    out.push(
        f.get("gray_skewness")
            .ok_or_else(|| Error::InvalidInput("feature 'gray_skewness' missing".into()))?,
    );
    Ok(out)
}

/// Anything able to resolve an indeterminate first-stage outcome.
pub trait SecondStage {
    fn assess(&self, raw_inputs: &[f64]) -> Result<RiskAssessment>;
}

impl SecondStage for MlpModel {
    fn assess(&self, raw_inputs: &[f64]) -> Result<RiskAssessment> {
        mlp_assess(self, raw_inputs)
    }
}

/// Runs the SVM stage and, only for a Medium outcome, hands the case to
/// the second stage. Never returns Medium.
pub fn cascade_assess_with(
    svm: &LinearSvmModel,
    second: &impl SecondStage,
    f: &FeatureVector,
) -> Result<RiskAssessment> {
    let first = svm_assess(svm, f)?;
    if first.level != RiskLevel::Medium {
        return Ok(first);
    }
    let resolved = second.assess(&ann_inputs(f)?)?;
    Ok(RiskAssessment {
        probability_pct: resolved.probability_pct,
        level: resolved.level,
        stage: Stage::Cascade,
        ann_output: resolved.ann_output,
    })
}

pub fn cascade_assess(
    svm: &LinearSvmModel,
    mlp: &MlpModel,
    f: &FeatureVector,
) -> Result<RiskAssessment> {
    cascade_assess_with(svm, mlp, f)
}
