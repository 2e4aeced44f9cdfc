//! Aggregate pipeline configuration, loadable from a TOML file.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classifiers::{MlpHyper, SvmHyper};
use crate::error::{Error, Result};
use crate::features::FeatureConfig;
use crate::preprocess::PreprocessConfig;
use crate::segmentation::{EnergyWeights, WatershedConfig};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SnakeSettings {
    pub weights: EnergyWeights,
    pub max_iter: usize,
    /// Stop once fewer than tol * N points move in a sweep.
    pub tol: f64,
}

impl Default for SnakeSettings {
    fn default() -> Self {
        Self {
            weights: EnergyWeights::default(),
            max_iter: 150,
            tol: 0.02,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifierSettings {
    pub svm: SvmHyper,
    pub mlp: MlpHyper,
    /// RFE survivor count.
    pub rfe_target: usize,
}

impl Default for ClassifierSettings {
    fn default() -> Self {
        Self {
            svm: SvmHyper::default(),
            mlp: MlpHyper::default(),
            rfe_target: 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RocSource {
    Cascade,
    Ann,
}

impl std::str::FromStr for RocSource {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cascade" => Ok(RocSource::Cascade),
            "ann" => Ok(RocSource::Ann),
            other => Err(Error::InvalidConfig(format!(
                "roc source must be 'cascade' or 'ann', got '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ReportSettings {
    /// Decimal places in the similarity/classification tables.
    pub precision: usize,
    pub roc_source: RocSource,
}

impl Default for ReportSettings {
    fn default() -> Self {
        Self {
            precision: 1,
            roc_source: RocSource::Ann,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub preprocess: PreprocessConfig,
    pub watershed: WatershedConfig,
    pub snake: SnakeSettings,
    pub features: FeatureConfig,
    pub classifier: ClassifierSettings,
    pub report: ReportSettings,
    pub workers: usize,
    /// Fail the whole batch (exit 3) when any record fails.
    pub strict: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            preprocess: PreprocessConfig::default(),
            watershed: WatershedConfig::default(),
            snake: SnakeSettings::default(),
            features: FeatureConfig::default(),
            classifier: ClassifierSettings::default(),
            report: ReportSettings::default(),
            workers: 1,
            strict: false,
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: PipelineConfig = toml::from_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.preprocess.validate()?;
        self.watershed.validate()?;
        self.snake.weights.validate()?;
        if self.snake.max_iter == 0 || !(self.snake.tol > 0.0 && self.snake.tol < 1.0) {
            return Err(Error::InvalidConfig(
                "snake.max_iter must be >= 1 and tol in (0, 1)".into(),
            ));
        }
        if self.classifier.rfe_target == 0
            || self.classifier.rfe_target >= crate::features::FEATURE_COUNT
        {
            return Err(Error::InvalidConfig(format!(
                "rfe_target must be in [1, {}]",
                crate::features::FEATURE_COUNT - 1
            )));
        }
        Ok(())
    }

    /// One seed to pin both training stages.
    pub fn set_seed(&mut self, seed: u64) {
        self.classifier.svm.seed = seed;
        self.classifier.mlp.seed = seed;
    }
}
