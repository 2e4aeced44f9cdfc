//! Per-record pipeline execution: preprocess, segment three ways, compare
//! against ground truth, extract features, classify, write artifacts.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classifiers::{
    ann_inputs, cascade_assess, load_mlp_model, load_svm_model, mlp_assess, save_mlp_model,
    save_svm_model, svm_assess, ClassLabel, LinearSvmModel, MlpModel, RiskAssessment, RiskLevel,
    Stage,
};
use crate::error::{Error, Result};
use crate::features::{
    assemble_features, canonical_names, FeatureVector, LesionMeasurements,
};
use crate::preprocess::preprocess;
use crate::raster::{io, BinaryMask, RasterImage};
use crate::segmentation::{
    default_snake_init, merge_masks, snake_segment, watershed_segment,
};
use crate::similarity::{compare_masks, SimilarityConfig, SimilarityReport};

use super::config::PipelineConfig;
use super::dataset::DatasetRecord;

pub const SVM_MODEL_FILE: &str = "svm.json";
pub const MLP_MODEL_FILE: &str = "mlp.json";

#[derive(Debug, Clone)]
pub struct TrainedModels {
    pub svm: LinearSvmModel,
    pub mlp: MlpModel,
}

impl TrainedModels {
    pub fn load(dir: &Path) -> Result<Self> {
        Ok(Self {
            svm: load_svm_model(&dir.join(SVM_MODEL_FILE))?,
            mlp: load_mlp_model(&dir.join(MLP_MODEL_FILE))?,
        })
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        save_svm_model(&self.svm, &dir.join(SVM_MODEL_FILE))?;
        save_mlp_model(&self.mlp, &dir.join(MLP_MODEL_FILE))
    }
}

/// Table II-shaped row: similarity of each computed mask vs ground truth.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimilarityRow {
    pub id: String,
    pub ac: SimilarityReport,
    pub ws: SimilarityReport,
    pub merged: SimilarityReport,
}

/// Table III-shaped row plus the fields evaluation needs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassificationRow {
    pub id: String,
    pub prob_truth_pct: Option<f64>,
    pub prob_merged_pct: f64,
    pub final_level: RiskLevel,
    pub stage: Stage,
    /// ANN output for this record regardless of cascade routing; the
    /// Fig-5-style ROC sweeps this score.
    pub ann_probe: Option<f64>,
    pub label: Option<ClassLabel>,
}

#[derive(Debug, Clone)]
pub struct CompletedRun {
    pub similarity: Option<SimilarityRow>,
    pub classification: Option<ClassificationRow>,
    pub assessment: Option<RiskAssessment>,
    pub features: FeatureVector,
    pub measurements: LesionMeasurements,
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Clone)]
pub enum RunOutcome {
    Completed(Box<CompletedRun>),
    Failed { stage: String, message: String },
}

#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub id: String,
    pub label: Option<ClassLabel>,
    pub outcome: RunOutcome,
}

impl RunArtifacts {
    pub fn completed(&self) -> Option<&CompletedRun> {
        match &self.outcome {
            RunOutcome::Completed(run) => Some(run),
            RunOutcome::Failed { .. } => None,
        }
    }
}

fn stage_err<T>(stage: &str, r: Result<T>) -> std::result::Result<T, (String, String)> {
    r.map_err(|e| (stage.to_string(), e.to_string()))
}

fn to_rgb(img: RasterImage) -> RasterImage {
    if img.channels() == 3 {
        return img;
    }
    RasterImage::from_fn(img.width(), img.height(), 3, |x, y, _| img.gray(x, y))
        .expect("same shape")
}

/// Draws the mask boundary onto the original image in red.
fn overlay(img: &RasterImage, mask: &BinaryMask) -> RasterImage {
    let boundary: std::collections::BTreeSet<(usize, usize)> =
        mask.boundary().into_iter().collect();
    RasterImage::from_fn(img.width(), img.height(), 3, |x, y, c| {
        if boundary.contains(&(x, y)) {
            [255, 0, 0][c]
        } else {
            img.get(x, y, c)
        }
    })
    .expect("same shape")
}

pub struct SegmentationSet {
    pub watershed: BinaryMask,
    pub snake: BinaryMask,
    pub merged: BinaryMask,
}

/// The three segmentation products for a preprocessed image.
pub fn segment_all(clean: &RasterImage, cfg: &PipelineConfig) -> Result<SegmentationSet> {
    let gray = clean.to_grayscale();
    let ws = watershed_segment(&gray, &cfg.watershed)?;
    let init = default_snake_init(&gray)?;
    let ac = snake_segment(
        &gray,
        &init,
        &cfg.snake.weights,
        cfg.snake.max_iter,
        cfg.snake.tol,
    )?;
    let merged = merge_masks(&ws, &ac)?;
    Ok(SegmentationSet {
        watershed: ws,
        snake: ac,
        merged,
    })
}

/// Writes one feature CSV row (with header) for an extracted vector.
pub fn write_feature_csv(
    path: &Path,
    id: &str,
    features: &FeatureVector,
    measurements: &LesionMeasurements,
) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut text = String::from("id,");
    text.push_str(&canonical_names().join(","));
    text.push_str(",diameter_px,diameter_mm\n");
    text.push_str(id);
    for v in features.values() {
        text.push_str(&format!(",{v}"));
    }
    text.push_str(&format!(",{}", measurements.diameter_px));
    match measurements.diameter_mm {
        Some(mm) => text.push_str(&format!(",{mm}\n")),
        None => text.push_str(",\n"),
    }
    std::fs::write(path, text)?;
    Ok(())
}

/// Runs the full per-record pipeline. Errors are captured per stage into
/// a failed outcome so batch callers can keep going.
pub fn run_one(
    record: &DatasetRecord,
    cfg: &PipelineConfig,
    models: Option<&TrainedModels>,
    out_dir: Option<&Path>,
) -> RunArtifacts {
    let outcome = run_one_inner(record, cfg, models, out_dir);
    let outcome = match outcome {
        Ok(run) => RunOutcome::Completed(Box::new(run)),
        Err((stage, message)) => {
            if let Some(dir) = out_dir {
                let case_dir = dir.join(&record.id);
                let _ = std::fs::create_dir_all(&case_dir);
                let _ = std::fs::write(
                    case_dir.join("error.txt"),
                    format!("stage: {stage}\nerror: {message}\n"),
                );
            }
            RunOutcome::Failed { stage, message }
        }
    };
    RunArtifacts {
        id: record.id.clone(),
        label: record.label,
        outcome,
    }
}

fn run_one_inner(
    record: &DatasetRecord,
    cfg: &PipelineConfig,
    models: Option<&TrainedModels>,
    out_dir: Option<&Path>,
) -> std::result::Result<CompletedRun, (String, String)> {
    let original = to_rgb(stage_err("load", io::read_image(&record.image_path))?);
    let truth = match &record.truth_mask_path {
        Some(p) => {
            let mask = stage_err("load", io::read_mask(p))?;
            if mask.width() != original.width() || mask.height() != original.height() {
                return Err((
                    "load".into(),
                    format!(
                        "truth mask is {}x{} but the image is {}x{}",
                        mask.width(),
                        mask.height(),
                        original.width(),
                        original.height()
                    ),
                ));
            }
            Some(mask)
        }
        None => None,
    };

    let (clean, _hair) = stage_err("preprocess", preprocess(&original, &cfg.preprocess))?;
    let masks = stage_err("segmentation", segment_all(&clean, cfg))?;

    let similarity = match &truth {
        Some(truth) => {
            let sim_cfg = SimilarityConfig::default();
            Some(SimilarityRow {
                id: record.id.clone(),
                ac: stage_err("similarity", compare_masks(&masks.snake, truth, &sim_cfg))?,
                ws: stage_err(
                    "similarity",
                    compare_masks(&masks.watershed, truth, &sim_cfg),
                )?,
                merged: stage_err(
                    "similarity",
                    compare_masks(&masks.merged, truth, &sim_cfg),
                )?,
            })
        }
        None => None,
    };

    let (features, measurements) = stage_err(
        "features",
        assemble_features(&clean, &masks.merged, &cfg.features),
    )?;

    let (classification, assessment) = match models {
        Some(models) => {
            let final_assessment =
                stage_err("classification", cascade_assess(&models.svm, &models.mlp, &features))?;
            let merged_svm = stage_err("classification", svm_assess(&models.svm, &features))?;
            let ann_probe = stage_err(
                "classification",
                ann_inputs(&features).and_then(|x| mlp_assess(&models.mlp, &x)),
            )?
            .ann_output;
            let prob_truth_pct = match &truth {
                Some(truth_mask) => {
                    let (truth_features, _) = stage_err(
                        "classification",
                        assemble_features(&clean, truth_mask, &cfg.features),
                    )?;
                    Some(
                        stage_err("classification", svm_assess(&models.svm, &truth_features))?
                            .probability_pct,
                    )
                }
                None => None,
            };
            (
                Some(ClassificationRow {
                    id: record.id.clone(),
                    prob_truth_pct,
                    prob_merged_pct: merged_svm.probability_pct,
                    final_level: final_assessment.level,
                    stage: final_assessment.stage,
                    ann_probe,
                    label: record.label,
                }),
                Some(final_assessment),
            )
        }
        None => (None, None),
    };

    let mut files = Vec::new();
    if let Some(dir) = out_dir {
        let case_dir = dir.join(&record.id);
        let write = |name: &str, mask: &BinaryMask| -> std::result::Result<PathBuf, (String, String)> {
            let path = case_dir.join(name);
            stage_err("artifacts", io::write_mask(mask, &path))?;
            Ok(path)
        };
        files.push(write("watershed.png", &masks.watershed)?);
        files.push(write("snake.png", &masks.snake)?);
        files.push(write("merged.png", &masks.merged)?);
        let overlay_path = case_dir.join("overlay.png");
        stage_err(
            "artifacts",
            io::write_image(&overlay(&original, &masks.merged), &overlay_path),
        )?;
        files.push(overlay_path);
        let features_path = case_dir.join("features.csv");
        stage_err(
            "artifacts",
            write_feature_csv(&features_path, &record.id, &features, &measurements),
        )?;
        files.push(features_path);
        if let Some(a) = &assessment {
            let path = case_dir.join("assessment.json");
            let json = serde_json::to_string_pretty(a)
                .map_err(|e| ("artifacts".to_string(), e.to_string()))?;
            stage_err("artifacts", std::fs::write(&path, json).map_err(Error::from))?;
            files.push(path);
        }
    }

    Ok(CompletedRun {
        similarity,
        classification,
        assessment,
        features,
        measurements,
        files,
    })
}
