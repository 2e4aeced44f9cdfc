//! Training entry point: features from merged masks, bounds learned over
//! the training set, SVM-RFE then the final SVM, and the neural stage on
//! the 8 averaged GLCM inputs.

use std::path::Path;

use crate::classifiers::{
    ann_inputs, train_mlp, ClassLabel, LinearSvmModel,
};
use crate::error::{Error, Result};
use crate::features::{canonical_names, FeatureVector};

use super::config::PipelineConfig;
use super::dataset::DatasetRecord;
use super::run::{run_one, RunOutcome, TrainedModels};

#[derive(Debug, Clone)]
pub struct TrainSummary {
    pub records_used: usize,
    pub selected: Vec<String>,
    pub eliminated: Vec<String>,
    pub training_accuracy: f64,
}

/// Extracts features for every labeled record; any failed record aborts
/// training with its id, since silently dropping training data would bias
/// the model.
fn training_features(
    records: &[DatasetRecord],
    cfg: &PipelineConfig,
) -> Result<(Vec<FeatureVector>, Vec<ClassLabel>)> {
    let mut labeled: Vec<&DatasetRecord> =
        records.iter().filter(|r| r.label.is_some()).collect();
    labeled.sort_by(|a, b| a.id.cmp(&b.id));
    if labeled.len() < records.len() {
        eprintln!(
            "warning: ignoring {} unlabeled record(s) for training",
            records.len() - labeled.len()
        );
    }
    let mut features = Vec::with_capacity(labeled.len());
    let mut labels = Vec::with_capacity(labeled.len());
    for record in labeled {
        let artifacts = run_one(record, cfg, None, None);
        match artifacts.outcome {
            RunOutcome::Completed(run) => {
                features.push(run.features);
                labels.push(record.label.expect("filtered above"));
            }
            RunOutcome::Failed { stage, message } => {
                return Err(Error::Stage {
                    stage: format!("train/{stage}"),
                    message: format!("record '{}': {message}", record.id),
                });
            }
        }
    }
    Ok((features, labels))
}

/// Trains both stages and persists them (plus the RFE trace) under
/// `out_dir`. Deterministic for fixed seeds: records are processed in id
/// order and both optimizers are full-batch.
pub fn train(
    records: &[DatasetRecord],
    cfg: &PipelineConfig,
    out_dir: &Path,
) -> Result<(TrainedModels, TrainSummary)> {
    let (features, labels) = training_features(records, cfg)?;
    let melanoma = labels.iter().filter(|l| **l == ClassLabel::Melanoma).count();
    if melanoma < 2 || labels.len() - melanoma < 2 {
        return Err(Error::SingleClass { needed: 2 });
    }

    let (svm, eliminated) = LinearSvmModel::train_on_features(
        &features,
        &labels,
        canonical_names(),
        &cfg.classifier.svm,
        cfg.classifier.rfe_target,
    )?;

    let ann_samples: Vec<Vec<f64>> = features
        .iter()
        .map(ann_inputs)
        .collect::<Result<_>>()?;
    let ann_targets: Vec<f64> = labels.iter().map(|l| l.target()).collect();
    let mlp = train_mlp(&ann_samples, &ann_targets, &cfg.classifier.mlp)?;

    let models = TrainedModels { svm, mlp };
    std::fs::create_dir_all(out_dir)?;
    models.save(out_dir)?;

    let mut trace = String::from("step,eliminated\n");
    for (i, name) in eliminated.iter().enumerate() {
        trace.push_str(&format!("{},{}\n", i + 1, name));
    }
    std::fs::write(out_dir.join("rfe_trace.csv"), trace)?;

    let mut correct = 0usize;
    for (f, label) in features.iter().zip(&labels) {
        let assessment =
            crate::classifiers::cascade_assess(&models.svm, &models.mlp, f)?;
        let predicted = match assessment.level {
            crate::classifiers::RiskLevel::High => ClassLabel::Melanoma,
            _ => ClassLabel::NonMelanoma,
        };
        if predicted == *label {
            correct += 1;
        }
    }
    let summary = TrainSummary {
        records_used: labels.len(),
        selected: models.svm.selected.clone(),
        eliminated,
        training_accuracy: correct as f64 / labels.len() as f64,
    };
    Ok((models, summary))
}
