//! Batch evaluation: per-record runs (optionally in parallel), confusion
//! matrix over final levels, and a threshold-sweep ROC with trapezoidal
//! AUC.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifiers::{ClassLabel, RiskLevel};
use crate::error::{Error, Result};

use super::config::{PipelineConfig, RocSource};
use super::dataset::DatasetRecord;
use super::run::{run_one, ClassificationRow, RunOutcome, SimilarityRow, TrainedModels};

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub true_positive: usize,
    pub false_negative: usize,
    pub false_positive: usize,
    pub true_negative: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.true_positive + self.false_negative + self.false_positive + self.true_negative
    }

    pub fn accuracy(&self) -> f64 {
        (self.true_positive + self.true_negative) as f64 / self.total() as f64
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FailedRecord {
    pub id: String,
    pub stage: String,
    pub message: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub similarity_rows: Vec<SimilarityRow>,
    pub classification_rows: Vec<ClassificationRow>,
    pub confusion: ConfusionCounts,
    pub roc: Vec<(f64, f64)>,
    pub auc: f64,
    pub accuracy: f64,
    pub roc_source: RocSource,
    pub failed: Vec<FailedRecord>,
}

/// Fawcett-style ROC: sweep a descending threshold over the scores,
/// emitting one point per distinct score. Starts at (0,0), ends at (1,1).
pub fn roc_points(scores: &[f64], truths: &[bool]) -> Vec<(f64, f64)> {
    let positives = truths.iter().filter(|&&t| t).count();
    let negatives = truths.len() - positives;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap().then(a.cmp(&b)));

    let mut points = vec![(0.0, 0.0)];
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut i = 0;
    while i < order.len() {
        let score = scores[order[i]];
        while i < order.len() && scores[order[i]] == score {
            if truths[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push((fp as f64 / negatives as f64, tp as f64 / positives as f64));
    }
    if *points.last().unwrap() != (1.0, 1.0) {
        points.push((1.0, 1.0));
    }
    points
}

/// Trapezoidal area under a curve of (x, y) points sorted by x.
pub fn trapezoid_auc(points: &[(f64, f64)]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0)
        .sum()
}

/// Evaluates labeled records with trained models. Per-record artifacts
/// land under `out_dir` when given; failed records are reported and
/// excluded from the metrics.
pub fn evaluate(
    records: &[DatasetRecord],
    cfg: &PipelineConfig,
    models: &TrainedModels,
    out_dir: Option<&Path>,
) -> Result<EvaluationReport> {
    let mut labeled: Vec<&DatasetRecord> =
        records.iter().filter(|r| r.label.is_some()).collect();
    if labeled.is_empty() {
        return Err(Error::Dataset(
            "evaluation needs labeled records".into(),
        ));
    }
    labeled.sort_by(|a, b| a.id.cmp(&b.id));

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))?;
    let mut artifacts: Vec<_> = pool.install(|| {
        labeled
            .par_iter()
            .map(|record| run_one(record, cfg, Some(models), out_dir))
            .collect()
    });
    // aggregation is a deterministic id-ordered reduce
    artifacts.sort_by(|a, b| a.id.cmp(&b.id));

    let mut similarity_rows = Vec::new();
    let mut classification_rows = Vec::new();
    let mut failed = Vec::new();
    for artifact in artifacts {
        match artifact.outcome {
            RunOutcome::Completed(run) => {
                if let Some(sim) = run.similarity {
                    similarity_rows.push(sim);
                }
                if let Some(row) = run.classification {
                    classification_rows.push(row);
                }
            }
            RunOutcome::Failed { stage, message } => failed.push(FailedRecord {
                id: artifact.id,
                stage,
                message,
            }),
        }
    }
    if classification_rows.is_empty() {
        return Err(Error::Dataset(
            "every record failed before classification".into(),
        ));
    }

    let mut confusion = ConfusionCounts::default();
    for row in &classification_rows {
        debug_assert!(row.final_level != RiskLevel::Medium, "cascade leak");
        let truth_melanoma = row.label == Some(ClassLabel::Melanoma);
        let predicted_melanoma = row.final_level == RiskLevel::High;
        match (truth_melanoma, predicted_melanoma) {
            (true, true) => confusion.true_positive += 1,
            (true, false) => confusion.false_negative += 1,
            (false, true) => confusion.false_positive += 1,
            (false, false) => confusion.true_negative += 1,
        }
    }

    let truths: Vec<bool> = classification_rows
        .iter()
        .map(|r| r.label == Some(ClassLabel::Melanoma))
        .collect();
    if truths.iter().all(|&t| t) || truths.iter().all(|&t| !t) {
        return Err(Error::Dataset(
            "ROC needs both classes among evaluated records".into(),
        ));
    }
    let scores: Vec<f64> = classification_rows
        .iter()
        .map(|r| match cfg.report.roc_source {
            RocSource::Ann => r.ann_probe.unwrap_or(r.prob_merged_pct / 100.0),
            RocSource::Cascade => r.prob_merged_pct / 100.0,
        })
        .collect();
    let roc = roc_points(&scores, &truths);
    let auc = trapezoid_auc(&roc);

    Ok(EvaluationReport {
        accuracy: confusion.accuracy(),
        similarity_rows,
        classification_rows,
        confusion,
        roc,
        auc,
        roc_source: cfg.report.roc_source,
        failed,
    })
}
