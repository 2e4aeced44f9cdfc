//! Orchestration: configuration, dataset ingestion, fixtures, per-record
//! runs, training, evaluation and report rendering.

mod config;
mod dataset;
mod evaluate;
mod fixtures;
mod report;
mod run;
mod train;

pub use config::{ClassifierSettings, PipelineConfig, ReportSettings, RocSource, SnakeSettings};
pub use dataset::{ingest, ingest_manifest, DatasetRecord, SourceKind};
pub use evaluate::{
    evaluate, roc_points, trapezoid_auc, ConfusionCounts, EvaluationReport, FailedRecord,
};
pub use fixtures::{generate_fixtures, FixtureSpec};
pub use report::{auc_from_roc_csv, report_read, report_write, ReportFormat};
pub use run::{
    run_one, segment_all, write_feature_csv, ClassificationRow, CompletedRun, RunArtifacts,
    RunOutcome, SegmentationSet, SimilarityRow, TrainedModels, MLP_MODEL_FILE, SVM_MODEL_FILE,
};
pub use train::{train, TrainSummary};
