//! Report rendering: similarity and classification tables, confusion
//! matrix, ROC points and a plain-text summary.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::evaluate::{trapezoid_auc, EvaluationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    /// similarity.csv, classification.csv, confusion.csv, roc.csv,
    /// summary.txt
    Csv,
    /// report.json with the whole report structure
    Json,
}

pub fn report_write(
    report: &EvaluationReport,
    out_dir: &Path,
    format: ReportFormat,
    precision: usize,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    match format {
        ReportFormat::Json => {
            let path = out_dir.join("report.json");
            let json = serde_json::to_string_pretty(report)
                .map_err(|e| Error::InvalidInput(e.to_string()))?;
            std::fs::write(&path, json)?;
            Ok(vec![path])
        }
        ReportFormat::Csv => write_csv_set(report, out_dir, precision),
    }
}

fn write_csv_set(
    report: &EvaluationReport,
    out_dir: &Path,
    precision: usize,
) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    let similarity_omitted = report.similarity_rows.is_empty();
    if !similarity_omitted {
        let path = out_dir.join("similarity.csv");
        let mut text = String::from(
            "id,ac_ssim,ws_ssim,merged_ssim,ac_jaccard,ws_jaccard,merged_jaccard,ac_dice,ws_dice,merged_dice\n",
        );
        for row in &report.similarity_rows {
            text.push_str(&format!(
                "{},{:.p$},{:.p$},{:.p$},{:.p$},{:.p$},{:.p$},{:.p$},{:.p$},{:.p$}\n",
                row.id,
                row.ac.ssim_pct,
                row.ws.ssim_pct,
                row.merged.ssim_pct,
                row.ac.jaccard_pct,
                row.ws.jaccard_pct,
                row.merged.jaccard_pct,
                row.ac.dice_pct,
                row.ws.dice_pct,
                row.merged.dice_pct,
                p = precision,
            ));
        }
        std::fs::write(&path, text)?;
        files.push(path);
    }

    let path = out_dir.join("classification.csv");
    let mut text = String::from("id,prob_truth_mask,prob_merged_mask,final_level,stage\n");
    for row in &report.classification_rows {
        let truth = row
            .prob_truth_pct
            .map(|p| format!("{p:.precision$}"))
            .unwrap_or_default();
        text.push_str(&format!(
            "{},{},{:.p$},{},{}\n",
            row.id,
            truth,
            row.prob_merged_pct,
            row.final_level,
            row.stage,
            p = precision,
        ));
    }
    std::fs::write(&path, text)?;
    files.push(path);

    let path = out_dir.join("confusion.csv");
    let c = &report.confusion;
    std::fs::write(
        &path,
        format!(
            ",predicted_melanoma,predicted_non_melanoma\n\
             actual_melanoma,{},{}\n\
             actual_non_melanoma,{},{}\n",
            c.true_positive, c.false_negative, c.false_positive, c.true_negative
        ),
    )?;
    files.push(path);

    let path = out_dir.join("roc.csv");
    let mut text = String::from("fpr,tpr\n");
    for (fpr, tpr) in &report.roc {
        // full precision so the area is re-derivable exactly
        text.push_str(&format!("{fpr},{tpr}\n"));
    }
    std::fs::write(&path, text)?;
    files.push(path);

    let path = out_dir.join("summary.txt");
    let mut text = String::new();
    text.push_str(&format!(
        "records evaluated: {}\n",
        report.classification_rows.len()
    ));
    text.push_str(&format!("records failed: {}\n", report.failed.len()));
    for f in &report.failed {
        text.push_str(&format!("  {} failed at {}: {}\n", f.id, f.stage, f.message));
    }
    text.push_str(&format!("accuracy: {:.4}\n", report.accuracy));
    text.push_str(&format!(
        "auc ({:?} source): {:.4}\n",
        report.roc_source, report.auc
    ));
    text.push_str(&format!(
        "confusion: tp={} fn={} fp={} tn={}\n",
        c.true_positive, c.false_negative, c.false_positive, c.true_negative
    ));
    if similarity_omitted {
        text.push_str("similarity.csv omitted: no records carried ground-truth masks\n");
    }
    std::fs::write(&path, text)?;
    files.push(path);

    Ok(files)
}

/// Reads a report back from its JSON rendering.
pub fn report_read(path: &Path) -> Result<EvaluationReport> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("bad report: {e}")))
}

/// Recomputes the AUC from a written roc.csv, for cross-checking.
pub fn auc_from_roc_csv(path: &Path) -> Result<f64> {
    let text = std::fs::read_to_string(path)?;
    let mut points = Vec::new();
    for line in text.lines().skip(1) {
        let mut parts = line.split(',');
        let fpr: f64 = parts
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::InvalidInput(format!("bad roc line '{line}'")))?;
        let tpr: f64 = parts
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::InvalidInput(format!("bad roc line '{line}'")))?;
        points.push((fpr, tpr));
    }
    Ok(trapezoid_auc(&points))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::{RiskLevel, Stage};
    use crate::pipeline::config::RocSource;
    use crate::pipeline::evaluate::ConfusionCounts;
    use crate::pipeline::run::{ClassificationRow, SimilarityRow};
    use crate::similarity::SimilarityReport;

    fn report_fixture(with_similarity: bool) -> EvaluationReport {
        let sim = |v: f64| SimilarityReport {
            ssim_pct: v,
            jaccard_pct: v - 1.0,
            dice_pct: v - 0.5,
        };
        EvaluationReport {
            similarity_rows: if with_similarity {
                (0..6)
                    .map(|i| SimilarityRow {
                        id: format!("case_{i}"),
                        ac: sim(99.85),
                        ws: sim(99.2),
                        merged: sim(99.9),
                    })
                    .collect()
            } else {
                Vec::new()
            },
            classification_rows: (0..6)
                .map(|i| ClassificationRow {
                    id: format!("case_{i}"),
                    prob_truth_pct: if i % 2 == 0 { Some(55.25) } else { None },
                    prob_merged_pct: 40.0 + i as f64,
                    final_level: if i < 3 { RiskLevel::High } else { RiskLevel::Low },
                    stage: Stage::Svm,
                    ann_probe: Some(0.5),
                    label: None,
                })
                .collect(),
            confusion: ConfusionCounts {
                true_positive: 3,
                false_negative: 0,
                false_positive: 0,
                true_negative: 3,
            },
            roc: vec![(0.0, 0.0), (0.0, 1.0), (1.0, 1.0)],
            auc: 1.0,
            accuracy: 1.0,
            roc_source: RocSource::Ann,
            failed: Vec::new(),
        }
    }

    #[test]
    fn csv_set_has_expected_shape_and_rounding() {
        let dir = tempfile::tempdir().unwrap();
        let report = report_fixture(true);
        let files = report_write(&report, dir.path(), ReportFormat::Csv, 1).unwrap();
        assert_eq!(files.len(), 5);

        let sim = std::fs::read_to_string(dir.path().join("similarity.csv")).unwrap();
        let lines: Vec<&str> = sim.lines().collect();
        assert_eq!(lines.len(), 7); // header + 6 rows
        // 99.85 renders as 99.9 at one decimal
        assert!(lines[1].contains("99.9"), "{}", lines[1]);

        let cls = std::fs::read_to_string(dir.path().join("classification.csv")).unwrap();
        assert!(cls.lines().nth(1).unwrap().contains("55.2")); // banker-free rounding via format!
        assert!(cls.lines().nth(2).unwrap().contains(",,")); // absent truth prob
    }

    #[test]
    fn empty_similarity_is_omitted_and_noted() {
        let dir = tempfile::tempdir().unwrap();
        let report = report_fixture(false);
        report_write(&report, dir.path(), ReportFormat::Csv, 1).unwrap();
        assert!(!dir.path().join("similarity.csv").exists());
        let summary = std::fs::read_to_string(dir.path().join("summary.txt")).unwrap();
        assert!(summary.contains("similarity.csv omitted"));
    }

    #[test]
    fn json_round_trips_and_auc_rederives() {
        let dir = tempfile::tempdir().unwrap();
        let report = report_fixture(true);
        report_write(&report, dir.path(), ReportFormat::Json, 1).unwrap();
        let loaded = report_read(&dir.path().join("report.json")).unwrap();
        assert_eq!(loaded.classification_rows.len(), 6);
        assert_eq!(loaded.auc, report.auc);

        report_write(&report, dir.path(), ReportFormat::Csv, 1).unwrap();
        let auc = auc_from_roc_csv(&dir.path().join("roc.csv")).unwrap();
        assert!((auc - report.auc).abs() < 1e-12);
    }
}
