//! Command-line front end for the lesion analysis pipeline.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use lesionscan::error::Error;
use lesionscan::pipeline::{
    evaluate, generate_fixtures, ingest, ingest_manifest, report_read, report_write, run_one,
    segment_all, train, write_feature_csv, DatasetRecord, FixtureSpec, PipelineConfig,
    ReportFormat, RocSource, RunOutcome, SourceKind, TrainedModels,
};
use lesionscan::preprocess::preprocess;
use lesionscan::raster::io;

/// Dermoscopy lesion segmentation, feature extraction and risk
/// classification.
#[derive(Parser)]
#[command(name = "lesionscan", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct DataArgs {
    /// CSV manifest with columns id,image,mask,label.
    #[arg(long, conflicts_with = "dataset")]
    manifest: Option<PathBuf>,
    /// Dataset root directory.
    #[arg(long, requires = "source")]
    dataset: Option<PathBuf>,
    /// Dataset layout under --dataset.
    #[arg(long, value_enum)]
    source: Option<SourceArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SourceArg {
    Ph2,
    Dermis,
    Dermquest,
    Custom,
}

impl From<SourceArg> for SourceKind {
    fn from(s: SourceArg) -> Self {
        match s {
            SourceArg::Ph2 => SourceKind::Ph2,
            SourceArg::Dermis => SourceKind::Dermis,
            SourceArg::Dermquest => SourceKind::Dermquest,
            SourceArg::Custom => SourceKind::Custom,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Watershed,
    Snake,
    Merged,
}

#[derive(Clone, Copy, ValueEnum)]
enum RocSourceArg {
    Cascade,
    Ann,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a deterministic synthetic lesion corpus with ground truth.
    Fixtures {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 20)]
        per_class: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 128)]
        size: usize,
    },
    /// Segment one image or a whole dataset.
    Segment {
        /// Single input image (PNG/BMP).
        #[arg(long, conflicts_with_all = ["manifest", "dataset"])]
        image: Option<PathBuf>,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "merged")]
        method: MethodArg,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
        /// Exit nonzero if any record fails.
        #[arg(long)]
        strict: bool,
    },
    /// Extract the 73-feature vector for an image (+ optional mask).
    Features {
        #[arg(long)]
        image: PathBuf,
        /// Lesion mask; computed via merged segmentation when absent.
        #[arg(long)]
        mask: Option<PathBuf>,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Train the SVM + neural cascade on labeled records.
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override both training seeds.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Classify one image with trained models.
    Classify {
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        mask: Option<PathBuf>,
        /// Directory holding svm.json and mlp.json.
        #[arg(long)]
        models: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run the evaluation harness over labeled records.
    Evaluate {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        models: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        roc_source: Option<RocSourceArg>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        strict: bool,
    },
    /// Re-render a saved report.json.
    Report {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
}

/// 0 success, 1 usage, 2 data, 3 processing.
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Dataset(_)
        | Error::Io(_)
        | Error::Image(_)
        | Error::Csv(_)
        | Error::ModelFormat(_)
        | Error::RegistryMismatch { .. }
        | Error::InvalidConfig(_) => 2,
        _ => 3,
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<PipelineConfig, Error> {
    match path {
        Some(p) => PipelineConfig::load(p),
        None => Ok(PipelineConfig::default()),
    }
}

fn load_records(data: &DataArgs) -> Result<Vec<DatasetRecord>, Error> {
    match (&data.manifest, &data.dataset, data.source) {
        (Some(manifest), None, _) => ingest_manifest(manifest),
        (None, Some(root), Some(source)) => ingest(root, source.into()),
        _ => Err(Error::InvalidConfig(
            "provide either --manifest or --dataset with --source".into(),
        )),
    }
}

fn single_record(image: &Path, mask: Option<&PathBuf>) -> DatasetRecord {
    let id = image
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("image")
        .to_string();
    DatasetRecord {
        id,
        image_path: image.to_path_buf(),
        truth_mask_path: mask.cloned(),
        label: None,
        source: SourceKind::Custom,
    }
}

fn run(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Fixtures {
            out,
            per_class,
            seed,
            size,
        } => {
            let records = generate_fixtures(
                &out,
                &FixtureSpec {
                    per_class,
                    seed,
                    size,
                },
            )?;
            println!(
                "wrote {} fixture cases under {} (manifest.csv included)",
                records.len(),
                out.display()
            );
            Ok(true)
        }
        Command::Segment {
            image,
            data,
            out,
            method,
            config,
            workers,
            strict,
        } => {
            let mut cfg = load_config(&config)?;
            if let Some(w) = workers {
                cfg.workers = w;
            }
            let records = match image {
                Some(path) => vec![single_record(&path, None)],
                None => load_records(&data)?,
            };
            let mut failures = 0usize;
            for record in &records {
                let artifacts = run_one(record, &cfg, None, Some(&out));
                match &artifacts.outcome {
                    RunOutcome::Completed(_) => {
                        let name = match method {
                            MethodArg::Watershed => "watershed.png",
                            MethodArg::Snake => "snake.png",
                            MethodArg::Merged => "merged.png",
                        };
                        println!(
                            "{}: {}",
                            record.id,
                            out.join(&record.id).join(name).display()
                        );
                    }
                    RunOutcome::Failed { stage, message } => {
                        eprintln!("{} failed at {stage}: {message}", record.id);
                        failures += 1;
                    }
                }
            }
            Ok(!(strict || cfg.strict) || failures == 0)
        }
        Command::Features {
            image,
            mask,
            out,
            config,
        } => {
            let cfg = load_config(&config)?;
            let record = single_record(&image, mask.as_ref());
            let img = io::read_image(&record.image_path)?;
            let rgb = if img.channels() == 3 {
                img
            } else {
                lesionscan::raster::RasterImage::from_fn(img.width(), img.height(), 3, |x, y, _| {
                    img.gray(x, y)
                })?
            };
            let (clean, _) = preprocess(&rgb, &cfg.preprocess)?;
            let lesion_mask = match &record.truth_mask_path {
                Some(p) => io::read_mask(p)?,
                None => segment_all(&clean, &cfg)?.merged,
            };
            let (features, measurements) =
                lesionscan::features::assemble_features(&clean, &lesion_mask, &cfg.features)?;
            write_feature_csv(&out, &record.id, &features, &measurements)?;
            println!("wrote {}", out.display());
            Ok(true)
        }
        Command::Train {
            data,
            out,
            config,
            seed,
        } => {
            let mut cfg = load_config(&config)?;
            if let Some(seed) = seed {
                cfg.set_seed(seed);
            }
            let records = load_records(&data)?;
            let (_, summary) = train(&records, &cfg, &out)?;
            println!(
                "trained on {} records; training accuracy {:.3}",
                summary.records_used, summary.training_accuracy
            );
            println!(
                "selected {} features (RFE dropped {}), models in {}",
                summary.selected.len(),
                summary.eliminated.len(),
                out.display()
            );
            Ok(true)
        }
        Command::Classify {
            image,
            mask,
            models,
            out,
            config,
        } => {
            let cfg = load_config(&config)?;
            let models = TrainedModels::load(&models)?;
            let record = single_record(&image, mask.as_ref());
            let artifacts = run_one(&record, &cfg, Some(&models), out.as_deref());
            match artifacts.outcome {
                RunOutcome::Completed(run) => {
                    let a = run.assessment.expect("models were provided");
                    println!(
                        "{}: risk {} ({:.1}% via {} stage)",
                        record.id, a.level, a.probability_pct, a.stage
                    );
                    if let Some(cls) = &run.classification {
                        if let Some(p) = cls.prob_truth_pct {
                            println!("  svm probability with provided mask: {p:.1}%");
                        }
                        println!(
                            "  svm probability with merged mask: {:.1}%",
                            cls.prob_merged_pct
                        );
                    }
                    Ok(true)
                }
                RunOutcome::Failed { stage, message } => Err(Error::Stage { stage, message }),
            }
        }
        Command::Evaluate {
            data,
            models,
            out,
            config,
            roc_source,
            workers,
            strict,
        } => {
            let mut cfg = load_config(&config)?;
            if let Some(w) = workers {
                cfg.workers = w;
            }
            if let Some(src) = roc_source {
                cfg.report.roc_source = match src {
                    RocSourceArg::Cascade => RocSource::Cascade,
                    RocSourceArg::Ann => RocSource::Ann,
                };
            }
            let records = load_records(&data)?;
            let models = TrainedModels::load(&models)?;
            let report = evaluate(&records, &cfg, &models, Some(&out))?;
            report_write(&report, &out, ReportFormat::Csv, cfg.report.precision)?;
            report_write(&report, &out, ReportFormat::Json, cfg.report.precision)?;
            println!(
                "evaluated {} records: accuracy {:.3}, auc {:.3} ({} failed)",
                report.classification_rows.len(),
                report.accuracy,
                report.auc,
                report.failed.len()
            );
            println!("reports in {}", out.display());
            Ok(!(strict || cfg.strict) || report.failed.is_empty())
        }
        Command::Report {
            report,
            out,
            format,
        } => {
            let loaded = report_read(&report)?;
            let format = match format {
                FormatArg::Csv => ReportFormat::Csv,
                FormatArg::Json => ReportFormat::Json,
            };
            let files = report_write(&loaded, &out, format, 1)?;
            for f in files {
                println!("wrote {}", f.display());
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1), // usage error
            };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        // completed, but some records failed under strict mode
        Ok(false) => ExitCode::from(3),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
