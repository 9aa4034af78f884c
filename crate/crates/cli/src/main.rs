use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use interview_analytics::bundle::{bundle_paths, predict_record, ModelBundle, BUNDLE_FORMAT};
use interview_analytics::classifiers::ModelFamily;
use interview_analytics::config::Config;
use interview_analytics::eval::{render_tables, results_csv, run_experiment_matrix, Dataset, NoMatrixObserver, RunManifest};
use interview_analytics::exec::Execution;
use interview_analytics::extract::{extract_features, read_cache, write_cache, ExtractedFeatures};
use interview_analytics::model::{load_manifest, InterviewRecord, LabelName, ModalityMask};
use interview_analytics::pipeline::{fit_pipeline, NoObserver};
use interview_analytics::preprocess::SelectorSpec;
use interview_analytics::report::{render_report, FeedbackTemplates, Predictions};
use interview_analytics::{Error, Result};

#[derive(Parser)]
#[command(name = "interview", version, about = "Multimodal interview analytics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract audio, video and lexical features for every manifest record.
    Extract {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Train one model bundle per label on all records.
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        choice: ModelChoice,
        #[command(flatten)]
        common: Common,
    },
    /// Run the cross-validated experiment matrix and write result tables.
    Evaluate {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        choice: ModelChoice,
        #[command(flatten)]
        common: Common,
    },
    /// Predict all bundled labels for one record.
    Predict {
        /// Bundle file or directory of `*.model.json` bundles.
        #[arg(long)]
        models: PathBuf,
        #[arg(long)]
        record: String,
        /// Feature cache holding the record.
        #[arg(long, required_unless_present = "manifest")]
        features: Option<PathBuf>,
        /// Manifest holding the record; its raw inputs are extracted.
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Render a feedback report from predictions.
    Report {
        #[arg(long)]
        predictions: PathBuf,
        /// Output directory for report.txt and report.json.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Run everything on the calling thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct DataArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Feature cache from `extract`; features are extracted on the fly otherwise.
    #[arg(long)]
    features: Option<PathBuf>,
}

#[derive(Args)]
struct ModelChoice {
    /// Comma-separated modality set, e.g. audio,video,lexical.
    #[arg(long)]
    modalities: Option<ModalityMask>,
    #[arg(long)]
    selector: Option<SelectorSpec>,
    #[arg(long)]
    model: Option<ModelFamily>,
    /// A label name or `all`.
    #[arg(long)]
    label: Option<String>,
}

fn labels_arg(label: &Option<String>) -> Result<Option<Vec<LabelName>>> {
    match label.as_deref() {
        None => Ok(None),
        Some(s) if s.eq_ignore_ascii_case("all") => Ok(Some(LabelName::ALL.to_vec())),
        Some(s) => Ok(Some(vec![s.parse()?])),
    }
}

impl Common {
    fn load(&self) -> Result<(Config, PathBuf)> {
        let mut cfg = match &self.config {
            Some(p) => Config::load(p)?,
            None => Config::default(),
        };
        if let Some(seed) = self.seed {
            cfg.experiment.seed = seed;
        }
        let base = self
            .config
            .as_ref()
            .and_then(|p| p.parent())
            .map(Path::to_path_buf)
            .unwrap_or_default();
        Ok((cfg, base))
    }

    fn exec(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }
}

fn load_features(
    data: &DataArgs,
    cfg: &Config,
    base: &Path,
    exec: Execution,
) -> Result<(Vec<InterviewRecord>, ExtractedFeatures)> {
    let records = load_manifest(&data.manifest)?;
    let features = match &data.features {
        Some(dir) => read_cache(dir, Some(&cfg.features))?,
        None => extract_features(&records, &cfg.features, base, exec)?,
    };
    Ok((records, features))
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.into(), source: e })?;
    }
    fs::write(path, text).map_err(|e| Error::Io { path: path.into(), source: e })
}

fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Extract { manifest, out, common } => {
            let (cfg, base) = common.load()?;
            let records = load_manifest(&manifest)?;
            let features = extract_features(&records, &cfg.features, &base, common.exec())?;
            write_cache(&out, &features, &cfg.features)?;
            println!(
                "extracted {} records: audio {} / video {} / lexical {} columns -> {}",
                records.len(),
                features.audio.n_cols(),
                features.video.n_cols(),
                features.lexical.n_cols(),
                out.display()
            );
        }
        Command::Train { data, out, choice, common } => {
            let (cfg, base) = common.load()?;
            let exec = common.exec();
            let (records, features) = load_features(&data, &cfg, &base, exec)?;
            let dataset = Dataset::from_records(features.parts(), &records)?;
            let mask = choice.modalities.unwrap_or(cfg.train.modalities);
            let selector = choice.selector.unwrap_or(cfg.train.selector);
            let family = choice.model.unwrap_or(cfg.train.model);
            let labels = labels_arg(&choice.label)?.unwrap_or_else(|| LabelName::ALL.to_vec());
            let grid = cfg.experiment.grid_for(family)?;
            let fused = dataset.fused(mask)?;
            fs::create_dir_all(&out).map_err(|e| Error::Io { path: out.clone(), source: e })?;
            for label in labels {
                let pipeline = fit_pipeline(
                    &fused,
                    dataset.label(label)?,
                    &selector,
                    &grid,
                    &cfg.experiment.pipeline,
                    exec,
                    &NoObserver,
                )?;
                let bundle = ModelBundle {
                    format: BUNDLE_FORMAT,
                    label,
                    modalities: mask,
                    selector,
                    training_rows: fused.n_rows(),
                    pipeline,
                };
                let path = out.join(ModelBundle::file_name(label));
                bundle.save(&path)?;
                println!(
                    "{label}: {} on {} of {} columns -> {}",
                    family.short_name(),
                    bundle.pipeline.selected_columns.len(),
                    fused.n_cols(),
                    path.display()
                );
            }
        }
        Command::Evaluate { data, out, choice, common } => {
            let (mut cfg, base) = common.load()?;
            let exec = common.exec();
            if let Some(m) = choice.modalities {
                cfg.experiment.modalities = vec![m];
            }
            if let Some(s) = choice.selector {
                cfg.experiment.selectors = vec![s];
            }
            if let Some(m) = choice.model {
                cfg.experiment.models = vec![m];
            }
            if let Some(l) = labels_arg(&choice.label)? {
                cfg.experiment.labels = l;
            }
            let (records, features) = load_features(&data, &cfg, &base, exec)?;
            let dataset = Dataset::from_records(features.parts(), &records)?;
            let results = run_experiment_matrix(&dataset, &cfg.experiment, exec, &NoMatrixObserver)?;
            for t in render_tables(&results) {
                let text = t.to_csv();
                write(&out.join(format!("{}.csv", t.name)), &text)?;
                println!("{}\n{}", t.caption, text);
            }
            write(&out.join("results.csv"), &results_csv(&results))?;
            let manifest = RunManifest::new(&cfg.experiment, dataset.n_rows(), &results)?;
            write(&out.join("run_manifest.json"), &(manifest.to_json()? + "\n"))?;
            println!("{} cells -> {}", results.len(), out.display());
        }
        Command::Predict { models, record, features, manifest, out, common } => {
            let (cfg, base) = common.load()?;
            let bundles = bundle_paths(&models)?
                .iter()
                .map(|p| ModelBundle::load(p))
                .collect::<Result<Vec<_>>>()?;
            let features = match (features, manifest) {
                (Some(dir), _) => read_cache(&dir, None)?,
                (None, Some(m)) => {
                    let records = load_manifest(&m)?;
                    let one: Vec<InterviewRecord> = records.into_iter().filter(|r| r.id == record).collect();
                    if one.is_empty() {
                        return Err(Error::Data(format!("record `{record}` not in {}", m.display())));
                    }
                    extract_features(&one, &cfg.features, &base, common.exec())?
                }
                (None, None) => unreachable!("clap requires one input"),
            };
            let predictions = predict_record(&bundles, &features, &record)?;
            for (label, p) in &predictions.labels {
                println!("{label}: {}", p.class);
            }
            if let Some(path) = out {
                write(&path, &json(&predictions))?;
            }
        }
        Command::Report { predictions, out, common } => {
            let (cfg, base) = common.load()?;
            let text = fs::read_to_string(&predictions).map_err(|e| Error::Io { path: predictions.clone(), source: e })?;
            let preds: Predictions = serde_json::from_str(&text).map_err(|e| Error::Parse {
                context: format!("{}:{}:{}", predictions.display(), e.line(), e.column()),
                message: e.to_string(),
            })?;
            let templates = FeedbackTemplates::from_config(&cfg.report, &base)?;
            let report = render_report(&preds, &cfg.report.bands, &templates)?;
            let rendered = report.to_text();
            write(&out.join("report.txt"), &rendered)?;
            write(&out.join("report.json"), &(report.to_json()? + "\n"))?;
            print!("{rendered}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
