use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use immigrate::boosting::BimConfig;
use immigrate::dataset::{
    generate_synthetic, load_csv, load_feature_rows, standardize, write_predictions, LabelColumn,
};
use immigrate::eval::{cross_validate, export_heatmap, paired_t_test, CvReport};
use immigrate::immigrate::Hyperparameters;
use immigrate::learner::LearnerSpec;
use immigrate::persist::SavedModel;
use immigrate::{Error, Result};

#[derive(Parser)]
#[command(name = "immigrate", version, about = "Margin-based feature weighting with interactions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for cross-validation (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a model on a CSV and save it as JSON.
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        learner: LearnerArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Predict labels for a CSV with a saved model.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Repeated stratified k-fold cross-validation.
    Cv {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        learner: LearnerArgs,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long, default_value_t = 10)]
        repeats: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the two-feature synthetic interaction data set.
    Synth {
        /// Instances per class.
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 0.1)]
        noise: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value = "class")]
        label: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Paired t-test of two cross-validation reports (A against B).
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export a saved model's weight matrix as a CSV heat map.
    Heatmap {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct DataArgs {
    #[arg(long)]
    data: PathBuf,
    /// Label column name, or its 0-based index.
    #[arg(long, default_value = "class")]
    label: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum LearnerKind {
    Relief,
    Immigrate,
    Bim,
    Im4eImmigrate,
    B4g,
}

#[derive(Args)]
struct LearnerArgs {
    #[arg(long, value_enum, default_value = "immigrate")]
    learner: LearnerKind,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Prune small entries of W after training.
    #[arg(long)]
    prune: bool,
    /// Choose σ and pruning by inner cross-validation.
    #[arg(long)]
    tune: bool,
    /// Boosting rounds.
    #[arg(long = "T", default_value_t = 100)]
    rounds: usize,
    #[arg(long, default_value_t = 4.0)]
    sigma_max: f64,
    #[arg(long, default_value_t = 0.2)]
    sigma_min: f64,
    /// Pre-screening threshold (default 2/A).
    #[arg(long)]
    screen_threshold: Option<f64>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

impl LearnerArgs {
    fn spec(&self) -> LearnerSpec {
        let hp = Hyperparameters {
            sigma: self.sigma,
            prune_enabled: self.prune,
            seed: self.seed,
            ..Hyperparameters::default()
        };
        let bim = BimConfig {
            rounds: self.rounds,
            sigma_max: self.sigma_max,
            sigma_min: self.sigma_min,
            seed: self.seed,
            ..BimConfig::default()
        };
        match self.learner {
            LearnerKind::Relief => LearnerSpec::Relief,
            LearnerKind::Immigrate => LearnerSpec::Immigrate { hp, tune: self.tune },
            LearnerKind::Bim => LearnerSpec::Bim(bim),
            LearnerKind::Im4eImmigrate => LearnerSpec::Im4eImmigrate {
                hp,
                screen_threshold: self.screen_threshold,
                tune: self.tune,
            },
            LearnerKind::B4g => LearnerSpec::B4g {
                bim,
                screen_threshold: self.screen_threshold,
            },
        }
    }
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_report(path: &Path) -> Result<CvReport> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train { data, learner, out } => {
            let raw = load_csv(&data.data, &LabelColumn::from(data.label.as_str()))?;
            let (train, params) = standardize(&raw);
            let model = learner.spec().fit(&train, learner.seed)?;
            let accuracy = model.accuracy(&train)?;
            SavedModel::new(model, params, &raw).save(&out)?;
            println!("training accuracy: {accuracy:.4}");
        }
        Command::Predict { model, data, out } => {
            let saved = SavedModel::load(&model)?;
            let rows = load_feature_rows(&data, &saved.input_features)?;
            let predictions = rows
                .iter()
                .map(|r| saved.predict_raw(r).map(|c| saved.class_names[c].clone()))
                .collect::<Result<Vec<_>>>()?;
            write_predictions(&out, &predictions)?;
            println!("wrote {} predictions", predictions.len());
        }
        Command::Cv {
            data,
            learner,
            k,
            repeats,
            out,
        } => {
            let raw = load_csv(&data.data, &LabelColumn::from(data.label.as_str()))?;
            let report = cross_validate(&raw, &learner.spec(), k, repeats, learner.seed)?;
            write_json(&out, &report)?;
            println!(
                "{} trials: mean accuracy {:.4} (sd {:.4})",
                report.per_trial_accuracies.len(),
                report.mean,
                report.std
            );
        }
        Command::Synth {
            n,
            noise,
            seed,
            label,
            out,
        } => {
            let d = generate_synthetic(n, noise, seed)?;
            d.write_csv(&out, &label)?;
            println!("wrote {} rows", d.n_samples());
        }
        Command::Compare { a, b, out } => {
            let (ra, rb) = (read_report(&a)?, read_report(&b)?);
            let verdict = paired_t_test(&ra.per_trial_accuracies, &rb.per_trial_accuracies)?;
            let outcome = serde_json::to_value(verdict.outcome)?;
            println!(
                "{} (p_equal {:.6}, p_one_sided {:.6})",
                outcome.as_str().unwrap_or_default(),
                verdict.p_equal,
                verdict.p_one_sided
            );
            if let Some(path) = out {
                write_json(&path, &verdict)?;
            }
        }
        Command::Heatmap { model, out } => {
            let saved = SavedModel::load(&model)?;
            let w = saved.model.weight_matrix()?;
            let names: Vec<String> = match &saved.model {
                immigrate::learner::TrainedModel::Screened(s) => s
                    .screen
                    .kept_features
                    .iter()
                    .map(|&c| saved.input_features[c].clone())
                    .collect(),
                _ => saved.input_features.clone(),
            };
            export_heatmap(w, &names, &out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
