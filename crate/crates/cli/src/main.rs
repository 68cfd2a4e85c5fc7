//! `depthfall` — command-line surface for the fall-detection pipeline.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/processing error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use depthfall::detector::{Backend, Mode};
use depthfall::Config;

#[derive(Parser)]
#[command(
    name = "depthfall",
    version,
    about = "Fall detection from depth-map sequences fused with accelerometer data"
)]
struct Cli {
    /// Default log filter (the RUST_LOG environment variable overrides it).
    #[arg(long, global = true, default_value = "warn")]
    log_level: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Frontal,
    Overhead,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Frontal => Mode::Frontal,
            ModeArg::Overhead => Mode::Overhead,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Threshold,
    Knn,
    Svm,
    Fuzzy,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Backend {
        match b {
            BackendArg::Threshold => Backend::Threshold,
            BackendArg::Knn => Backend::Knn,
            BackendArg::Svm => Backend::Svm,
            BackendArg::Fuzzy => Backend::Fuzzy,
        }
    }
}

/// Config layering shared by all commands: built-in defaults < `--config`
/// file < `--set` overrides; `--seed` then pins every RNG seed.
#[derive(Args)]
struct ConfigArgs {
    /// Layered key/value config file.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Override one config key (repeatable), e.g. --set accel.uft_g=3.0
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    /// Override all RNG seeds (floor.seed, track.seed, classify.seed).
    #[arg(long)]
    seed: Option<u64>,
}

impl ConfigArgs {
    fn build(&self) -> Result<Config, CliError> {
        let mut cfg = Config::default();
        if let Some(path) = &self.config {
            cfg.layer_file(path).map_err(CliError::Data)?;
        }
        for pair in &self.overrides {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got {pair:?}")))?;
            cfg.set(key.trim(), value.trim());
        }
        if let Some(seed) = self.seed {
            let s = seed.to_string();
            cfg.set("floor.seed", &s);
            cfg.set("track.seed", &s);
            cfg.set("classify.seed", &s);
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run fall detection on one sequence directory.
    Detect {
        /// Sequence directory (depth/ PNGs + optional accel.csv, sync.csv).
        seq_dir: PathBuf,
        #[arg(long, value_enum, default_value = "frontal")]
        mode: ModeArg,
        #[arg(long, value_enum, default_value = "fuzzy")]
        backend: BackendArg,
        /// Trained model file (required for knn/svm backends).
        #[arg(long, value_name = "FILE")]
        model: Option<PathBuf>,
        /// Write a per-frame trace CSV (features, score, decision).
        #[arg(long, value_name = "CSV")]
        trace: Option<PathBuf>,
        /// Ground-truth label (0/1) appended as a trace column for `roc`.
        #[arg(long)]
        label: Option<u8>,
        /// Classify every frame instead of gating on accelerometer triggers.
        #[arg(long)]
        image_only: bool,
        #[command(flatten)]
        cfg: ConfigArgs,
    },

    /// Evaluate labeled sequences under a dataset root.
    Eval {
        /// Directory whose labeled subdirectories are sequence directories.
        dataset_root: PathBuf,
        /// CSV with `name,label` rows (label 1 = fall).
        #[arg(long, value_name = "CSV")]
        labels: PathBuf,
        #[arg(long, value_enum, default_value = "frontal")]
        mode: ModeArg,
        #[arg(long, value_enum, default_value = "fuzzy")]
        backend: BackendArg,
        #[arg(long, value_name = "FILE")]
        model: Option<PathBuf>,
        /// Per-sequence machine-readable report CSV.
        #[arg(long, value_name = "CSV")]
        report: Option<PathBuf>,
        #[command(flatten)]
        cfg: ConfigArgs,
    },

    /// Train a k-nearest-neighbours model from a labeled feature CSV.
    TrainKnn {
        /// CSV with a `label` column followed by feature columns.
        features_csv: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },

    /// Train a linear SVM model from a labeled feature CSV.
    TrainSvm {
        /// CSV with a `label` column followed by feature columns.
        features_csv: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },

    /// Fit fuzzy membership-function terms to feature data (fuzzy c-means).
    FitMf {
        /// CSV with numeric feature columns (label/index columns are skipped).
        features_csv: PathBuf,
        /// Terms per variable; only the Lo/Me/Hi triple (3) is supported.
        #[arg(long, default_value = "3")]
        terms: usize,
        /// Output config fragment with the fitted `mf.fit.*` keys.
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },

    /// Estimate the floor plane of a sequence and print it.
    Floor {
        seq_dir: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },

    /// Build the background depth model of a sequence and save it as PNG.
    Bg {
        seq_dir: PathBuf,
        #[arg(long, value_name = "PNG")]
        out: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },

    /// Extract per-frame features from a sequence into a CSV.
    Features {
        seq_dir: PathBuf,
        #[arg(long, value_name = "CSV")]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "frontal")]
        mode: ModeArg,
        /// Ground-truth label (0/1) appended as a column.
        #[arg(long)]
        label: Option<u8>,
        #[command(flatten)]
        cfg: ConfigArgs,
    },

    /// Pool labeled trace CSVs into an ROC curve CSV.
    Roc {
        /// Trace CSVs written by `detect --trace --label`.
        #[arg(required = true)]
        traces: Vec<PathBuf>,
        #[arg(long, value_name = "CSV")]
        out: PathBuf,
    },

    /// Generate a synthetic test sequence directory.
    Synth {
        out_dir: PathBuf,
        /// fall | lie-down | sit | sit-energetic | squat | bend | walk
        #[arg(long, default_value = "fall")]
        scenario: String,
        #[arg(long, default_value = "1")]
        seed: u64,
        /// Render from the overhead (ceiling) camera instead of frontal.
        #[arg(long)]
        overhead: bool,
        /// Omit the accelerometer trace.
        #[arg(long)]
        no_accel: bool,
    },
}

/// CLI failure split by exit code: usage errors (1) versus data errors (2).
pub enum CliError {
    Usage(String),
    Data(depthfall::Error),
}

impl From<depthfall::Error> for CliError {
    fn from(e: depthfall::Error) -> Self {
        CliError::Data(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(depthfall::Error::Io(e))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Data(depthfall::Error::Csv(e))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(&cli.log_level))
        .init();

    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
