use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use scene_cli::commands::{
    cmd_convert, cmd_eval, cmd_predict, cmd_split, cmd_train, EvalArgs, TrainArgs,
};
use scene_cli::{CliError, PipelineConfig};
use scene_core::dataset::SplitPart;
use scene_core::eval::ReportFormat;

#[derive(Parser)]
#[command(
    name = "ascene",
    version,
    about = "Acoustic scene classification pipeline"
)]
struct Cli {
    /// Pipeline configuration file (TOML sections of key = value pairs).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every random choice; required by `split` and `train`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Log at debug level.
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum Part {
    Train,
    Val,
    Test,
}

#[derive(Subcommand)]
enum Command {
    /// Render every WAV under IN_DIR to a PGM spectrogram plus sidecar.
    Convert {
        in_dir: PathBuf,
        out_dir: PathBuf,
        /// Worker threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Split a manifest into train/val/test and write the split file.
    Split { manifest: PathBuf, out: PathBuf },
    /// Train a classifier and write the best checkpoint.
    Train {
        split_file: PathBuf,
        checkpoint: PathBuf,
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        max_epochs: Option<usize>,
        #[arg(long)]
        patience: Option<usize>,
        #[arg(long)]
        learning_rate: Option<f64>,
        #[arg(long)]
        batch_size: Option<usize>,
        /// Continue from an earlier checkpoint.
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Evaluate a checkpoint on one part of a split.
    Eval {
        checkpoint: PathBuf,
        split_file: PathBuf,
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        /// Also write per-sample class probabilities to this CSV file.
        #[arg(long)]
        probabilities: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Part::Test)]
        part: Part,
    },
    /// Print class probabilities for one WAV or PGM file.
    Predict { checkpoint: PathBuf, input: PathBuf },
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let cfg = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    let mut stdout = std::io::stdout().lock();
    let out_err = |e| CliError::Io {
        path: "<stdout>".into(),
        source: e,
    };
    match cli.command {
        Command::Convert {
            in_dir,
            out_dir,
            jobs,
        } => {
            let summary = cmd_convert(&cfg, &in_dir, &out_dir, jobs)?;
            writeln!(
                stdout,
                "converted={} failed={}",
                summary.converted,
                summary.failed.len()
            )
            .map_err(out_err)?;
            for (path, reason) in &summary.failed {
                writeln!(stdout, "failed {}: {reason}", path.display()).map_err(out_err)?;
            }
            if !summary.is_success() {
                return Err(CliError::ConvertFailures {
                    failed: summary.failed.len(),
                    total: summary.converted + summary.failed.len(),
                });
            }
        }
        Command::Split { manifest, out } => {
            let seed = cli.seed.ok_or(CliError::MissingSeed("split"))?;
            cmd_split(&cfg, &manifest, &out, seed, &mut stdout)?;
        }
        Command::Train {
            split_file,
            checkpoint,
            manifest,
            max_epochs,
            patience,
            learning_rate,
            batch_size,
            resume,
        } => {
            let seed = cli.seed.ok_or(CliError::MissingSeed("train"))?;
            let args = TrainArgs {
                manifest,
                split_file,
                checkpoint,
                seed,
                max_epochs,
                patience,
                learning_rate,
                batch_size,
                resume,
            };
            let summary = cmd_train(&cfg, &args, &mut std::io::stderr())?;
            stdout
                .write_all(summary.report_lines().as_bytes())
                .map_err(out_err)?;
        }
        Command::Eval {
            checkpoint,
            split_file,
            manifest,
            format,
            probabilities,
            part,
        } => {
            let args = EvalArgs {
                checkpoint,
                split_file,
                manifest,
                format: match format {
                    Format::Json => ReportFormat::Json,
                    Format::Csv => ReportFormat::Csv,
                    Format::Table => ReportFormat::Table,
                },
                probabilities,
                part: match part {
                    Part::Train => SplitPart::Train,
                    Part::Val => SplitPart::Validation,
                    Part::Test => SplitPart::Test,
                },
            };
            cmd_eval(&cfg, &args, &mut stdout)?;
        }
        Command::Predict { checkpoint, input } => {
            cmd_predict(&cfg, &checkpoint, &input, &mut stdout)?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "debug" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    std::panic::set_hook(Box::new(|info| {
        eprintln!("internal error: {info}");
    }));
    let code = match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(code)) => code,
        Ok(Err(e)) => {
            log::error!("{e}");
            e.exit_code()
        }
        Err(_) => 2,
    };
    ExitCode::from(code as u8)
}
