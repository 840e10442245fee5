mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tracing_subscriber::EnvFilter;

/// Train placement preferences and run simulated tidy-up episodes.
#[derive(Debug, Parser)]
#[command(name = "tidy", version)]
pub struct Cli {
    /// Seed for training initialisation, holdout splits and episode
    /// randomness (overrides the scenario's own seed).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file. Defaults to stdout where that makes sense.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Log filter, e.g. `warn`, `debug` or `tidy_core=trace`.
    #[arg(long, global = true, default_value = "warn")]
    pub log_level: String,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a factor model to a ratings corpus and write the model file.
    Train(TrainArgs),
    /// Run one episode and write its JSONL log.
    Run(RunArgs),
    /// Report whether an object's current placement is in the user's top k.
    Check(CheckArgs),
    /// Plan a path on a map.
    Plan(PlanArgs),
    /// Render a map with a trajectory overlay (text, or PPM for `.ppm` output).
    Render(RenderArgs),
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Ratings corpus (CSV).
    #[arg(long)]
    pub corpus: PathBuf,
    /// Fraction of ratings held out for evaluation.
    #[arg(long)]
    pub holdout: Option<f64>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub init_scale: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    /// Model file, or a `.csv` corpus to train on first.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub user: Option<String>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub max_ticks: Option<u64>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub user: String,
    #[arg(long)]
    pub object: String,
    #[arg(long)]
    pub room: String,
    #[arg(long)]
    pub receptacle: String,
    #[arg(long, default_value_t = tidy_core::preference::DEFAULT_TOP_K)]
    pub k: usize,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[arg(long)]
    pub map: PathBuf,
    /// Start cell as `X,Y`.
    #[arg(long)]
    pub from: String,
    /// Goal cell as `X,Y`.
    #[arg(long)]
    pub to: String,
    /// Head straight for the goal and stop before the first obstacle.
    #[arg(long)]
    pub carrot: bool,
    /// Obstacle inflation radius in cells.
    #[arg(long, default_value_t = 0)]
    pub inflate: u32,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Scenario to run; its trajectory is drawn unless `--log` is given.
    #[arg(long, required_unless_present = "log")]
    pub scenario: Option<PathBuf>,
    /// Episode log whose trajectory to draw.
    #[arg(long)]
    pub log: Option<PathBuf>,
    /// Map to draw on; defaults to the scenario's map.
    #[arg(long)]
    pub map: Option<PathBuf>,
    /// Pixels per cell for PPM output.
    #[arg(long, default_value_t = 8)]
    pub scale: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let filter = match EnvFilter::try_new(&cli.log_level) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: invalid --log-level {:?}: {e}", cli.log_level);
            return ExitCode::from(1);
        }
    };
    tracing_subscriber::fmt()
        .with_env_filter(filter)
        .with_writer(std::io::stderr)
        .init();

    match commands::dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
