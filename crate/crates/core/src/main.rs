//! `spdiq` command-line tool.

mod cli;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use spdiq::harness::CalibrationMode;
use spdiq::simulator::{PipelineKind, SceneKind, Stage};
use spdiq::spectral::TargetKind;

#[derive(Debug, Parser)]
#[command(
    name = "spdiq",
    version,
    about = "Scene-dependent camera system measurement and image quality metrics"
)]
pub struct Cli {
    /// Run configuration (TOML). Defaults apply to anything left out.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Root seed; overrides the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory [default: out, or <manifest dir>/replay for replay].
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Calibration grouping; overrides the configuration.
    #[arg(long, global = true, value_parser = parse_calibration)]
    pub calibration: Option<CalibrationMode>,
    #[command(subcommand)]
    pub command: Command,
}

fn parse_calibration(s: &str) -> Result<CalibrationMode, String> {
    s.parse().map_err(|e: spdiq::harness::HarnessError| e.to_string())
}

fn parse_pipeline(s: &str) -> Result<PipelineKind, String> {
    s.parse().map_err(|e: spdiq::simulator::SimulatorError| e.to_string())
}

fn parse_stage(s: &str) -> Result<Stage, String> {
    s.parse().map_err(|e: spdiq::simulator::SimulatorError| e.to_string())
}

fn parse_scene_kind(s: &str) -> Result<SceneKind, String> {
    s.parse().map_err(|e: spdiq::simulator::SimulatorError| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn ext(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetArg {
    DeadLeaves,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputKind {
    Pictorial,
    DeadLeaves,
    Uniform,
}

impl From<InputKind> for TargetKind {
    fn from(k: InputKind) -> Self {
        match k {
            InputKind::Pictorial => TargetKind::Pictorial,
            InputKind::DeadLeaves => TargetKind::DeadLeaves,
            InputKind::Uniform => TargetKind::Uniform,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EncodingArg {
    Srgb,
    Linear,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Write a dead-leaves or uniform test target.
    MakeTarget(MakeTargetArgs),
    /// Run a scene through a pipeline and write per-stage replicates.
    Simulate(SimulateArgs),
    /// Measure NPS, MTF and NEQ curves from replicates.
    Measure(MeasureArgs),
    /// Score measured curves with every configured metric.
    Score(ScoreArgs),
    /// Calibrate raw score rows on the reference condition.
    Calibrate(CalibrateArgs),
    /// Simulate, measure, score and calibrate every variant.
    Sweep(SweepArgs),
    /// Compare scores with ratings.
    Bench(BenchArgs),
    /// Re-run a command from its manifest and check the outputs match.
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::MakeTarget(_) => "make-target",
            Self::Simulate(_) => "simulate",
            Self::Measure(_) => "measure",
            Self::Score(_) => "score",
            Self::Calibrate(_) => "calibrate",
            Self::Sweep(_) => "sweep",
            Self::Bench(_) => "bench",
            Self::Replay(_) => "replay",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct MakeTargetArgs {
    #[arg(value_enum)]
    pub kind: TargetArg,
    /// Side length in pixels [default: sweep size].
    #[arg(long)]
    pub size: Option<usize>,
    /// Uniform patch level [default: sweep uniform level].
    #[arg(long)]
    pub level: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    /// Scene file (.sqmraw, PNG or TIFF).
    #[arg(long, conflicts_with = "scene_kind", required_unless_present = "scene_kind")]
    pub input: Option<PathBuf>,
    /// What the input file shows.
    #[arg(long, value_enum, default_value_t = InputKind::Pictorial)]
    pub input_kind: InputKind,
    /// Transfer function of PNG/TIFF input.
    #[arg(long, value_enum, default_value_t = EncodingArg::Srgb)]
    pub encoding: EncodingArg,
    /// Generate a synthetic scene of this kind instead of reading a file.
    #[arg(long, value_parser = parse_scene_kind)]
    pub scene_kind: Option<SceneKind>,
    /// Scene label used in ids and seeds [default: file stem or kind].
    #[arg(long)]
    pub scene_id: Option<String>,
    #[arg(long, value_parser = parse_pipeline, default_value = "linear")]
    pub pipeline: PipelineKind,
    /// SNR at saturation [default: configured pipeline SNR].
    #[arg(long)]
    pub snr: Option<f64>,
    /// Replicates per stage [default: sweep replicates].
    #[arg(long)]
    pub replicates: Option<usize>,
    /// Synthetic scene side length [default: sweep size].
    #[arg(long)]
    pub size: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct MeasureArgs {
    /// Output directory of `simulate`.
    #[arg(long)]
    pub replicates: PathBuf,
    #[arg(long, value_parser = parse_stage, default_value = "post-sharpen")]
    pub stage: Stage,
    /// `simulate` output of a uniform patch; its NPS replaces the replicates' own NPS in the MTF.
    #[arg(long)]
    pub noise: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ScoreArgs {
    /// Output directory of `measure`.
    #[arg(long)]
    pub curves: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CalibrateArgs {
    /// Score rows as written by `sweep`.
    #[arg(long)]
    pub scores: PathBuf,
    /// Ratings; the reference images' mean rating becomes the target.
    #[arg(long)]
    pub ratings: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SweepArgs {
    #[arg(long, conflicts_with = "synthetic_ratings")]
    pub ratings: Option<PathBuf>,
    /// Generate ratings from the configured synthetic model and benchmark against them.
    #[arg(long)]
    pub synthetic_ratings: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BenchArgs {
    #[arg(long)]
    pub scores: PathBuf,
    #[arg(long)]
    pub ratings: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    match cli::run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
