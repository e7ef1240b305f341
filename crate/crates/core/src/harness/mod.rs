//! Benchmark statistics, ratings, run configuration, the variant sweep and
//! run manifests.

mod config;
mod manifest;
pub mod measure;
mod ratings;
mod score;
mod stats;
mod sweep;

use thiserror::Error;

pub use config::{CalibrationConfig, CalibrationMode, MetricSettings, RunConfig, SweepConfig, VariantAxes};
pub use manifest::{sha256_file, FileDigest, Manifest, MANIFEST_FILE};
pub use ratings::{synthetic_ratings, ImageKey, RatingRow, RatingsTable, SyntheticRatings};
pub use score::{
    benchmark, calibrate_rows, enumerate_variants, read_scores_csv, score_condition, score_curves, score_scene,
    write_scores_csv, BenchmarkReport, CalibrationRow, MeasuredCurves, ReportEntry, ScoreRow, SkippedVariant,
};
pub use stats::{average_ranks, mae, rmse, srocc};
pub use sweep::{measure_all, run_variant_sweep, score_all, SweepResult};

use crate::imgcore::ImageError;
use crate::metrics::MetricsError;
use crate::simulator::SimulatorError;
use crate::spectral::SpectralError;
use crate::sysperf::SysperfError;
use crate::vision::VisionError;

/// Process exit codes of the command-line tool.
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("numerical fault: {0}")]
    Numerical(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Sysperf(#[from] SysperfError),
    #[error(transparent)]
    Vision(#[from] VisionError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Simulator(#[from] SimulatorError),
}

fn image_code(e: &ImageError) -> i32 {
    match e {
        ImageError::Window(_) => EXIT_CONFIG,
        _ => EXIT_DATA,
    }
}

fn spectral_code(e: &SpectralError) -> i32 {
    match e {
        SpectralError::Image(i) => image_code(i),
        SpectralError::Config(_) | SpectralError::Usage(_) => EXIT_CONFIG,
        SpectralError::Degenerate(_) => EXIT_NUMERICAL,
        SpectralError::Shape(_) | SpectralError::Parse(_) | SpectralError::Csv(_) | SpectralError::Io(_) => EXIT_DATA,
    }
}

fn sysperf_code(e: &SysperfError) -> i32 {
    match e {
        SysperfError::Spectral(s) => spectral_code(s),
        SysperfError::Degenerate(_) | SysperfError::Domain(_) => EXIT_NUMERICAL,
        SysperfError::Shape(_) => EXIT_DATA,
        SysperfError::Usage(_) => EXIT_CONFIG,
    }
}

fn vision_code(e: &VisionError) -> i32 {
    match e {
        VisionError::Config(_) => EXIT_CONFIG,
        VisionError::Domain(_) => EXIT_NUMERICAL,
        VisionError::Shape(_) => EXIT_DATA,
    }
}

impl HarnessError {
    /// 2 for configuration, 3 for data and 4 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => EXIT_CONFIG,
            Self::Data(_) | Self::Io(_) | Self::Csv(_) | Self::Json(_) => EXIT_DATA,
            Self::Numerical(_) => EXIT_NUMERICAL,
            Self::Image(e) => image_code(e),
            Self::Spectral(e) => spectral_code(e),
            Self::Sysperf(e) => sysperf_code(e),
            Self::Vision(e) => vision_code(e),
            Self::Metrics(e) => match e {
                MetricsError::Spectral(s) => spectral_code(s),
                MetricsError::Sysperf(s) => sysperf_code(s),
                MetricsError::Vision(v) => vision_code(v),
                MetricsError::Domain(_) | MetricsError::Calibration(_) => EXIT_NUMERICAL,
                MetricsError::Shape(_) => EXIT_DATA,
                MetricsError::Usage(_) => EXIT_CONFIG,
            },
            Self::Simulator(e) => match e {
                SimulatorError::Image(i) => image_code(i),
                SimulatorError::Spectral(s) => spectral_code(s),
                SimulatorError::Config(_) => EXIT_CONFIG,
                SimulatorError::Input(_) => EXIT_DATA,
                SimulatorError::Generation(_) | SimulatorError::Fault { .. } => EXIT_NUMERICAL,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(HarnessError::Config("x".into()).exit_code(), 2);
        assert_eq!(HarnessError::Data("x".into()).exit_code(), 3);
        assert_eq!(HarnessError::Numerical("x".into()).exit_code(), 4);
        let fault = SimulatorError::Fault {
            stage: "denoise",
            detail: "NaN".into(),
        };
        assert_eq!(HarnessError::from(fault).exit_code(), 4);
        assert_eq!(HarnessError::from(SimulatorError::Config("x".into())).exit_code(), 2);
        let nested = MetricsError::Sysperf(SysperfError::Spectral(SpectralError::Parse("x".into())));
        assert_eq!(HarnessError::from(nested).exit_code(), 3);
        assert_eq!(
            HarnessError::from(MetricsError::Calibration("k1".into())).exit_code(),
            4
        );
    }
}
