//! Image quality metrics: PIC, SQRIn, the acutance/visual-noise combination,
//! log NEQ and visual log NEQ, plus their calibration.

mod cpiq;
mod displayed;
mod info;
mod logneq;
mod quadrature;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cpiq::{
    acutance, cpiq_score, lightness, minkowski_combine, minkowski_exponent, texture_loss, visual_noise_omega,
    JndMapping, OmegaConfig, QualityLoss, CSF_INTEGRATION_LIMIT, MINKOWSKI_C1, MINKOWSKI_C2, REFERENCE_QUALITY,
};
pub use displayed::{displayed_spectra, DisplaySignalReading, DisplayedSpectra};
pub use info::{pic, sqrin};
pub use logneq::{log_neq, visual_log_neq};
pub use quadrature::integrate_log;

use crate::spectral::{NpsVariant, SpectralError};
use crate::sysperf::{MtfVariant, SysperfError};
use crate::vision::{CsfKind, VisionError};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Sysperf(#[from] SysperfError),
    #[error(transparent)]
    Vision(#[from] VisionError),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("calibration error: {0}")]
    Calibration(String),
    #[error("usage error: {0}")]
    Usage(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    Pic,
    Sqrin,
    Cpiq,
    LogNeq,
    VisualLogNeq,
}

impl MetricKind {
    pub const ALL: [MetricKind; 5] = [Self::Pic, Self::Sqrin, Self::Cpiq, Self::LogNeq, Self::VisualLogNeq];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Pic => "pic",
            Self::Sqrin => "sqrin",
            Self::Cpiq => "cpiq",
            Self::LogNeq => "log-neq",
            Self::VisualLogNeq => "visual-log-neq",
        }
    }

    /// Whether the metric weights by a CSF (log NEQ does not).
    pub fn uses_csf(&self) -> bool {
        !matches!(self, Self::LogNeq)
    }

    /// Whether `k1` is fitted to ratings; the CPIQ-style score is absolute.
    pub fn is_calibrated(&self) -> bool {
        !matches!(self, Self::Cpiq)
    }
}

impl std::fmt::Display for MetricKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for MetricKind {
    type Err = MetricsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| MetricsError::Usage(format!("unknown metric {s:?}")))
    }
}

/// `score = k1 * raw + k2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricCalibration {
    pub k1: f64,
    pub k2: f64,
}

impl MetricCalibration {
    pub fn identity() -> Self {
        Self { k1: 1.0, k2: 0.0 }
    }

    pub fn apply(&self, raw: f64) -> f64 {
        self.k1 * raw + self.k2
    }
}

impl Default for MetricCalibration {
    fn default() -> Self {
        Self::identity()
    }
}

/// Fits `k1` so the mean calibrated reference score equals `target_mean`, with `k2 = 0`.
pub fn calibrate_k1(raw_scores: &[f64], target_mean: f64) -> Result<MetricCalibration, MetricsError> {
    if raw_scores.is_empty() {
        return Err(MetricsError::Calibration("no reference scores".into()));
    }
    let mean = raw_scores.iter().sum::<f64>() / raw_scores.len() as f64;
    if mean == 0.0 || !mean.is_finite() {
        return Err(MetricsError::Calibration(format!("reference mean is {mean}")));
    }
    let k1 = target_mean / mean;
    if !(k1 > 0.0) || !k1.is_finite() {
        return Err(MetricsError::Calibration(format!(
            "k1 = {k1} is not positive (target {target_mean}, raw mean {mean})"
        )));
    }
    Ok(MetricCalibration { k1, k2: 0.0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricScore {
    pub metric: MetricKind,
    /// Score with `k1 = 1`, `k2 = 0`.
    pub raw: f64,
    pub value: f64,
    /// Lower integration limit in cycles/degree, for integral metrics.
    pub u1: Option<f64>,
    pub calibration: MetricCalibration,
}

impl MetricScore {
    pub fn new(metric: MetricKind, raw: f64, u1: Option<f64>, calibration: MetricCalibration) -> Self {
        Self {
            metric,
            raw,
            value: calibration.apply(raw),
            u1,
            calibration,
        }
    }

    pub fn recalibrated(&self, calibration: MetricCalibration) -> Self {
        Self::new(self.metric, self.raw, self.u1, calibration)
    }
}

/// The measurement choices a score was computed with.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VariantDescriptor {
    pub metric: MetricKind,
    pub nps: NpsVariant,
    pub mtf: MtfVariant,
    pub csf: Option<CsfKind>,
}

impl VariantDescriptor {
    pub fn csf_label(&self) -> &'static str {
        self.csf.map_or("none", |c| c.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn calibration_cases() {
        assert_eq!(calibrate_k1(&[10.0, 30.0], 20.0).unwrap().k1, 1.0);
        assert_eq!(calibrate_k1(&[40.0, 40.0], 20.0).unwrap().k1, 0.5);
        assert!(calibrate_k1(&[1.0, -1.0], 20.0).is_err());
        assert!(calibrate_k1(&[], 20.0).is_err());
        assert!(calibrate_k1(&[-3.0], 20.0).is_err());
    }

    #[test]
    fn calibrated_mean_hits_target() {
        let raw = [1.7, 2.9, 3.3, 0.4, 5.123];
        let cal = calibrate_k1(&raw, 17.25).unwrap();
        let mean = raw.iter().map(|r| cal.apply(*r)).sum::<f64>() / raw.len() as f64;
        assert!((mean - 17.25).abs() < 1e-9);
    }

    #[test]
    fn metric_names_round_trip() {
        for m in MetricKind::ALL {
            assert_eq!(m.as_str().parse::<MetricKind>().unwrap(), m);
        }
    }
}
