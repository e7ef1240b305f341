//! Run configuration, read from TOML.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{HarnessError, SyntheticRatings};
use crate::metrics::{DisplaySignalReading, JndMapping, MetricKind, OmegaConfig};
use crate::simulator::{DeadLeavesParams, PipelineConfig, PipelineKind, Stage};
use crate::spectral::{NpsConfig, NpsVariant};
use crate::sysperf::MtfVariant;
use crate::vision::{CsfKind, ViewingEnvironment, DEFAULT_NPS_VISUAL};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CalibrationMode {
    /// One `k1` per variant from the reference images of all pipelines.
    #[default]
    Pooled,
    /// One `k1` per variant and pipeline.
    PerPipeline,
}

impl std::str::FromStr for CalibrationMode {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pooled" => Ok(Self::Pooled),
            "per-pipeline" => Ok(Self::PerPipeline),
            _ => Err(HarnessError::Config(format!("unknown calibration mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CalibrationConfig {
    pub mode: CalibrationMode,
    /// Mean rating the reference images are fitted to when no ratings are given.
    pub target_mean: f64,
    pub reference_snr: f64,
    pub reference_stage: Stage,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            mode: CalibrationMode::Pooled,
            target_mean: 23.0,
            reference_snr: 80.0,
            reference_stage: Stage::PreDenoise,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MetricSettings {
    pub nps_visual: f64,
    pub reading: DisplaySignalReading,
    pub texture_mapping: JndMapping,
    /// Largest quality loss for the Minkowski exponent; `None` uses the larger loss.
    pub ql_max: Option<f64>,
    pub omega: OmegaConfig,
}

impl Default for MetricSettings {
    fn default() -> Self {
        Self {
            nps_visual: DEFAULT_NPS_VISUAL,
            reading: DisplaySignalReading::default(),
            texture_mapping: JndMapping::default(),
            ql_max: None,
            omega: OmegaConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VariantAxes {
    pub metrics: Vec<MetricKind>,
    pub nps: Vec<NpsVariant>,
    pub mtf: Vec<MtfVariant>,
    pub csf: Vec<CsfKind>,
}

impl Default for VariantAxes {
    fn default() -> Self {
        Self {
            metrics: MetricKind::ALL.to_vec(),
            nps: NpsVariant::ALL.to_vec(),
            mtf: MtfVariant::MEASURED.to_vec(),
            csf: CsfKind::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub scenes: usize,
    pub size: usize,
    pub snrs: Vec<f64>,
    pub pipelines: Vec<PipelineKind>,
    pub stages: Vec<Stage>,
    pub replicates: usize,
    /// Level of the uniform patch used for the uniform-patch NPS.
    pub uniform_level: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            scenes: 6,
            size: 256,
            snrs: vec![10.0, 20.0, 40.0, 80.0],
            pipelines: PipelineKind::ALL.to_vec(),
            stages: Stage::ALL.to_vec(),
            replicates: 10,
            uniform_level: 0.3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub seed: u64,
    pub viewing: ViewingEnvironment,
    /// Base pipeline settings; the sweep overrides kind, SNR and seed.
    pub pipeline: PipelineConfig,
    pub measurement: NpsConfig,
    pub metrics: MetricSettings,
    pub variants: VariantAxes,
    pub sweep: SweepConfig,
    pub dead_leaves: DeadLeavesParams,
    pub calibration: CalibrationConfig,
    pub ratings: SyntheticRatings,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            viewing: ViewingEnvironment::default(),
            pipeline: PipelineConfig::default(),
            measurement: NpsConfig::default(),
            metrics: MetricSettings::default(),
            variants: VariantAxes::default(),
            sweep: SweepConfig::default(),
            dead_leaves: DeadLeavesParams::default(),
            calibration: CalibrationConfig::default(),
            ratings: SyntheticRatings::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self, HarnessError> {
        let cfg: Self = toml::from_str(s).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String, HarnessError> {
        toml::to_string(self).map_err(|e| HarnessError::Config(e.to_string()))
    }

    /// SHA-256 of the canonical TOML serialization, hex encoded.
    pub fn hash(&self) -> Result<String, HarnessError> {
        Ok(hex::encode(Sha256::digest(self.to_toml_string()?.as_bytes())))
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        self.viewing.validate()?;
        self.pipeline.validate()?;
        let s = &self.sweep;
        if s.replicates < 2 {
            return Err(HarnessError::Config(format!(
                "need at least 2 replicates, got {}",
                s.replicates
            )));
        }
        if s.size < 32 {
            return Err(HarnessError::Config(format!("sweep image size {} is below 32", s.size)));
        }
        if s.snrs.is_empty() || s.snrs.iter().any(|v| !(*v > 0.0)) {
            return Err(HarnessError::Config("sweep SNRs must be positive and non-empty".into()));
        }
        if s.pipelines.is_empty() || s.stages.is_empty() {
            return Err(HarnessError::Config(
                "sweep needs at least one pipeline and stage".into(),
            ));
        }
        if !(0.0..=1.0).contains(&s.uniform_level) || s.uniform_level == 0.0 {
            return Err(HarnessError::Config(format!(
                "uniform level {} outside (0, 1]",
                s.uniform_level
            )));
        }
        let v = &self.variants;
        if v.metrics.is_empty() || v.nps.is_empty() || v.mtf.is_empty() {
            return Err(HarnessError::Config("variant axes must be non-empty".into()));
        }
        if v.metrics.iter().any(|m| m.uses_csf()) && v.csf.is_empty() {
            return Err(HarnessError::Config(
                "CSF-weighted metrics need at least one CSF".into(),
            ));
        }
        if v.mtf.contains(&MtfVariant::Analytic) {
            return Err(HarnessError::Config(
                "the analytic MTF is not a measured sweep variant".into(),
            ));
        }
        if !(self.metrics.nps_visual >= 0.0) {
            return Err(HarnessError::Config("nps_visual must be >= 0".into()));
        }
        if let JndMapping::Linear { scale } = self.metrics.texture_mapping {
            if !(scale > 0.0) {
                return Err(HarnessError::Config("texture mapping scale must be positive".into()));
            }
        }
        if !(self.calibration.target_mean > 0.0) {
            return Err(HarnessError::Config("calibration target mean must be positive".into()));
        }
        Ok(())
    }
}
