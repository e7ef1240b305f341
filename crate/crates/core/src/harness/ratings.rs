//! Observer ratings table and a synthetic ratings generator.

use std::collections::BTreeSet;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::simulator::{PipelineKind, Stage};

/// One rated image; column names follow the ratings CSV header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingRow {
    pub image_id: String,
    pub scene_id: String,
    pub pipeline: PipelineKind,
    pub snr: f64,
    pub stage: Stage,
    pub rating_sqs2: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RatingsTable {
    rows: Vec<RatingRow>,
}

impl RatingsTable {
    pub fn new(rows: Vec<RatingRow>) -> Result<Self, HarnessError> {
        let mut seen = BTreeSet::new();
        for r in &rows {
            if !r.rating_sqs2.is_finite() || !r.stderr.is_finite() {
                return Err(HarnessError::Data(format!("non-finite rating for {}", r.image_id)));
            }
            if !seen.insert((r.image_id.clone(), r.stage)) {
                return Err(HarnessError::Data(format!(
                    "duplicate rating for ({}, {})",
                    r.image_id, r.stage
                )));
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[RatingRow] {
        &self.rows
    }

    pub fn get(&self, image_id: &str, stage: Stage) -> Option<&RatingRow> {
        self.rows.iter().find(|r| r.image_id == image_id && r.stage == stage)
    }

    pub fn read_csv(path: &Path) -> Result<Self, HarnessError> {
        let mut rdr = csv::Reader::from_path(path)?;
        let rows = rdr.deserialize().collect::<Result<Vec<RatingRow>, _>>()?;
        Self::new(rows)
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), HarnessError> {
        let mut w = csv::Writer::from_path(path)?;
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Settings of the synthetic ratings generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticRatings {
    /// Rating at SNR 10.
    pub base: f64,
    /// Rating gain per doubling of SNR.
    pub per_doubling: f64,
    /// Standard deviation of the additive Gaussian perturbation.
    pub perturbation: f64,
    pub stderr: f64,
}

impl Default for SyntheticRatings {
    fn default() -> Self {
        Self {
            base: 8.0,
            per_doubling: 5.0,
            perturbation: 0.0,
            stderr: 0.8,
        }
    }
}

/// Image identity shared by score and rating rows.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ImageKey {
    pub scene_id: String,
    pub pipeline: PipelineKind,
    /// SNR in hundredths, so keys are exact.
    pub snr_centi: i64,
}

impl ImageKey {
    pub fn new(scene_id: &str, pipeline: PipelineKind, snr: f64) -> Self {
        Self {
            scene_id: scene_id.to_string(),
            pipeline,
            snr_centi: (snr * 100.0).round() as i64,
        }
    }

    pub fn snr(&self) -> f64 {
        self.snr_centi as f64 / 100.0
    }

    pub fn image_id(&self) -> String {
        format!("{}_{}_snr{}", self.scene_id, self.pipeline, self.snr())
    }
}

/// `base + per_doubling log2(snr / 10) + N(0, perturbation)` for every
/// image and stage, rows ordered as given.
pub fn synthetic_ratings(
    images: &[ImageKey],
    stages: &[Stage],
    params: &SyntheticRatings,
    seed: u64,
) -> Result<RatingsTable, HarnessError> {
    if !(params.perturbation >= 0.0) {
        return Err(HarnessError::Config(format!(
            "negative perturbation {}",
            params.perturbation
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, params.perturbation).map_err(|e| HarnessError::Config(e.to_string()))?;
    let mut rows = Vec::with_capacity(images.len() * stages.len());
    for key in images {
        for &stage in stages {
            let ideal = params.base + params.per_doubling * (key.snr() / 10.0).log2();
            let jitter = if params.perturbation > 0.0 {
                noise.sample(&mut rng)
            } else {
                0.0
            };
            rows.push(RatingRow {
                image_id: key.image_id(),
                scene_id: key.scene_id.clone(),
                pipeline: key.pipeline,
                snr: key.snr(),
                stage,
                rating_sqs2: ideal + jitter,
                stderr: params.stderr,
            });
        }
    }
    RatingsTable::new(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn keys() -> Vec<ImageKey> {
        [10.0, 20.0, 40.0, 80.0]
            .iter()
            .map(|&s| ImageKey::new("blobs-02", PipelineKind::NonLinear, s))
            .collect()
    }

    #[test]
    fn synthetic_is_monotone_without_perturbation() {
        let t = synthetic_ratings(&keys(), &[Stage::PostSharpen], &SyntheticRatings::default(), 1).unwrap();
        let r: Vec<f64> = t.rows().iter().map(|r| r.rating_sqs2).collect();
        assert_eq!(r, vec![8.0, 13.0, 18.0, 23.0]);
        assert_eq!(t.rows()[0].image_id, "blobs-02_non-linear_snr10");
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.csv");
        let params = SyntheticRatings {
            perturbation: 1.0,
            ..Default::default()
        };
        let t = synthetic_ratings(&keys(), &Stage::ALL, &params, 4).unwrap();
        t.write_csv(&p).unwrap();
        let header = std::fs::read_to_string(&p).unwrap();
        assert!(header.starts_with("image_id,scene_id,pipeline,snr,stage,rating_sqs2,stderr\n"));
        assert_eq!(RatingsTable::read_csv(&p).unwrap(), t);
    }

    #[test]
    fn duplicates_are_rejected() {
        let t = synthetic_ratings(&keys(), &[Stage::PreDenoise], &SyntheticRatings::default(), 1).unwrap();
        let mut rows = t.rows().to_vec();
        rows.push(rows[0].clone());
        assert!(matches!(RatingsTable::new(rows), Err(HarnessError::Data(_))));
    }
}
