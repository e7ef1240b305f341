//! The full variant sweep: simulate, measure, score, calibrate, benchmark.

use std::collections::BTreeSet;

use rayon::prelude::*;

use super::measure::{measure_system, prepare_csfs, ConditionMeasurement, PreparedCsf, Targets};
use super::score::{
    benchmark, calibrate_rows, enumerate_variants, score_condition, BenchmarkReport, CalibrationRow, ScoreRow,
    SkippedVariant,
};
use super::{HarnessError, ImageKey, RatingsTable, RunConfig};
use crate::metrics::VariantDescriptor;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Calibrated rows ordered by variant, then pipeline, SNR, stage and scene.
    pub rows: Vec<ScoreRow>,
    pub calibrations: Vec<CalibrationRow>,
    pub skipped: Vec<SkippedVariant>,
    pub report: Option<BenchmarkReport>,
    /// Every image of the sweep, for generating or checking ratings.
    pub images: Vec<ImageKey>,
    /// Curves of every (pipeline, SNR, stage) system, in sweep order.
    pub measurements: Vec<ConditionMeasurement>,
}

/// Simulates and measures every (pipeline, SNR, stage) system of the sweep.
pub fn measure_all(cfg: &RunConfig, csfs: &[PreparedCsf]) -> Result<Vec<ConditionMeasurement>, HarnessError> {
    let targets = Targets::generate(cfg)?;
    let mut out = Vec::new();
    for &pipeline in &cfg.sweep.pipelines {
        for &snr in &cfg.sweep.snrs {
            out.extend(measure_system(cfg, &targets, pipeline, snr, csfs)?);
        }
    }
    Ok(out)
}

/// Raw (uncalibrated) rows of every variant, plus the variants that failed.
pub fn score_all(
    cfg: &RunConfig,
    measurements: &[ConditionMeasurement],
    csfs: &[PreparedCsf],
) -> Result<(Vec<ScoreRow>, Vec<SkippedVariant>), HarnessError> {
    let hash = cfg.hash()?;
    let variants = enumerate_variants(&cfg.variants);
    let per_variant: Vec<Result<Vec<ScoreRow>, (VariantDescriptor, String)>> = variants
        .par_iter()
        .map(|v| {
            let mut rows = Vec::new();
            for cm in measurements {
                let r = score_condition(cm, v, cfg, csfs, &hash)
                    .map_err(|e| (v.clone(), format!("{} snr {} {}: {e}", cm.pipeline, cm.snr, cm.stage)))?;
                rows.extend(r);
            }
            Ok(rows)
        })
        .collect();
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for r in per_variant {
        match r {
            Ok(v) => rows.extend(v),
            Err((v, reason)) => skipped.push(SkippedVariant::new(&v, reason)),
        }
    }
    Ok((rows, skipped))
}

/// Runs the whole sweep. With ratings, calibration targets their reference
/// mean and a benchmark report is attached.
pub fn run_variant_sweep(cfg: &RunConfig, ratings: Option<&RatingsTable>) -> Result<SweepResult, HarnessError> {
    cfg.validate()?;
    let csfs = prepare_csfs(&cfg.variants.csf, &cfg.viewing)?;
    let measurements = measure_all(cfg, &csfs)?;
    let (raw, mut skipped) = score_all(cfg, &measurements, &csfs)?;
    let (rows, calibrations, cal_skipped) = calibrate_rows(raw, cfg, ratings)?;
    skipped.extend(cal_skipped);
    let report = ratings.map(|t| benchmark(&rows, t)).transpose()?;
    let images: BTreeSet<ImageKey> = measurements
        .iter()
        .flat_map(|cm| {
            cm.scenes
                .iter()
                .map(move |s| ImageKey::new(&s.scene_id, cm.pipeline, cm.snr))
        })
        .collect();
    Ok(SweepResult {
        rows,
        calibrations,
        skipped,
        report,
        images: images.into_iter().collect(),
        measurements,
    })
}
