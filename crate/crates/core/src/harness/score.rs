//! Scoring of measured systems under every metric variant, calibration and
//! the benchmark report.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::measure::{ConditionMeasurement, PreparedCsf, SceneMeasurement};
use super::ratings::ImageKey;
use super::{mae, rmse, srocc, CalibrationMode, HarnessError, RatingsTable, RunConfig, VariantAxes};
use crate::metrics::{
    acutance, calibrate_k1, cpiq_score, displayed_spectra, log_neq, pic, sqrin, texture_loss, visual_log_neq,
    MetricCalibration, MetricKind, MetricScore, VariantDescriptor,
};
use crate::simulator::{PipelineKind, Stage};
use crate::spectral::{NpsVariant, Spectrum1D};
use crate::sysperf::{neq, MtfCurve, MtfVariant};
use crate::vision::{sample_csf, ContrastSensitivity, CsfKind};

/// Every combination of the enabled axes; metrics without a CSF get one
/// entry per (NPS, MTF) pair.
pub fn enumerate_variants(axes: &VariantAxes) -> Vec<VariantDescriptor> {
    let mut out = Vec::new();
    for &metric in &axes.metrics {
        for &nps in &axes.nps {
            for &mtf in &axes.mtf {
                if metric.uses_csf() {
                    for &csf in &axes.csf {
                        out.push(VariantDescriptor {
                            metric,
                            nps,
                            mtf,
                            csf: Some(csf),
                        });
                    }
                } else {
                    out.push(VariantDescriptor {
                        metric,
                        nps,
                        mtf,
                        csf: None,
                    });
                }
            }
        }
    }
    out
}

/// One scored image; column names follow the score CSV header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub image_id: String,
    pub scene_id: String,
    pub pipeline: PipelineKind,
    pub snr: f64,
    pub stage: Stage,
    pub metric: MetricKind,
    pub nps_variant: NpsVariant,
    pub mtf_variant: MtfVariant,
    pub csf: String,
    pub raw: f64,
    pub k1: f64,
    pub k2: f64,
    pub score: f64,
    /// Hash of the run configuration that produced the row.
    pub config_hash: String,
}

impl ScoreRow {
    pub fn variant(&self) -> Result<VariantDescriptor, HarnessError> {
        let csf = if self.csf == "none" {
            None
        } else {
            Some(self.csf.parse::<CsfKind>()?)
        };
        Ok(VariantDescriptor {
            metric: self.metric,
            nps: self.nps_variant,
            mtf: self.mtf_variant,
            csf,
        })
    }

    pub fn key(&self) -> ImageKey {
        ImageKey::new(&self.scene_id, self.pipeline, self.snr)
    }
}

pub fn write_scores_csv(rows: &[ScoreRow], path: &Path) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_scores_csv(path: &Path) -> Result<Vec<ScoreRow>, HarnessError> {
    let mut rdr = csv::Reader::from_path(path)?;
    Ok(rdr.deserialize().collect::<Result<Vec<ScoreRow>, _>>()?)
}

fn pick_nps<'a>(cm: &'a ConditionMeasurement, scene: &'a SceneMeasurement, v: NpsVariant) -> &'a Spectrum1D {
    match v {
        NpsVariant::UniformPatch => &cm.uniform.nps,
        NpsVariant::DeadLeavesSpd => &cm.dead_leaves.nps,
        NpsVariant::PictorialSpd => &scene.source.nps,
        NpsVariant::MeanPictorialSpd => &cm.mean_nps,
    }
}

fn pick_mtf<'a>(
    cm: &'a ConditionMeasurement,
    scene: &'a SceneMeasurement,
    v: MtfVariant,
) -> Result<&'a MtfCurve, HarnessError> {
    match v {
        MtfVariant::DirectDeadLeaves => Ok(&cm.mtf_direct),
        MtfVariant::DeadLeavesSpd => Ok(&cm.mtf_dead_leaves),
        MtfVariant::PictorialSpd => Ok(&scene.mtf),
        MtfVariant::MeanPictorialSpd => Ok(&cm.mean_mtf),
        MtfVariant::Analytic => Err(HarnessError::Config("the analytic MTF is not measured".into())),
    }
}

fn pick_omega(cm: &ConditionMeasurement, scene: &SceneMeasurement, v: NpsVariant, csf: CsfKind) -> Option<f64> {
    match v {
        NpsVariant::UniformPatch => cm.uniform.omega_for(csf),
        NpsVariant::DeadLeavesSpd => cm.dead_leaves.omega_for(csf),
        NpsVariant::PictorialSpd => scene.source.omega_for(csf),
        NpsVariant::MeanPictorialSpd => cm.mean_pictorial_omega(csf),
    }
}

/// Uncalibrated score of one scene under one variant.
pub fn score_scene(
    cm: &ConditionMeasurement,
    scene: &SceneMeasurement,
    v: &VariantDescriptor,
    cfg: &RunConfig,
    csfs: &[PreparedCsf],
) -> Result<MetricScore, HarnessError> {
    let csf = match v.csf {
        Some(kind) => Some(
            csfs.iter()
                .find(|c| c.kind == kind)
                .ok_or_else(|| HarnessError::Config(format!("CSF {kind} was not prepared")))?,
        ),
        None => None,
    };
    let omega = match v.csf {
        Some(kind) if v.metric == MetricKind::Cpiq => pick_omega(cm, scene, v.nps, kind),
        _ => None,
    };
    let curves = MeasuredCurves {
        input_ps: &scene.input_ps,
        mtf: pick_mtf(cm, scene, v.mtf)?,
        nps: pick_nps(cm, scene, v.nps),
        mu_a: scene.source.mean_level,
        omega,
    };
    score_curves(v.metric, csf, &curves, cfg)
}

/// The measured inputs of one metric evaluation.
#[derive(Debug, Clone, Copy)]
pub struct MeasuredCurves<'a> {
    pub input_ps: &'a Spectrum1D,
    pub mtf: &'a MtfCurve,
    pub nps: &'a Spectrum1D,
    /// Mean linear signal of the scene replicates.
    pub mu_a: f64,
    /// Visual noise for the CSF in use; needed by CPIQ only.
    pub omega: Option<f64>,
}

/// Uncalibrated score of `metric` from measured curves.
pub fn score_curves(
    metric: MetricKind,
    csf: Option<&PreparedCsf>,
    curves: &MeasuredCurves<'_>,
    cfg: &RunConfig,
) -> Result<MetricScore, HarnessError> {
    let env = &cfg.viewing;
    let need_csf = || csf.ok_or_else(|| HarnessError::Config(format!("{metric} needs a CSF")));
    let cal = MetricCalibration::identity();
    let m = &cfg.metrics;
    let (mtf, nps) = (curves.mtf, curves.nps);
    let score = match metric {
        MetricKind::Pic | MetricKind::Sqrin => {
            let c = need_csf()?;
            let ds = displayed_spectra(curves.input_ps, mtf, nps, env, m.reading)?;
            let samples = sample_csf(c, &ds.frequencies);
            if metric == MetricKind::Pic {
                pic(&ds, &samples, m.nps_visual, env.u_max(), cal)?
            } else {
                sqrin(&ds, &samples, m.nps_visual, env.u_max(), cal)?
            }
        }
        MetricKind::LogNeq => log_neq(&neq(mtf, nps, curves.mu_a)?, env, cal)?,
        MetricKind::VisualLogNeq => {
            let c: &dyn ContrastSensitivity = need_csf()?;
            visual_log_neq(&neq(mtf, nps, curves.mu_a)?, env, c, cal)?
        }
        MetricKind::Cpiq => {
            let c = need_csf()?;
            let q_t = acutance(mtf, env, c)?;
            let omega = curves
                .omega
                .ok_or_else(|| HarnessError::Config("visual noise was not measured".into()))?;
            cpiq_score(texture_loss(q_t, m.texture_mapping), omega, m.ql_max)?
        }
    };
    Ok(score)
}

/// Raw rows of every scene of `cm` under `v`, with identity calibration.
pub fn score_condition(
    cm: &ConditionMeasurement,
    v: &VariantDescriptor,
    cfg: &RunConfig,
    csfs: &[PreparedCsf],
    config_hash: &str,
) -> Result<Vec<ScoreRow>, HarnessError> {
    cm.scenes
        .iter()
        .map(|scene| {
            let s = score_scene(cm, scene, v, cfg, csfs)?;
            let key = ImageKey::new(&scene.scene_id, cm.pipeline, cm.snr);
            Ok(ScoreRow {
                image_id: key.image_id(),
                scene_id: scene.scene_id.clone(),
                pipeline: cm.pipeline,
                snr: key.snr(),
                stage: cm.stage,
                metric: v.metric,
                nps_variant: v.nps,
                mtf_variant: v.mtf,
                csf: v.csf_label().to_string(),
                raw: s.raw,
                k1: 1.0,
                k2: 0.0,
                score: s.raw,
                config_hash: config_hash.to_string(),
            })
        })
        .collect()
}

/// Fitted calibration of one variant (and pipeline, in per-pipeline mode).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRow {
    pub metric: MetricKind,
    pub nps_variant: NpsVariant,
    pub mtf_variant: MtfVariant,
    pub csf: String,
    /// `all` in pooled mode.
    pub pipeline: String,
    pub reference_count: usize,
    pub target_mean: f64,
    pub k1: f64,
    pub k2: f64,
}

/// A variant left out of the results, with the reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedVariant {
    pub metric: MetricKind,
    pub nps_variant: NpsVariant,
    pub mtf_variant: MtfVariant,
    pub csf: String,
    pub reason: String,
}

impl SkippedVariant {
    pub fn new(v: &VariantDescriptor, reason: String) -> Self {
        Self {
            metric: v.metric,
            nps_variant: v.nps,
            mtf_variant: v.mtf,
            csf: v.csf_label().to_string(),
            reason,
        }
    }
}

/// Calibrated rows, one calibration row per group, and the groups dropped.
pub type CalibratedRows = (Vec<ScoreRow>, Vec<CalibrationRow>, Vec<SkippedVariant>);

/// Fits `k1` per variant group on the reference rows (reference SNR and
/// stage) and applies it to every row of the group. The target mean is the
/// mean rating of the reference images when ratings are given, otherwise the
/// configured target. Uncalibrated metrics keep `k1 = 1`, `k2 = 0`.
/// Groups that cannot be calibrated are removed and reported.
pub fn calibrate_rows(
    rows: Vec<ScoreRow>,
    cfg: &RunConfig,
    ratings: Option<&RatingsTable>,
) -> Result<CalibratedRows, HarnessError> {
    let c = &cfg.calibration;
    let ref_snr = (c.reference_snr * 100.0).round() as i64;
    let group_of = |r: &ScoreRow| -> Result<(VariantDescriptor, String), HarnessError> {
        let pipeline = match c.mode {
            CalibrationMode::Pooled => "all".to_string(),
            CalibrationMode::PerPipeline => r.pipeline.to_string(),
        };
        Ok((r.variant()?, pipeline))
    };
    let mut groups: BTreeMap<(VariantDescriptor, String), Vec<usize>> = BTreeMap::new();
    for (i, r) in rows.iter().enumerate() {
        groups.entry(group_of(r)?).or_default().push(i);
    }
    let mut fitted: BTreeMap<(VariantDescriptor, String), MetricCalibration> = BTreeMap::new();
    let mut cal_rows = Vec::new();
    let mut skipped = Vec::new();
    let mut dropped = std::collections::BTreeSet::new();
    for ((v, pipeline), idx) in &groups {
        if !v.metric.is_calibrated() {
            fitted.insert((v.clone(), pipeline.clone()), MetricCalibration::identity());
            continue;
        }
        let reference: Vec<&ScoreRow> = idx
            .iter()
            .map(|&i| &rows[i])
            .filter(|r| r.key().snr_centi == ref_snr && r.stage == c.reference_stage)
            .collect();
        if reference.is_empty() {
            return Err(HarnessError::Config(format!(
                "no reference rows at SNR {} / {} to calibrate {}",
                c.reference_snr, c.reference_stage, v.metric
            )));
        }
        let target = match ratings {
            Some(t) => {
                let vals: Vec<f64> = reference
                    .iter()
                    .map(|r| {
                        t.get(&r.image_id, r.stage)
                            .map(|x| x.rating_sqs2)
                            .ok_or_else(|| HarnessError::Data(format!("no rating for {} / {}", r.image_id, r.stage)))
                    })
                    .collect::<Result<_, _>>()?;
                vals.iter().sum::<f64>() / vals.len() as f64
            }
            None => c.target_mean,
        };
        let raws: Vec<f64> = reference.iter().map(|r| r.raw).collect();
        match calibrate_k1(&raws, target) {
            Ok(cal) => {
                cal_rows.push(CalibrationRow {
                    metric: v.metric,
                    nps_variant: v.nps,
                    mtf_variant: v.mtf,
                    csf: v.csf_label().to_string(),
                    pipeline: pipeline.clone(),
                    reference_count: raws.len(),
                    target_mean: target,
                    k1: cal.k1,
                    k2: cal.k2,
                });
                fitted.insert((v.clone(), pipeline.clone()), cal);
            }
            Err(e) => {
                skipped.push(SkippedVariant::new(v, format!("calibration ({pipeline}): {e}")));
                dropped.insert((v.clone(), pipeline.clone()));
            }
        }
    }
    let mut out = Vec::with_capacity(rows.len());
    for mut r in rows {
        let g = group_of(&r)?;
        if dropped.contains(&g) {
            continue;
        }
        let cal = fitted[&g];
        r.k1 = cal.k1;
        r.k2 = cal.k2;
        r.score = cal.apply(r.raw);
        out.push(r);
    }
    Ok((out, cal_rows, skipped))
}

/// Agreement of one variant's scores with the ratings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub metric: MetricKind,
    pub nps_variant: NpsVariant,
    pub mtf_variant: MtfVariant,
    pub csf: String,
    /// `all` or a pipeline name.
    pub pipeline: String,
    pub n: usize,
    pub mae: f64,
    pub rmse: f64,
    /// Empty when undefined (constant scores or ratings).
    pub srocc: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub entries: Vec<ReportEntry>,
}

impl BenchmarkReport {
    pub fn write_csv(&self, path: &Path) -> Result<(), HarnessError> {
        let mut w = csv::Writer::from_path(path)?;
        for e in &self.entries {
            w.serialize(e)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn find(&self, v: &VariantDescriptor, pipeline: &str) -> Option<&ReportEntry> {
        self.entries.iter().find(|e| {
            e.metric == v.metric
                && e.nps_variant == v.nps
                && e.mtf_variant == v.mtf
                && e.csf == v.csf_label()
                && e.pipeline == pipeline
        })
    }
}

/// MAE, RMSE and SROCC per variant, pooled and per pipeline. Rows without a
/// matching rating (by image id and stage) are a data error.
pub fn benchmark(rows: &[ScoreRow], ratings: &RatingsTable) -> Result<BenchmarkReport, HarnessError> {
    let mut groups: BTreeMap<(VariantDescriptor, String), (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for r in rows {
        let rating = ratings
            .get(&r.image_id, r.stage)
            .ok_or_else(|| HarnessError::Data(format!("no rating for {} / {}", r.image_id, r.stage)))?
            .rating_sqs2;
        let v = r.variant()?;
        for p in ["all".to_string(), r.pipeline.to_string()] {
            let e = groups.entry((v.clone(), p)).or_default();
            e.0.push(r.score);
            e.1.push(rating);
        }
    }
    let mut entries = Vec::with_capacity(groups.len());
    for ((v, pipeline), (s, t)) in groups {
        entries.push(ReportEntry {
            metric: v.metric,
            nps_variant: v.nps,
            mtf_variant: v.mtf,
            csf: v.csf_label().to_string(),
            pipeline,
            n: s.len(),
            mae: mae(&s, &t)?,
            rmse: rmse(&s, &t)?,
            srocc: srocc(&s, &t).ok(),
        });
    }
    Ok(BenchmarkReport { entries })
}
