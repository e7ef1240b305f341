//! Measurement of every NPS and MTF variant for one simulated system.

use rayon::prelude::*;

use super::{HarnessError, RunConfig};
use crate::imgcore::PlanarImage;
use crate::metrics::visual_noise_omega;
use crate::simulator::{
    derive_seed, generate_dead_leaves, generate_replicates, generate_uniform_patch, synthetic_scenes, PipelineConfig,
    PipelineKind, Stage, StageReplicates,
};
use crate::spectral::{
    mean_pictorial_nps, measure_nps, noise_images, NpsVariant, ReplicateSet, Spectrum1D, TargetKind,
};
use crate::sysperf::{
    mean_pictorial_mtf, measure_mtf, output_power_spectrum, signal_power_spectrum, MtfCurve, SpectraPair,
};
use crate::vision::{sample_csf, trapezoid, ContrastSensitivity, CsfKind, ViewingEnvironment};

const AREA_GRID_STEP: f64 = 0.01;
const AREA_GRID_LIMIT: f64 = 80.0;

/// A CSF scaled so its area over 0..80 cy/deg matches the Barten CSF's.
pub struct PreparedCsf {
    pub kind: CsfKind,
    model: Box<dyn ContrastSensitivity>,
    scale: f64,
}

impl ContrastSensitivity for PreparedCsf {
    fn sensitivity(&self, u_cpd: f64) -> f64 {
        self.scale * self.model.sensitivity(u_cpd)
    }

    fn name(&self) -> &str {
        self.kind.as_str()
    }
}

pub fn prepare_csfs(kinds: &[CsfKind], env: &ViewingEnvironment) -> Result<Vec<PreparedCsf>, HarnessError> {
    let n = (AREA_GRID_LIMIT / AREA_GRID_STEP).round() as usize;
    let grid: Vec<f64> = (0..=n).map(|i| i as f64 * AREA_GRID_STEP).collect();
    let reference = CsfKind::Barten.build(env)?;
    let ref_area = trapezoid(&grid, &sample_csf(reference.as_ref(), &grid));
    kinds
        .iter()
        .map(|&kind| {
            let model = kind.build(env)?;
            let area = trapezoid(&grid, &sample_csf(model.as_ref(), &grid));
            if !(area > 0.0) {
                return Err(HarnessError::Numerical(format!("{kind} CSF has zero area")));
            }
            Ok(PreparedCsf {
                kind,
                model,
                scale: ref_area / area,
            })
        })
        .collect()
}

/// What a replicate set of one target yields: its NPS, mean level and
/// visual noise for each CSF.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceMeasurement {
    pub nps: Spectrum1D,
    pub mean_level: f64,
    pub omega: Vec<(CsfKind, f64)>,
}

impl SourceMeasurement {
    pub fn omega_for(&self, kind: CsfKind) -> Option<f64> {
        self.omega.iter().find(|(k, _)| *k == kind).map(|(_, v)| *v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneMeasurement {
    pub scene_id: String,
    pub source: SourceMeasurement,
    pub input_ps: Spectrum1D,
    pub mtf: MtfCurve,
}

/// All variant curves of one (pipeline, SNR, stage) system.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionMeasurement {
    pub pipeline: PipelineKind,
    pub snr: f64,
    pub stage: Stage,
    pub uniform: SourceMeasurement,
    pub dead_leaves: SourceMeasurement,
    pub mtf_direct: MtfCurve,
    pub mtf_dead_leaves: MtfCurve,
    pub scenes: Vec<SceneMeasurement>,
    pub mean_nps: Spectrum1D,
    pub mean_mtf: MtfCurve,
}

impl ConditionMeasurement {
    pub fn mean_pictorial_omega(&self, kind: CsfKind) -> Option<f64> {
        let v: Option<Vec<f64>> = self.scenes.iter().map(|s| s.source.omega_for(kind)).collect();
        let v = v?;
        Some(v.iter().sum::<f64>() / v.len() as f64)
    }
}

/// Noise-free inputs shared by every system of a sweep.
pub struct Targets {
    pub uniform: PlanarImage,
    pub dead_leaves: PlanarImage,
    pub dead_leaves_ps: Spectrum1D,
    pub scenes: Vec<(String, PlanarImage, Spectrum1D)>,
}

impl Targets {
    pub fn generate(cfg: &RunConfig) -> Result<Self, HarnessError> {
        let size = cfg.sweep.size;
        let uniform = generate_uniform_patch(cfg.sweep.uniform_level, size, size)?;
        let mut dl_params = cfg.dead_leaves.clone();
        dl_params.seed = derive_seed(cfg.seed, "dead-leaves");
        let dead_leaves = generate_dead_leaves(&dl_params, size, size)?;
        let dead_leaves_ps = signal_power_spectrum(&dead_leaves, &cfg.measurement)?;
        let scenes = synthetic_scenes(cfg.sweep.scenes, size, derive_seed(cfg.seed, "scenes"))?
            .into_iter()
            .map(|(id, img)| {
                let ps = signal_power_spectrum(&img, &cfg.measurement)?;
                Ok((id, img, ps))
            })
            .collect::<Result<_, HarnessError>>()?;
        Ok(Self {
            uniform,
            dead_leaves,
            dead_leaves_ps,
            scenes,
        })
    }
}

pub fn measure_source(
    reps: &ReplicateSet,
    variant: NpsVariant,
    cfg: &RunConfig,
    csfs: &[PreparedCsf],
    with_omega: bool,
) -> Result<SourceMeasurement, HarnessError> {
    let nps = measure_nps(reps, variant, &cfg.measurement)?;
    let mean_level = reps.mean_signal()?;
    let mut omega = Vec::new();
    if with_omega {
        let noise = noise_images(reps, cfg.measurement.bias_correction)?;
        let amplitude = noise.first().map_or(1.0, |n| n.bias_factor().sqrt());
        let fields: Vec<&PlanarImage> = noise.iter().map(|n| n.image()).collect();
        for c in csfs {
            let o = visual_noise_omega(&fields, mean_level, amplitude, &cfg.viewing, c, &cfg.metrics.omega)?;
            omega.push((c.kind, o));
        }
    }
    Ok(SourceMeasurement { nps, mean_level, omega })
}

/// Pipeline settings for one system, with a seed tied to the target and system.
pub fn system_config(cfg: &RunConfig, pipeline: PipelineKind, snr: f64, target_id: &str) -> PipelineConfig {
    PipelineConfig {
        kind: pipeline,
        snr,
        seed: derive_seed(cfg.seed, &format!("{target_id}/{pipeline}/{snr}")),
        ..cfg.pipeline.clone()
    }
}

fn replicate(
    img: &PlanarImage,
    cfg: &RunConfig,
    pipeline: PipelineKind,
    snr: f64,
    target: TargetKind,
    id: &str,
) -> Result<StageReplicates, HarnessError> {
    let sys = system_config(cfg, pipeline, snr, id);
    Ok(generate_replicates(img, &sys, cfg.sweep.replicates, target, id)?)
}

/// Simulates every target through one pipeline at one SNR and measures all
/// curves at each configured stage.
pub fn measure_system(
    cfg: &RunConfig,
    targets: &Targets,
    pipeline: PipelineKind,
    snr: f64,
    csfs: &[PreparedCsf],
) -> Result<Vec<ConditionMeasurement>, HarnessError> {
    let with_omega = cfg.variants.metrics.contains(&crate::metrics::MetricKind::Cpiq);
    let stages = &cfg.sweep.stages;

    let uni = replicate(&targets.uniform, cfg, pipeline, snr, TargetKind::Uniform, "uniform")?;
    let uniform: Vec<SourceMeasurement> = stages
        .iter()
        .map(|&s| measure_source(uni.get(s), NpsVariant::UniformPatch, cfg, csfs, with_omega))
        .collect::<Result<_, _>>()?;
    drop(uni);

    let dl = replicate(
        &targets.dead_leaves,
        cfg,
        pipeline,
        snr,
        TargetKind::DeadLeaves,
        "dead-leaves",
    )?;
    let mut dead_leaves = Vec::with_capacity(stages.len());
    let mut mtf_direct = Vec::with_capacity(stages.len());
    let mut mtf_dead_leaves = Vec::with_capacity(stages.len());
    for (k, &s) in stages.iter().enumerate() {
        let reps = dl.get(s);
        let src = measure_source(reps, NpsVariant::DeadLeavesSpd, cfg, csfs, with_omega)?;
        let out_ps = output_power_spectrum(reps, &cfg.measurement)?;
        let input = targets.dead_leaves_ps.clone();
        let direct = SpectraPair::new(
            input.clone(),
            out_ps.clone(),
            uniform[k].nps.clone(),
            TargetKind::DeadLeaves,
            NpsVariant::UniformPatch,
        )?;
        let spd = SpectraPair::new(
            input,
            out_ps,
            src.nps.clone(),
            TargetKind::DeadLeaves,
            NpsVariant::DeadLeavesSpd,
        )?;
        mtf_direct.push(measure_mtf(&direct)?);
        mtf_dead_leaves.push(measure_mtf(&spd)?);
        dead_leaves.push(src);
    }
    drop(dl);

    // per scene, per stage
    let scenes: Vec<Vec<SceneMeasurement>> = targets
        .scenes
        .par_iter()
        .map(|(id, img, input_ps)| {
            let reps = replicate(img, cfg, pipeline, snr, TargetKind::Pictorial, id)?;
            stages
                .iter()
                .map(|&s| {
                    let set = reps.get(s);
                    let source = measure_source(set, NpsVariant::PictorialSpd, cfg, csfs, with_omega)?;
                    let out_ps = output_power_spectrum(set, &cfg.measurement)?;
                    let pair = SpectraPair::new(
                        input_ps.clone(),
                        out_ps,
                        source.nps.clone(),
                        TargetKind::Pictorial,
                        NpsVariant::PictorialSpd,
                    )?;
                    Ok(SceneMeasurement {
                        scene_id: id.clone(),
                        source,
                        input_ps: input_ps.clone(),
                        mtf: measure_mtf(&pair)?,
                    })
                })
                .collect::<Result<Vec<_>, HarnessError>>()
        })
        .collect::<Result<_, HarnessError>>()?;

    let mut out = Vec::with_capacity(stages.len());
    for (k, &stage) in stages.iter().enumerate() {
        let per_scene: Vec<SceneMeasurement> = scenes.iter().map(|v| v[k].clone()).collect();
        let (mean_nps, mean_mtf) = if per_scene.is_empty() {
            return Err(HarnessError::Config(
                "the sweep needs at least one pictorial scene".into(),
            ));
        } else {
            let curves: Vec<Spectrum1D> = per_scene.iter().map(|s| s.source.nps.clone()).collect();
            let mtfs: Vec<MtfCurve> = per_scene.iter().map(|s| s.mtf.clone()).collect();
            (mean_pictorial_nps(&curves)?, mean_pictorial_mtf(&mtfs)?)
        };
        out.push(ConditionMeasurement {
            pipeline,
            snr,
            stage,
            uniform: uniform[k].clone(),
            dead_leaves: dead_leaves[k].clone(),
            mtf_direct: mtf_direct[k].clone(),
            mtf_dead_leaves: mtf_dead_leaves[k].clone(),
            scenes: per_scene,
            mean_nps,
            mean_mtf,
        });
    }
    Ok(out)
}
