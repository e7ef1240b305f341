//! The simulated capture pipelines: lens, sensor noise, raw processing,
//! demosaicing, denoising and sharpening.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::demosaic::{cfa_color, demosaic_gradient, demosaic_malvar};
use super::filters::{bilateral_plane, gaussian_blur, guided_detail_boost, map_planes, unsharp_mask, Boundary};
use super::SimulatorError;
use crate::imgcore::PlanarImage;
use crate::spectral::{Provenance, ReplicateSet, TargetKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PipelineKind {
    Linear,
    NonLinear,
}

impl PipelineKind {
    pub const ALL: [PipelineKind; 2] = [Self::Linear, Self::NonLinear];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Linear => "linear",
            Self::NonLinear => "non-linear",
        }
    }
}

impl std::fmt::Display for PipelineKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for PipelineKind {
    type Err = SimulatorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| SimulatorError::Config(format!("unknown pipeline {s:?}")))
    }
}

/// Points at which the pipeline output is tapped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    PreDenoise,
    PostDenoise,
    PostSharpen,
}

impl Stage {
    pub const ALL: [Stage; 3] = [Self::PreDenoise, Self::PostDenoise, Self::PostSharpen];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::PreDenoise => "pre-denoise",
            Self::PostDenoise => "post-denoise",
            Self::PostSharpen => "post-sharpen",
        }
    }
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Stage {
    type Err = SimulatorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| SimulatorError::Config(format!("unknown stage {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageOutput {
    pub stage: Stage,
    pub image: PlanarImage,
}

/// Denoise and sharpen blend opacities in percent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Opacities {
    pub denoise: f64,
    pub sharpen: f64,
}

const TABLE_SNRS: [f64; 4] = [10.0, 20.0, 40.0, 80.0];
const LINEAR_DENOISE: [f64; 4] = [85.0, 83.0, 82.0, 80.0];
const LINEAR_SHARPEN: [f64; 4] = [60.0, 60.0, 55.0, 55.0];
const NON_LINEAR_DENOISE: [f64; 4] = [87.0, 86.0, 86.0, 85.0];
const NON_LINEAR_SHARPEN: [f64; 4] = [60.0, 70.0, 65.0, 60.0];

/// Tabulated opacities; SNRs off the table use the nearest entry in log SNR.
pub fn table_opacities(kind: PipelineKind, snr: f64) -> Opacities {
    let idx = if snr.is_finite() && snr > 0.0 {
        TABLE_SNRS
            .iter()
            .enumerate()
            .min_by(|a, b| {
                let da = (a.1.ln() - snr.ln()).abs();
                let db = (b.1.ln() - snr.ln()).abs();
                da.total_cmp(&db)
            })
            .map(|(i, _)| i)
            .unwrap_or(3)
    } else {
        3
    };
    let (d, s) = match kind {
        PipelineKind::Linear => (LINEAR_DENOISE, LINEAR_SHARPEN),
        PipelineKind::NonLinear => (NON_LINEAR_DENOISE, NON_LINEAR_SHARPEN),
    };
    Opacities {
        denoise: d[idx],
        sharpen: s[idx],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DenoiseParams {
    /// Linear Gaussian sigma; `None` uses `0.5 + 8 / snr`.
    pub gaussian_sigma: Option<f64>,
    pub bilateral_sigma_s: f64,
    /// Bilateral range sigma is `range_factor / snr`.
    pub bilateral_range_factor: f64,
}

impl Default for DenoiseParams {
    fn default() -> Self {
        Self {
            gaussian_sigma: None,
            bilateral_sigma_s: 1.5,
            bilateral_range_factor: 2.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SharpenParams {
    pub usm_sigma: f64,
    pub usm_amount: f64,
    pub guided_radius: usize,
    pub guided_eps: f64,
    pub guided_amount: f64,
}

impl Default for SharpenParams {
    fn default() -> Self {
        Self {
            usm_sigma: 1.0,
            usm_amount: 0.8,
            guided_radius: 2,
            guided_eps: 1e-3,
            guided_amount: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub kind: PipelineKind,
    /// Signal-to-noise ratio at saturation; non-finite disables all noise.
    pub snr: f64,
    /// Gaussian lens blur sigma in pixels.
    pub lens_sigma: f64,
    /// Read/dark noise sigma relative to saturation; `None` uses `0.4 / snr`.
    pub read_noise: Option<f64>,
    /// Multipliers on the noise standard deviation of R, G, B.
    pub channel_noise_scale: [f64; 3],
    pub gain: f64,
    pub black_level: f64,
    /// Start of the highlight soft knee, relative to saturation.
    pub knee: f64,
    /// Bayer sampling and demosaicing; off feeds full RGB to the denoiser.
    pub cfa: bool,
    pub boundary: Boundary,
    /// Overrides the tabulated opacities.
    pub opacities: Option<Opacities>,
    pub denoise: DenoiseParams,
    pub sharpen: SharpenParams,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            kind: PipelineKind::Linear,
            snr: 40.0,
            lens_sigma: 1.0,
            read_noise: None,
            channel_noise_scale: [2.0, 1.0, 3.3],
            gain: 1.0,
            black_level: 0.0,
            knee: 0.98,
            cfa: true,
            boundary: Boundary::Reflect,
            opacities: None,
            denoise: DenoiseParams::default(),
            sharpen: SharpenParams::default(),
            seed: 0,
        }
    }
}

impl PipelineConfig {
    pub fn new(kind: PipelineKind, snr: f64) -> Self {
        Self {
            kind,
            snr,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), SimulatorError> {
        let bad = |m: String| Err(SimulatorError::Config(m));
        if !(self.snr > 0.0) {
            return bad(format!("snr must be positive, got {}", self.snr));
        }
        if !(self.lens_sigma >= 0.0) || !self.lens_sigma.is_finite() {
            return bad(format!("lens sigma must be finite and >= 0, got {}", self.lens_sigma));
        }
        if let Some(r) = self.read_noise {
            if !(r >= 0.0) {
                return bad(format!("read noise must be >= 0, got {r}"));
            }
        }
        if self.channel_noise_scale.iter().any(|s| !(*s >= 0.0) || !s.is_finite()) {
            return bad(format!(
                "channel noise scales {:?} must be finite and >= 0",
                self.channel_noise_scale
            ));
        }
        if !(self.gain > 0.0) || !self.gain.is_finite() {
            return bad(format!("gain must be positive, got {}", self.gain));
        }
        if !(self.black_level >= 0.0) || !self.black_level.is_finite() {
            return bad(format!("black level must be >= 0, got {}", self.black_level));
        }
        if !(self.knee > 0.0 && self.knee <= 1.0) {
            return bad(format!("knee must lie in (0, 1], got {}", self.knee));
        }
        let o = self.opacities();
        for p in [o.denoise, o.sharpen] {
            if !(0.0..=100.0).contains(&p) {
                return bad(format!("opacity {p} outside [0, 100]"));
            }
        }
        if let Some(s) = self.denoise.gaussian_sigma {
            if !(s >= 0.0) {
                return bad(format!("denoise sigma must be >= 0, got {s}"));
            }
        }
        if !(self.denoise.bilateral_sigma_s >= 0.0) || !(self.denoise.bilateral_range_factor >= 0.0) {
            return bad("bilateral parameters must be >= 0".into());
        }
        let sh = &self.sharpen;
        if !(sh.usm_sigma >= 0.0)
            || !(sh.guided_eps > 0.0)
            || !sh.usm_amount.is_finite()
            || !sh.guided_amount.is_finite()
        {
            return bad("sharpen parameters out of range".into());
        }
        Ok(())
    }

    pub fn noiseless(&self) -> bool {
        !self.snr.is_finite()
    }

    pub fn opacities(&self) -> Opacities {
        self.opacities.unwrap_or_else(|| table_opacities(self.kind, self.snr))
    }

    /// Read/dark noise sigma relative to saturation.
    pub fn read_sigma(&self) -> f64 {
        if self.noiseless() {
            return 0.0;
        }
        self.read_noise.unwrap_or(0.4 / self.snr)
    }

    pub fn saturation_electrons(&self) -> f64 {
        self.snr * self.snr
    }

    pub fn denoise_sigma(&self) -> f64 {
        self.denoise
            .gaussian_sigma
            .unwrap_or(if self.noiseless() { 0.5 } else { 0.5 + 8.0 / self.snr })
    }

    pub fn bilateral_range_sigma(&self) -> f64 {
        if self.noiseless() {
            return 0.0;
        }
        self.denoise.bilateral_range_factor / self.snr
    }

    pub fn pipeline_id(&self) -> &'static str {
        self.kind.as_str()
    }
}

/// `o = (P/100) d + ((100 - P)/100) g`.
pub fn blend(filtered: &PlanarImage, unfiltered: &PlanarImage, opacity: f64) -> Result<PlanarImage, SimulatorError> {
    if !(0.0..=100.0).contains(&opacity) {
        return Err(SimulatorError::Config(format!("opacity {opacity} outside [0, 100]")));
    }
    let a = opacity / 100.0;
    let b = (100.0 - opacity) / 100.0;
    Ok(filtered.zip_map(unfiltered, |d, g| a * d + b * g)?)
}

fn check_finite(stage: &'static str, data: &[f64]) -> Result<(), SimulatorError> {
    match data.iter().position(|v| !v.is_finite()) {
        None => Ok(()),
        Some(i) => Err(SimulatorError::Fault {
            stage,
            detail: format!("non-finite sample {} at index {i}", data[i]),
        }),
    }
}

fn check_scene(scene: &PlanarImage) -> Result<(), SimulatorError> {
    scene.require_linear()?;
    if scene.channels() != 3 {
        return Err(SimulatorError::Input(format!(
            "scene must have 3 channels, got {}",
            scene.channels()
        )));
    }
    if let Some(v) = scene.data().iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(SimulatorError::Input(format!("scene sample {v} outside [0, 1]")));
    }
    Ok(())
}

fn soft_knee(x: f64, k: f64) -> f64 {
    if x <= k || k >= 1.0 {
        x
    } else {
        let span = 1.0 - k;
        k + span * ((x - k) / span).tanh()
    }
}

/// Sensor and raw-processing stages on an already blurred scene: returns the
/// RGGB mosaic (one plane) or, with the CFA disabled, three full planes.
pub fn sensor_capture<R: Rng>(
    blurred: &PlanarImage,
    cfg: &PipelineConfig,
    rng: &mut R,
) -> Result<PlanarImage, SimulatorError> {
    let (w, h) = (blurred.width(), blurred.height());
    let channels = if cfg.cfa { 1 } else { 3 };
    let n_sat = cfg.saturation_electrons();
    let read_e = cfg.read_sigma() * n_sat;
    let mut out = vec![0.0; channels * w * h];
    for y in 0..h {
        for x in 0..w {
            for k in 0..channels {
                let c = if cfg.cfa { cfa_color(x, y) } else { k };
                let s = blurred.get(c, x, y);
                let v = if cfg.noiseless() {
                    s
                } else {
                    let e = s * n_sat;
                    let shot = if e > 0.0 {
                        let p = Poisson::new(e).map_err(|err| SimulatorError::Fault {
                            stage: "sensor",
                            detail: format!("Poisson mean {e}: {err}"),
                        })?;
                        let draw: f64 = p.sample(rng);
                        draw - e
                    } else {
                        0.0
                    };
                    let read: f64 = StandardNormal.sample(rng);
                    let noise = shot + read * read_e;
                    (e + cfg.channel_noise_scale[c] * noise) / n_sat
                };
                let v = v * cfg.gain + cfg.black_level;
                let v = (v - cfg.black_level).max(0.0);
                out[k * w * h + y * w + x] = soft_knee(v, cfg.knee);
            }
        }
    }
    check_finite("sensor", &out)?;
    Ok(PlanarImage::new(w, h, channels, out)?)
}

fn denoise(img: &PlanarImage, cfg: &PipelineConfig) -> PlanarImage {
    match cfg.kind {
        PipelineKind::Linear => gaussian_blur(img, cfg.denoise_sigma(), cfg.boundary),
        PipelineKind::NonLinear => {
            let (ss, sr) = (cfg.denoise.bilateral_sigma_s, cfg.bilateral_range_sigma());
            map_planes(img, |p, w, h| bilateral_plane(p, w, h, ss, sr, cfg.boundary))
        }
    }
}

fn sharpen(img: &PlanarImage, cfg: &PipelineConfig) -> PlanarImage {
    let s = &cfg.sharpen;
    match cfg.kind {
        PipelineKind::Linear => unsharp_mask(img, s.usm_sigma, s.usm_amount, cfg.boundary),
        PipelineKind::NonLinear => {
            guided_detail_boost(img, s.guided_radius, s.guided_eps, s.guided_amount, cfg.boundary)
        }
    }
}

fn process<R: Rng>(
    blurred: &PlanarImage,
    cfg: &PipelineConfig,
    rng: &mut R,
) -> Result<Vec<StageOutput>, SimulatorError> {
    let raw = sensor_capture(blurred, cfg, rng)?;
    let (w, h) = (raw.width(), raw.height());
    let demosaiced = if cfg.cfa {
        match cfg.kind {
            PipelineKind::Linear => demosaic_malvar(raw.data(), w, h, cfg.boundary),
            PipelineKind::NonLinear => demosaic_gradient(raw.data(), w, h, cfg.boundary),
        }
    } else {
        raw
    }
    .with_meta(blurred.meta.clone());
    check_finite("demosaic", demosaiced.data())?;

    let op = cfg.opacities();
    let denoised = blend(&denoise(&demosaiced, cfg), &demosaiced, op.denoise)?;
    check_finite("denoise", denoised.data())?;
    let sharpened = blend(&sharpen(&denoised, cfg), &denoised, op.sharpen)?;
    check_finite("sharpen", sharpened.data())?;
    Ok(vec![
        StageOutput {
            stage: Stage::PreDenoise,
            image: demosaiced,
        },
        StageOutput {
            stage: Stage::PostDenoise,
            image: denoised,
        },
        StageOutput {
            stage: Stage::PostSharpen,
            image: sharpened,
        },
    ])
}

fn lens(scene: &PlanarImage, cfg: &PipelineConfig) -> Result<PlanarImage, SimulatorError> {
    check_scene(scene)?;
    cfg.validate()?;
    let blurred = gaussian_blur(scene, cfg.lens_sigma, cfg.boundary);
    check_finite("lens", blurred.data())?;
    Ok(blurred)
}

fn replicate_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// One capture; equal to replicate 0 of [`generate_replicates`] with the same config.
pub fn simulate_capture(scene: &PlanarImage, cfg: &PipelineConfig) -> Result<Vec<StageOutput>, SimulatorError> {
    let blurred = lens(scene, cfg)?;
    process(&blurred, cfg, &mut replicate_rng(cfg.seed, 0))
}

/// Replicate sets for each output stage.
#[derive(Debug, Clone, PartialEq)]
pub struct StageReplicates {
    pub sets: Vec<(Stage, ReplicateSet)>,
}

impl StageReplicates {
    pub fn get(&self, stage: Stage) -> &ReplicateSet {
        &self
            .sets
            .iter()
            .find(|(s, _)| *s == stage)
            .expect("every stage is present")
            .1
    }

    pub fn into_stage(self, stage: Stage) -> ReplicateSet {
        self.sets
            .into_iter()
            .find(|(s, _)| *s == stage)
            .expect("every stage is present")
            .1
    }
}

/// `n` captures differing only in their noise draws; replicate `i` uses
/// random stream `i` of the configured seed, so results do not depend on
/// thread scheduling.
pub fn generate_replicates(
    scene: &PlanarImage,
    cfg: &PipelineConfig,
    n: usize,
    target: TargetKind,
    scene_id: &str,
) -> Result<StageReplicates, SimulatorError> {
    if n < 2 {
        return Err(SimulatorError::Config(format!("need at least 2 replicates, got {n}")));
    }
    let blurred = lens(scene, cfg)?;
    let runs: Vec<Vec<StageOutput>> = (0..n)
        .into_par_iter()
        .map(|i| process(&blurred, cfg, &mut replicate_rng(cfg.seed, i)))
        .collect::<Result<_, _>>()?;
    let mut per_stage: Vec<Vec<PlanarImage>> = vec![Vec::with_capacity(n); Stage::ALL.len()];
    for run in runs {
        for (k, out) in run.into_iter().enumerate() {
            per_stage[k].push(out.image);
        }
    }
    let provenance = Provenance {
        target,
        scene_id: scene_id.to_string(),
        pipeline_id: cfg.pipeline_id().to_string(),
        snr: cfg.snr,
    };
    let sets = Stage::ALL
        .into_iter()
        .zip(per_stage)
        .map(|(stage, reps)| Ok((stage, ReplicateSet::new(reps, provenance.clone())?)))
        .collect::<Result<_, SimulatorError>>()?;
    Ok(StageReplicates { sets })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::{generate_scene, generate_uniform_patch, SceneKind};

    fn scene() -> PlanarImage {
        generate_scene(SceneKind::Mixed, 64, 64, 5).unwrap()
    }

    #[test]
    fn blend_endpoints() {
        let d = PlanarImage::filled(4, 4, 3, 1.0).unwrap();
        let g = PlanarImage::filled(4, 4, 3, 0.5).unwrap();
        assert_eq!(blend(&d, &g, 100.0).unwrap(), d);
        assert_eq!(blend(&d, &g, 0.0).unwrap(), g);
        let m = blend(&d, &g, 60.0).unwrap();
        assert!(m.data().iter().all(|v| (v - (0.6 + 0.4 * 0.5)).abs() < 1e-15));
        assert!(blend(&d, &g, 101.0).is_err());
        let small = PlanarImage::filled(2, 2, 3, 0.0).unwrap();
        assert!(blend(&d, &small, 50.0).is_err());
    }

    #[test]
    fn opacity_table_lookup() {
        assert_eq!(table_opacities(PipelineKind::Linear, 10.0).denoise, 85.0);
        assert_eq!(table_opacities(PipelineKind::Linear, 40.0).sharpen, 55.0);
        assert_eq!(table_opacities(PipelineKind::NonLinear, 20.0).sharpen, 70.0);
        assert_eq!(table_opacities(PipelineKind::NonLinear, 80.0).denoise, 85.0);
        assert_eq!(table_opacities(PipelineKind::NonLinear, 27.0).sharpen, 70.0);
        assert_eq!(table_opacities(PipelineKind::NonLinear, 30.0).sharpen, 65.0);
    }

    #[test]
    fn degenerate_config_returns_blurred_scene() {
        let s = scene();
        let cfg = PipelineConfig {
            snr: f64::INFINITY,
            cfa: false,
            opacities: Some(Opacities {
                denoise: 0.0,
                sharpen: 0.0,
            }),
            ..Default::default()
        };
        let out = simulate_capture(&s, &cfg).unwrap();
        let blurred = gaussian_blur(&s, cfg.lens_sigma, cfg.boundary);
        assert_eq!(out.len(), 3);
        for o in &out {
            assert_eq!(o.image.data(), blurred.data(), "{}", o.stage);
        }
    }

    #[test]
    fn stages_are_ordered_and_shaped() {
        let s = scene();
        let out = simulate_capture(&s, &PipelineConfig::new(PipelineKind::NonLinear, 20.0)).unwrap();
        let stages: Vec<Stage> = out.iter().map(|o| o.stage).collect();
        assert_eq!(stages, Stage::ALL.to_vec());
        assert!(out.iter().all(|o| o.image.same_shape(&s)));
    }

    #[test]
    fn replicates_are_deterministic_and_distinct() {
        let s = scene();
        let cfg = PipelineConfig::new(PipelineKind::Linear, 10.0);
        let a = generate_replicates(&s, &cfg, 3, TargetKind::Pictorial, "x").unwrap();
        let b = generate_replicates(&s, &cfg, 3, TargetKind::Pictorial, "x").unwrap();
        assert_eq!(a, b);
        let reps = a.get(Stage::PostSharpen).replicates();
        assert_ne!(reps[0].data(), reps[1].data());
        let single = simulate_capture(&s, &cfg).unwrap();
        assert_eq!(single[2].image.data(), reps[0].data());
    }

    #[test]
    fn noiseless_replicates_are_identical() {
        let s = scene();
        let cfg = PipelineConfig::new(PipelineKind::NonLinear, f64::INFINITY);
        let a = generate_replicates(&s, &cfg, 3, TargetKind::Pictorial, "x").unwrap();
        for (_, set) in &a.sets {
            let r = set.replicates();
            assert_eq!(r[0], r[1]);
            assert_eq!(r[1], r[2]);
        }
    }

    #[test]
    fn blue_noise_is_scaled_relative_to_green() {
        let patch = generate_uniform_patch(0.3, 256, 256).unwrap();
        let cfg = PipelineConfig::new(PipelineKind::Linear, 40.0);
        let raw = sensor_capture(&patch, &cfg, &mut replicate_rng(1, 0)).unwrap();
        let (mut g, mut b) = (Vec::new(), Vec::new());
        for y in 0..256 {
            for x in 0..256 {
                match cfa_color(x, y) {
                    1 => g.push(raw.get(0, x, y)),
                    2 => b.push(raw.get(0, x, y)),
                    _ => {}
                }
            }
        }
        let sd = |v: &[f64]| {
            let m = v.iter().sum::<f64>() / v.len() as f64;
            (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
        };
        let ratio = sd(&b) / sd(&g);
        assert!((ratio - 3.3).abs() < 0.1, "ratio {ratio}");
    }

    #[test]
    fn nan_scene_is_rejected() {
        let mut s = scene();
        s.data_mut()[10] = f64::NAN;
        assert!(simulate_capture(&s, &PipelineConfig::default()).is_err());
    }

    #[test]
    fn knee_is_continuous_and_bounded() {
        assert_eq!(soft_knee(0.5, 0.98), 0.5);
        assert!((soft_knee(0.98 + 1e-9, 0.98) - 0.98).abs() < 1e-8);
        assert!(soft_knee(5.0, 0.98) <= 1.0);
        assert!(soft_knee(0.99, 0.98) < 0.99);
    }
}
