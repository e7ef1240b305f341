//! Test targets: dead leaves, uniform patches and synthetic pictorial scenes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SimulatorError;
use crate::imgcore::PlanarImage;
use crate::spectral::{dft_frequency, fft2_in_place};

/// Disks painted per pixel of image area before giving up on full coverage.
const MAX_DISKS_PER_PIXEL: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DeadLeavesParams {
    pub r_min: f64,
    /// Largest radius; `None` uses a quarter of the shorter side.
    pub r_max: Option<f64>,
    /// Radii follow `pdf(r) ∝ r^-exponent`.
    pub exponent: f64,
    pub gray_range: (f64, f64),
    /// Upper bound on painted disks; `None` scales with image area.
    pub max_disks: Option<usize>,
    pub seed: u64,
}

impl Default for DeadLeavesParams {
    fn default() -> Self {
        Self {
            r_min: 1.0,
            r_max: None,
            exponent: 3.0,
            gray_range: (0.1, 0.9),
            max_disks: None,
            seed: 0,
        }
    }
}

impl DeadLeavesParams {
    pub fn radius_range(&self, width: usize, height: usize) -> (f64, f64) {
        let side = width.min(height) as f64;
        (self.r_min, self.r_max.unwrap_or(side / 4.0))
    }

    pub fn validate(&self, width: usize, height: usize) -> Result<(), SimulatorError> {
        let (r_min, r_max) = self.radius_range(width, height);
        let half = width.min(height) as f64 / 2.0;
        if width == 0 || height == 0 {
            return Err(SimulatorError::Config("dead leaves size must be non-zero".into()));
        }
        if !(r_min >= 1.0) || !(r_max >= r_min) || r_max > half {
            return Err(SimulatorError::Config(format!(
                "dead leaves radii need 1 <= r_min <= r_max <= {half}, got [{r_min}, {r_max}]"
            )));
        }
        if !(self.exponent > 1.0) {
            return Err(SimulatorError::Config(format!(
                "radius exponent must exceed 1, got {}",
                self.exponent
            )));
        }
        let (lo, hi) = self.gray_range;
        if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
            return Err(SimulatorError::Config(format!(
                "gray range [{lo}, {hi}] must lie in [0, 1]"
            )));
        }
        Ok(())
    }
}

/// Inverse-CDF draw from `pdf(r) ∝ r^-a` on `[r_min, r_max]`.
fn power_law_radius(u: f64, r_min: f64, r_max: f64, a: f64) -> f64 {
    if r_max <= r_min {
        return r_min;
    }
    let e = 1.0 - a;
    let lo = r_min.powf(e);
    let hi = r_max.powf(e);
    (lo + u * (hi - lo)).powf(1.0 / e)
}

/// Front-to-back painting: each disk fills only still-uncovered pixels whose
/// centers it contains, which is the same as painting back-to-front with the
/// disks in reverse order.
fn paint_disks<R: Rng>(
    width: usize,
    height: usize,
    params: &DeadLeavesParams,
    rng: &mut R,
    mut color: impl FnMut(&mut R) -> [f64; 3],
) -> Result<Vec<[f64; 3]>, SimulatorError> {
    let (r_min, r_max) = params.radius_range(width, height);
    let budget = params.max_disks.unwrap_or(MAX_DISKS_PER_PIXEL * width * height);
    let mut out = vec![[0.0; 3]; width * height];
    let mut covered = vec![false; width * height];
    let mut remaining = width * height;
    let mut drawn = 0usize;
    while remaining > 0 {
        if drawn >= budget {
            return Err(SimulatorError::Generation(format!(
                "{remaining} pixels still uncovered after {budget} disks"
            )));
        }
        drawn += 1;
        let r = power_law_radius(rng.gen::<f64>(), r_min, r_max, params.exponent);
        let cx = -r_max + rng.gen::<f64>() * (width as f64 + 2.0 * r_max);
        let cy = -r_max + rng.gen::<f64>() * (height as f64 + 2.0 * r_max);
        let c = color(rng);
        let x0 = (cx - r - 0.5).ceil().max(0.0) as usize;
        let y0 = (cy - r - 0.5).ceil().max(0.0) as usize;
        let x1 = ((cx + r - 0.5).floor()).min(width as f64 - 1.0);
        let y1 = ((cy + r - 0.5).floor()).min(height as f64 - 1.0);
        if x1 < 0.0 || y1 < 0.0 {
            continue;
        }
        let r2 = r * r;
        for y in y0..=y1 as usize {
            let dy = y as f64 + 0.5 - cy;
            for x in x0..=x1 as usize {
                let dx = x as f64 + 0.5 - cx;
                let i = y * width + x;
                if !covered[i] && dx * dx + dy * dy <= r2 {
                    covered[i] = true;
                    out[i] = c;
                    remaining -= 1;
                }
            }
        }
    }
    Ok(out)
}

fn rgb_image(width: usize, height: usize, px: &[[f64; 3]]) -> PlanarImage {
    let planes = (0..3).map(|c| px.iter().map(|p| p[c]).collect()).collect();
    PlanarImage::from_planes(width, height, planes).expect("three planes of w*h")
}

/// Gray dead-leaves target, replicated into three equal channels.
pub fn generate_dead_leaves(
    params: &DeadLeavesParams,
    width: usize,
    height: usize,
) -> Result<PlanarImage, SimulatorError> {
    params.validate(width, height)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let (lo, hi) = params.gray_range;
    let px = paint_disks(width, height, params, &mut rng, |rng| {
        let g = lo + (hi - lo) * rng.gen::<f64>();
        [g; 3]
    })?;
    Ok(rgb_image(width, height, &px))
}

/// Constant three-channel patch.
pub fn generate_uniform_patch(level: f64, width: usize, height: usize) -> Result<PlanarImage, SimulatorError> {
    if !(0.0..=1.0).contains(&level) {
        return Err(SimulatorError::Config(format!("patch level {level} outside [0, 1]")));
    }
    Ok(PlanarImage::filled(width, height, 3, level)?)
}

/// Kinds of procedurally generated pictorial scenes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SceneKind {
    /// Colored occluding disks.
    Leaves,
    /// Isotropic `1/f` texture with mild chroma.
    Texture,
    /// Overlapping translucent disks with slightly soft edges on a smooth background.
    Blobs,
    /// Superposed oriented sinusoidal gratings.
    Gratings,
    /// Hard-edged rectangles and disks on a gradient.
    Shapes,
    /// Shapes over texture.
    Mixed,
}

impl SceneKind {
    pub const ALL: [SceneKind; 6] = [
        Self::Leaves,
        Self::Texture,
        Self::Blobs,
        Self::Gratings,
        Self::Shapes,
        Self::Mixed,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Leaves => "leaves",
            Self::Texture => "texture",
            Self::Blobs => "blobs",
            Self::Gratings => "gratings",
            Self::Shapes => "shapes",
            Self::Mixed => "mixed",
        }
    }
}

impl std::fmt::Display for SceneKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SceneKind {
    type Err = SimulatorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| SimulatorError::Config(format!("unknown scene kind {s:?}")))
    }
}

/// Edge width of the blob profile in pixels.
const BLOB_EDGE: f64 = 0.5;

/// Range every synthetic scene is mapped into, away from black and clipping.
pub const SCENE_RANGE: (f64, f64) = (0.02, 0.9);

fn random_color<R: Rng>(rng: &mut R) -> [f64; 3] {
    let base = 0.1 + 0.8 * rng.gen::<f64>();
    let mut c = [0.0; 3];
    for v in c.iter_mut() {
        *v = (base * (0.6 + 0.8 * rng.gen::<f64>())).clamp(0.0, 1.0);
    }
    c
}

/// Real field with amplitude spectrum `|f|^-beta`, zero mean, unit variance.
fn power_law_field<R: Rng>(width: usize, height: usize, beta: f64, rng: &mut R) -> Vec<f64> {
    let mut buf: Vec<Complex64> = (0..width * height)
        .map(|_| Complex64::new(StandardNormal.sample(rng), 0.0))
        .collect();
    fft2_in_place(&mut buf, width, height, rustfft::FftDirection::Forward);
    for l in 0..height {
        let fy = dft_frequency(l, height);
        for k in 0..width {
            let fx = dft_frequency(k, width);
            let f = (fx * fx + fy * fy).sqrt();
            let g = if f == 0.0 { 0.0 } else { f.powf(-beta) };
            buf[l * width + k] *= g;
        }
    }
    fft2_in_place(&mut buf, width, height, rustfft::FftDirection::Inverse);
    let mut v: Vec<f64> = buf.into_iter().map(|c| c.re).collect();
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let sd = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n)
        .sqrt()
        .max(f64::MIN_POSITIVE);
    v.iter_mut().for_each(|x| *x = (*x - mean) / sd);
    v
}

fn texture_pixels<R: Rng>(width: usize, height: usize, rng: &mut R) -> Vec<[f64; 3]> {
    let luma = power_law_field(width, height, 1.0, rng);
    let chroma_a = power_law_field(width, height, 1.2, rng);
    let chroma_b = power_law_field(width, height, 1.2, rng);
    (0..width * height)
        .map(|i| {
            let l = 0.45 + 0.12 * luma[i];
            [l * (1.0 + 0.15 * chroma_a[i]), l, l * (1.0 + 0.15 * chroma_b[i])]
        })
        .collect()
}

fn blob_pixels<R: Rng>(width: usize, height: usize, rng: &mut R) -> Vec<[f64; 3]> {
    let (w, h) = (width as f64, height as f64);
    let tilt = [rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5];
    let mut px: Vec<[f64; 3]> = (0..width * height)
        .map(|i| {
            let x = (i % width) as f64 / w - 0.5;
            let y = (i / width) as f64 / h - 0.5;
            [0.35 + 0.2 * tilt[0] * x + 0.1 * y; 3]
        })
        .collect();
    let count = 24 + rng.gen_range(0..16);
    for _ in 0..count {
        let cx = rng.gen::<f64>() * w;
        let cy = rng.gen::<f64>() * h;
        let s = (0.02 + 0.1 * rng.gen::<f64>()) * w.min(h);
        let color = random_color(rng);
        let amp = if rng.gen::<bool>() { 0.6 } else { -0.4 };
        let reach = (s + 8.0).ceil() as isize;
        for y in (cy as isize - reach).max(0)..(cy as isize + reach).min(height as isize) {
            for x in (cx as isize - reach).max(0)..(cx as isize + reach).min(width as isize) {
                let d = ((x as f64 - cx).powi(2) + (y as f64 - cy).powi(2)).sqrt();
                // logistic edge about one pixel wide
                let g = amp / (1.0 + ((d - s) / BLOB_EDGE).exp());
                let p = &mut px[y as usize * width + x as usize];
                for c in 0..3 {
                    p[c] += g * color[c];
                }
            }
        }
    }
    px
}

fn grating_pixels<R: Rng>(width: usize, height: usize, rng: &mut R) -> Vec<[f64; 3]> {
    let comps: Vec<(f64, f64, f64, f64, [f64; 3])> = (0..5)
        .map(|_| {
            let theta = rng.gen::<f64>() * std::f64::consts::PI;
            // log-uniform frequency between 0.01 and 0.3 cycles/pixel
            let f = (0.01f64.ln() + rng.gen::<f64>() * (30f64).ln()).exp();
            let phase = rng.gen::<f64>() * std::f64::consts::TAU;
            let amp = 0.05 + 0.1 * rng.gen::<f64>();
            (theta, f, phase, amp, random_color(rng))
        })
        .collect();
    (0..width * height)
        .map(|i| {
            let (x, y) = ((i % width) as f64, (i / width) as f64);
            let mut p = [0.45; 3];
            for (theta, f, phase, amp, color) in &comps {
                let s = amp * (std::f64::consts::TAU * f * (x * theta.cos() + y * theta.sin()) + phase).sin();
                for c in 0..3 {
                    p[c] += s * (0.5 + color[c]);
                }
            }
            p
        })
        .collect()
}

fn paint_shapes<R: Rng>(px: &mut [[f64; 3]], width: usize, height: usize, count: usize, rng: &mut R) {
    let (w, h) = (width as f64, height as f64);
    for _ in 0..count {
        let color = random_color(rng);
        let cx = rng.gen::<f64>() * w;
        let cy = rng.gen::<f64>() * h;
        let a = (0.03 + 0.15 * rng.gen::<f64>()) * w.min(h);
        let b = (0.03 + 0.15 * rng.gen::<f64>()) * w.min(h);
        let disk = rng.gen::<bool>();
        for y in 0..height {
            let dy = y as f64 + 0.5 - cy;
            for x in 0..width {
                let dx = x as f64 + 0.5 - cx;
                let inside = if disk {
                    (dx / a).powi(2) + (dy / b).powi(2) <= 1.0
                } else {
                    dx.abs() <= a && dy.abs() <= b
                };
                if inside {
                    px[y * width + x] = color;
                }
            }
        }
    }
}

fn shape_pixels<R: Rng>(width: usize, height: usize, rng: &mut R) -> Vec<[f64; 3]> {
    let c0 = random_color(rng);
    let c1 = random_color(rng);
    let mut px: Vec<[f64; 3]> = (0..width * height)
        .map(|i| {
            let t = (i % width) as f64 / width as f64 * 0.5 + (i / width) as f64 / height as f64 * 0.5;
            [0, 1, 2].map(|c| c0[c] * (1.0 - t) + c1[c] * t)
        })
        .collect();
    let count = 12 + rng.gen_range(0..10);
    paint_shapes(&mut px, width, height, count, rng);
    px
}

fn mixed_pixels<R: Rng>(width: usize, height: usize, rng: &mut R) -> Vec<[f64; 3]> {
    let mut px = texture_pixels(width, height, rng);
    let count = 6 + rng.gen_range(0..6);
    paint_shapes(&mut px, width, height, count, rng);
    px
}

/// Affinely maps all samples into [`SCENE_RANGE`].
fn normalize_range(px: &mut [[f64; 3]]) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in px.iter() {
        for v in p {
            lo = lo.min(*v);
            hi = hi.max(*v);
        }
    }
    let (a, b) = SCENE_RANGE;
    let span = hi - lo;
    for p in px.iter_mut() {
        for v in p.iter_mut() {
            *v = if span > 0.0 {
                a + (b - a) * (*v - lo) / span
            } else {
                0.5 * (a + b)
            };
        }
    }
}

/// Linear-encoded three-channel scene in [`SCENE_RANGE`], deterministic per seed.
pub fn generate_scene(kind: SceneKind, width: usize, height: usize, seed: u64) -> Result<PlanarImage, SimulatorError> {
    if width < 8 || height < 8 {
        return Err(SimulatorError::Config(format!("scene size {width}x{height} too small")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut px = match kind {
        SceneKind::Leaves => {
            let params = DeadLeavesParams {
                r_max: Some(width.min(height) as f64 / 8.0),
                seed: rng.gen(),
                ..Default::default()
            };
            paint_disks(width, height, &params, &mut rng, random_color)?
        }
        SceneKind::Texture => texture_pixels(width, height, &mut rng),
        SceneKind::Blobs => blob_pixels(width, height, &mut rng),
        SceneKind::Gratings => grating_pixels(width, height, &mut rng),
        SceneKind::Shapes => shape_pixels(width, height, &mut rng),
        SceneKind::Mixed => mixed_pixels(width, height, &mut rng),
    };
    normalize_range(&mut px);
    Ok(rgb_image(width, height, &px))
}

/// `count` scenes cycling through every kind, with ids like `texture-02`.
pub fn synthetic_scenes(count: usize, size: usize, seed: u64) -> Result<Vec<(String, PlanarImage)>, SimulatorError> {
    (0..count)
        .map(|i| {
            let kind = SceneKind::ALL[i % SceneKind::ALL.len()];
            let img = generate_scene(
                kind,
                size,
                size,
                seed.wrapping_add(i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
            )?;
            Ok((format!("{}-{:02}", kind.as_str(), i), img))
        })
        .collect()
}
