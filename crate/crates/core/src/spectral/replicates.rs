use serde::{Deserialize, Serialize};

use super::SpectralError;
use crate::imgcore::{to_luminance, PlanarImage};

/// Recommended replicate count for SPD measurements.
pub const RECOMMENDED_REPLICATES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetKind {
    Uniform,
    DeadLeaves,
    Pictorial,
}

impl TargetKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Uniform => "uniform",
            Self::DeadLeaves => "dead-leaves",
            Self::Pictorial => "pictorial",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub target: TargetKind,
    pub scene_id: String,
    pub pipeline_id: String,
    pub snr: f64,
}

/// Repeated captures of one scene through one system, differing only in noise.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateSet {
    replicates: Vec<PlanarImage>,
    pub provenance: Provenance,
}

impl ReplicateSet {
    pub fn new(replicates: Vec<PlanarImage>, provenance: Provenance) -> Result<Self, SpectralError> {
        if replicates.len() < 2 {
            return Err(SpectralError::Usage(format!(
                "a replicate set needs at least 2 captures, got {}",
                replicates.len()
            )));
        }
        let first = &replicates[0];
        for (i, r) in replicates.iter().enumerate().skip(1) {
            if !r.same_shape(first) {
                return Err(SpectralError::Shape(format!(
                    "replicate {i} is {:?}, replicate 0 is {:?}",
                    r.shape(),
                    first.shape()
                )));
            }
            if r.meta.encoding != first.meta.encoding {
                return Err(SpectralError::Shape(format!("replicate {i} has a different encoding")));
            }
        }
        Ok(Self { replicates, provenance })
    }

    pub fn replicates(&self) -> &[PlanarImage] {
        &self.replicates
    }

    pub fn len(&self) -> usize {
        self.replicates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.replicates.is_empty()
    }

    pub fn width(&self) -> usize {
        self.replicates[0].width()
    }

    pub fn height(&self) -> usize {
        self.replicates[0].height()
    }

    /// Pixelwise mean of the replicates' luminance.
    pub fn mean_luminance(&self) -> Result<PlanarImage, SpectralError> {
        let lums = self.luminances()?;
        Ok(mean_image(&lums))
    }

    pub fn luminances(&self) -> Result<Vec<PlanarImage>, SpectralError> {
        self.replicates
            .iter()
            .map(|r| to_luminance(r).map_err(SpectralError::from))
            .collect()
    }

    /// Mean linear luminance over all replicates and pixels.
    pub fn mean_signal(&self) -> Result<f64, SpectralError> {
        let lums = self.luminances()?;
        Ok(lums.iter().map(|l| l.mean()).sum::<f64>() / lums.len() as f64)
    }
}

pub(crate) fn mean_image(images: &[PlanarImage]) -> PlanarImage {
    let mut acc = images[0].clone();
    for img in &images[1..] {
        for (a, b) in acc.data_mut().iter_mut().zip(img.data()) {
            *a += b;
        }
    }
    let inv = 1.0 / images.len() as f64;
    acc.data_mut().iter_mut().for_each(|v| *v *= inv);
    acc
}

/// Per-replicate luminance noise field `g_k - mean(g)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseImage {
    image: PlanarImage,
    pub replicate_count: usize,
    /// Whether spectra estimated from this field should be scaled by `n / (n - 1)`.
    pub bias_corrected: bool,
}

impl NoiseImage {
    pub fn new(image: PlanarImage, replicate_count: usize, bias_corrected: bool) -> Result<Self, SpectralError> {
        if image.channels() != 1 {
            return Err(SpectralError::Usage("noise images are single-channel".into()));
        }
        Ok(Self {
            image,
            replicate_count,
            bias_corrected,
        })
    }

    pub fn image(&self) -> &PlanarImage {
        &self.image
    }

    pub fn samples(&self) -> &[f64] {
        self.image.data()
    }

    pub fn width(&self) -> usize {
        self.image.width()
    }

    pub fn height(&self) -> usize {
        self.image.height()
    }

    /// Factor that makes the mean-image estimator unbiased, `n / (n - 1)`, or 1.
    pub fn bias_factor(&self) -> f64 {
        if self.bias_corrected {
            let n = self.replicate_count as f64;
            n / (n - 1.0)
        } else {
            1.0
        }
    }

    pub fn rms(&self) -> f64 {
        let d = self.samples();
        (d.iter().map(|v| v * v).sum::<f64>() / d.len() as f64).sqrt()
    }
}

/// Noise images of every replicate against the replicate mean.
pub fn noise_images(reps: &ReplicateSet, bias_correction: bool) -> Result<Vec<NoiseImage>, SpectralError> {
    let lums = reps.luminances()?;
    let mean = mean_image(&lums);
    lums.into_iter()
        .map(|l| {
            let diff = l.zip_map(&mean, |a, b| a - b)?;
            NoiseImage::new(diff, reps.len(), bias_correction)
        })
        .collect()
}
