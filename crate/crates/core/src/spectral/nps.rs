//! Noise power spectra: uniform-patch NPS and the replicate-based SPD-NPS family.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    default_bins, noise_images, rotational_average, windowed_power_spectrum, NoiseImage, ReplicateSet, SpectralError,
    Spectrum1D, TargetKind,
};
use crate::imgcore::{Pedestal, WindowSpec, DEFAULT_TAPER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NpsVariant {
    UniformPatch,
    DeadLeavesSpd,
    PictorialSpd,
    MeanPictorialSpd,
}

impl NpsVariant {
    pub const ALL: [NpsVariant; 4] = [
        Self::UniformPatch,
        Self::DeadLeavesSpd,
        Self::PictorialSpd,
        Self::MeanPictorialSpd,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::UniformPatch => "uniform-patch",
            Self::DeadLeavesSpd => "dead-leaves-spd",
            Self::PictorialSpd => "pictorial-spd",
            Self::MeanPictorialSpd => "mean-pictorial-spd",
        }
    }

    /// The capture target a single measurement of this variant is made from.
    pub fn source_target(&self) -> TargetKind {
        match self {
            Self::UniformPatch => TargetKind::Uniform,
            Self::DeadLeavesSpd => TargetKind::DeadLeaves,
            Self::PictorialSpd | Self::MeanPictorialSpd => TargetKind::Pictorial,
        }
    }
}

impl std::fmt::Display for NpsVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for NpsVariant {
    type Err = SpectralError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| SpectralError::Parse(format!("unknown NPS variant {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NpsConfig {
    /// Radial bin count; `None` picks one bin per eight pixels of the short side.
    pub bins: Option<usize>,
    pub taper: f64,
    pub bias_correction: bool,
}

impl Default for NpsConfig {
    fn default() -> Self {
        Self {
            bins: None,
            taper: DEFAULT_TAPER,
            bias_correction: true,
        }
    }
}

impl NpsConfig {
    pub fn bins_for(&self, width: usize, height: usize) -> usize {
        self.bins.unwrap_or_else(|| default_bins(width, height))
    }

    pub fn noise_window(&self) -> Result<WindowSpec, SpectralError> {
        Ok(WindowSpec::new(self.taper, Pedestal::Value(0.0))?)
    }

    pub fn signal_window(&self) -> Result<WindowSpec, SpectralError> {
        Ok(WindowSpec::new(self.taper, Pedestal::Mean)?)
    }
}

/// 1-D NPS averaged over a list of noise fields.
pub fn nps_from_noise(noise: &[NoiseImage], cfg: &NpsConfig) -> Result<Spectrum1D, SpectralError> {
    let first = noise
        .first()
        .ok_or_else(|| SpectralError::Usage("no noise images".into()))?;
    let bins = cfg.bins_for(first.width(), first.height());
    let win = cfg.noise_window()?;
    let curves: Vec<Spectrum1D> = noise
        .par_iter()
        .map(|n| {
            let ps = windowed_power_spectrum(n.image(), &win)?;
            let mut s = rotational_average(&ps, bins)?;
            let factor = n.bias_factor();
            s.values.iter_mut().for_each(|v| *v *= factor);
            Ok(s)
        })
        .collect::<Result<_, SpectralError>>()?;
    mean_curves(&curves, "")
}

/// Rotationally averaged NPS of a replicate set.
///
/// The variants differ only in which target the replicates were captured
/// from, so the provenance must match the requested variant.
pub fn measure_nps(reps: &ReplicateSet, variant: NpsVariant, cfg: &NpsConfig) -> Result<Spectrum1D, SpectralError> {
    if variant == NpsVariant::MeanPictorialSpd {
        return Err(SpectralError::Usage(
            "mean pictorial SPD-NPS is the mean of per-scene pictorial curves; use mean_pictorial_nps".into(),
        ));
    }
    if reps.provenance.target != variant.source_target() {
        return Err(SpectralError::Usage(format!(
            "{variant} needs {} replicates, got {}",
            variant.source_target().as_str(),
            reps.provenance.target.as_str()
        )));
    }
    let noise = noise_images(reps, cfg.bias_correction)?;
    let mut s = nps_from_noise(&noise, cfg)?;
    s.variant = variant.as_str().to_string();
    Ok(s)
}

/// Pointwise mean of curves, resampling onto the first curve's grid when needed.
pub fn mean_curves(curves: &[Spectrum1D], variant: &str) -> Result<Spectrum1D, SpectralError> {
    let first = curves
        .first()
        .ok_or_else(|| SpectralError::Usage("cannot average an empty list of curves".into()))?;
    let mut acc = vec![0.0; first.len()];
    for c in curves {
        if c.unit != first.unit {
            return Err(SpectralError::Shape("curves use different frequency units".into()));
        }
        if c.same_grid(first) {
            acc.iter_mut().zip(&c.values).for_each(|(a, v)| *a += v);
        } else {
            let r = c.resampled_to(&first.frequencies);
            acc.iter_mut().zip(&r.values).for_each(|(a, v)| *a += v);
        }
    }
    let inv = 1.0 / curves.len() as f64;
    acc.iter_mut().for_each(|a| *a *= inv);
    let variant = if variant.is_empty() {
        first.variant.as_str()
    } else {
        variant
    };
    Ok(first.with_values(acc, variant, first.normalization))
}

pub fn mean_pictorial_nps(curves: &[Spectrum1D]) -> Result<Spectrum1D, SpectralError> {
    mean_curves(curves, NpsVariant::MeanPictorialSpd.as_str())
}
