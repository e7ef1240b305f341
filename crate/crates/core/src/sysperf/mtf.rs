//! Direct dead-leaves MTF and its scene-and-process-dependent variants.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::SysperfError;
use crate::imgcore::{to_luminance, PlanarImage};
use crate::spectral::{
    mean_curves, rotational_average, windowed_power_spectrum, FrequencyUnit, Normalization, NpsConfig, NpsVariant,
    ReplicateSet, Spectrum1D, TargetKind,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MtfVariant {
    DirectDeadLeaves,
    DeadLeavesSpd,
    PictorialSpd,
    MeanPictorialSpd,
    Analytic,
}

impl MtfVariant {
    /// The four measured variants, in table order.
    pub const MEASURED: [MtfVariant; 4] = [
        Self::DirectDeadLeaves,
        Self::DeadLeavesSpd,
        Self::PictorialSpd,
        Self::MeanPictorialSpd,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::DirectDeadLeaves => "direct-dead-leaves",
            Self::DeadLeavesSpd => "dead-leaves-spd",
            Self::PictorialSpd => "pictorial-spd",
            Self::MeanPictorialSpd => "mean-pictorial-spd",
            Self::Analytic => "analytic",
        }
    }

    /// Variant implied by the input target and the NPS used for noise subtraction.
    pub fn from_sources(input: TargetKind, nps: NpsVariant) -> Result<Self, SysperfError> {
        match (input, nps) {
            (TargetKind::DeadLeaves, NpsVariant::UniformPatch) => Ok(Self::DirectDeadLeaves),
            (TargetKind::DeadLeaves, NpsVariant::DeadLeavesSpd) => Ok(Self::DeadLeavesSpd),
            (TargetKind::Pictorial, NpsVariant::PictorialSpd) => Ok(Self::PictorialSpd),
            (input, nps) => Err(SysperfError::Usage(format!(
                "no MTF variant measures {} input with {nps} noise",
                input.as_str()
            ))),
        }
    }

    /// Target whose replicates feed a single measurement of this variant.
    pub fn source_target(&self) -> Option<TargetKind> {
        match self {
            Self::DirectDeadLeaves | Self::DeadLeavesSpd => Some(TargetKind::DeadLeaves),
            Self::PictorialSpd | Self::MeanPictorialSpd => Some(TargetKind::Pictorial),
            Self::Analytic => None,
        }
    }

    /// NPS variant subtracted when measuring this MTF.
    pub fn noise_variant(&self) -> Option<NpsVariant> {
        match self {
            Self::DirectDeadLeaves => Some(NpsVariant::UniformPatch),
            Self::DeadLeavesSpd => Some(NpsVariant::DeadLeavesSpd),
            Self::PictorialSpd | Self::MeanPictorialSpd => Some(NpsVariant::PictorialSpd),
            Self::Analytic => None,
        }
    }
}

impl std::fmt::Display for MtfVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for MtfVariant {
    type Err = SysperfError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::MEASURED
            .into_iter()
            .chain([Self::Analytic])
            .find(|v| v.as_str() == s)
            .ok_or_else(|| SysperfError::Usage(format!("unknown MTF variant {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MtfCurve {
    pub spectrum: Spectrum1D,
    pub variant: MtfVariant,
    /// Bins whose noise-subtracted output power was negative and set to zero.
    pub clamp_count: usize,
}

impl MtfCurve {
    pub fn new(spectrum: Spectrum1D, variant: MtfVariant, clamp_count: usize) -> Result<Self, SysperfError> {
        spectrum.validate()?;
        if let Some(i) = spectrum.values.iter().position(|&v| v < 0.0) {
            return Err(SysperfError::Domain(format!("negative MTF value at bin {i}")));
        }
        Ok(Self {
            spectrum,
            variant,
            clamp_count,
        })
    }

    /// Analytic Gaussian transfer `exp(-2 pi^2 s^2 u^2)` on the given grid.
    pub fn gaussian(frequencies: Vec<f64>, sigma_px: f64) -> Result<Self, SysperfError> {
        let values = frequencies.iter().map(|&u| gaussian_transfer(u, sigma_px)).collect();
        let s = Spectrum1D::new(
            frequencies,
            values,
            FrequencyUnit::CyclesPerPixel,
            MtfVariant::Analytic.as_str(),
            Normalization::Transfer,
        )?;
        Self::new(s, MtfVariant::Analytic, 0)
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.spectrum.frequencies
    }

    pub fn values(&self) -> &[f64] {
        &self.spectrum.values
    }

    /// Mean of the first three bins, a sanity figure that should sit near 1.
    pub fn low_frequency_level(&self) -> f64 {
        let n = self.spectrum.len().min(3);
        self.spectrum.values[..n].iter().sum::<f64>() / n as f64
    }

    pub fn is_plausible(&self) -> bool {
        (0.5..=1.5).contains(&self.low_frequency_level())
    }
}

pub fn gaussian_transfer(u: f64, sigma: f64) -> f64 {
    (-2.0 * std::f64::consts::PI.powi(2) * sigma * sigma * u * u).exp()
}

/// Input, output and noise spectra of one measurement, on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectraPair {
    pub input: Spectrum1D,
    pub output: Spectrum1D,
    pub nps: Spectrum1D,
    pub input_target: TargetKind,
    pub nps_variant: NpsVariant,
}

impl SpectraPair {
    pub fn new(
        input: Spectrum1D,
        output: Spectrum1D,
        nps: Spectrum1D,
        input_target: TargetKind,
        nps_variant: NpsVariant,
    ) -> Result<Self, SysperfError> {
        if !input.same_grid(&output) || !input.same_grid(&nps) {
            return Err(SysperfError::Shape(
                "input, output and noise spectra must share one frequency grid".into(),
            ));
        }
        Ok(Self {
            input,
            output,
            nps,
            input_target,
            nps_variant,
        })
    }
}

/// `MTF(u) = sqrt(max(0, PS_out - NPS) / PS_in)`, tagged by the pair's provenance.
pub fn measure_mtf(pair: &SpectraPair) -> Result<MtfCurve, SysperfError> {
    let variant = MtfVariant::from_sources(pair.input_target, pair.nps_variant)?;
    measure_mtf_as(pair, variant)
}

/// As [`measure_mtf`] but with an explicit variant tag.
pub fn measure_mtf_as(pair: &SpectraPair, variant: MtfVariant) -> Result<MtfCurve, SysperfError> {
    let mut clamp_count = 0;
    let mut values = Vec::with_capacity(pair.input.len());
    for i in 0..pair.input.len() {
        let ps_in = pair.input.values[i];
        if !(ps_in > 0.0) {
            return Err(SysperfError::Degenerate(format!(
                "input power {ps_in} at bin {i} ({} {})",
                pair.input.frequencies[i],
                pair.input.unit.as_str()
            )));
        }
        let num = pair.output.values[i] - pair.nps.values[i];
        if num < 0.0 {
            clamp_count += 1;
            values.push(0.0);
        } else {
            values.push((num / ps_in).sqrt());
        }
    }
    let s = pair
        .input
        .with_values(values, variant.as_str(), Normalization::Transfer);
    MtfCurve::new(s, variant, clamp_count)
}

/// Pointwise mean of per-scene pictorial MTFs.
pub fn mean_pictorial_mtf(curves: &[MtfCurve]) -> Result<MtfCurve, SysperfError> {
    let spectra: Vec<Spectrum1D> = curves.iter().map(|c| c.spectrum.clone()).collect();
    let mean = mean_curves(&spectra, MtfVariant::MeanPictorialSpd.as_str())?;
    let clamps = curves.iter().map(|c| c.clamp_count).sum();
    MtfCurve::new(mean, MtfVariant::MeanPictorialSpd, clamps)
}

/// Rotationally averaged, windowed luminance power spectrum of a single image.
pub fn signal_power_spectrum(img: &PlanarImage, cfg: &NpsConfig) -> Result<Spectrum1D, SysperfError> {
    let lum = to_luminance(img)?;
    let bins = cfg.bins_for(lum.width(), lum.height());
    let ps = windowed_power_spectrum(&lum, &cfg.signal_window()?)?;
    Ok(rotational_average(&ps, bins)?)
}

/// Mean of the per-replicate windowed output power spectra.
pub fn output_power_spectrum(reps: &ReplicateSet, cfg: &NpsConfig) -> Result<Spectrum1D, SysperfError> {
    let curves = reps
        .replicates()
        .par_iter()
        .map(|r| signal_power_spectrum(r, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(mean_curves(&curves, "")?)
}
