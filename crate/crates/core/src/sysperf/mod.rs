//! System performance measures: MTF from power spectra, NEQ, and the bundle
//! of curves that characterizes one capture system for one scene.

mod mtf;
mod neq;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use mtf::{
    gaussian_transfer, mean_pictorial_mtf, measure_mtf, measure_mtf_as, output_power_spectrum, signal_power_spectrum,
    MtfCurve, MtfVariant, SpectraPair,
};
pub use neq::{neq, NeqCurve};

use crate::imgcore::ImageError;
use crate::spectral::{NpsVariant, SpectralError, Spectrum1D};

#[derive(Debug, Error)]
pub enum SysperfError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("usage error: {0}")]
    Usage(String),
}

impl From<ImageError> for SysperfError {
    fn from(e: ImageError) -> Self {
        Self::Spectral(e.into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterizationProvenance {
    pub nps_variant: NpsVariant,
    pub mtf_variant: MtfVariant,
    pub scene_id: String,
    pub pipeline_id: String,
    pub snr: f64,
    pub replicate_count: usize,
}

/// NPS, MTF and NEQ of one system, with the mean signal they were measured at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemCharacterization {
    pub nps: Spectrum1D,
    pub mtf: MtfCurve,
    pub neq: NeqCurve,
    pub mu_a: f64,
    pub provenance: CharacterizationProvenance,
}

impl SystemCharacterization {
    pub fn new(
        nps: Spectrum1D,
        mtf: MtfCurve,
        mu_a: f64,
        provenance: CharacterizationProvenance,
    ) -> Result<Self, SysperfError> {
        let neq = neq(&mtf, &nps, mu_a)?;
        Ok(Self {
            nps,
            mtf,
            neq,
            mu_a,
            provenance,
        })
    }
}
