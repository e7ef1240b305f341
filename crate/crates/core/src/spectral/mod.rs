//! Fourier power spectra, rotational averaging, replicate noise images and
//! noise power spectrum measurement.

mod fft;
mod nps;
mod radial;
mod replicates;
mod spectrum;

use thiserror::Error;

pub use fft::{
    fft2_in_place, fft2_real, ifft2_real, power_spectrum_2d, power_spectrum_2d_with, windowed_power_spectrum,
};
pub use nps::{mean_curves, mean_pictorial_nps, measure_nps, nps_from_noise, NpsConfig, NpsVariant};
pub use radial::{default_bins, rotational_average, rotational_profile, RadialProfile, MIN_RADIAL_BINS};
pub use replicates::{noise_images, NoiseImage, Provenance, ReplicateSet, TargetKind, RECOMMENDED_REPLICATES};
pub use spectrum::{
    curve_from_json, curve_to_json, dft_frequency, read_curve_csv, write_curve_csv, FrequencyUnit, Normalization,
    Spectrum1D, Spectrum2D,
};

use crate::imgcore::ImageError;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
