//! Image containers, luminance conversion, scene preparation, windowing and raster I/O.

mod image;
pub mod io;
mod resample;
mod window;

use thiserror::Error;

pub use self::image::{
    linear_to_srgb, srgb_to_linear, to_luminance, ColorEncoding, ImageMeta, PlanarImage, LUMA_WEIGHTS,
    MIN_SPECTRAL_SIDE,
};
pub use self::resample::{crop_center, prepare_scene, resize_bicubic};
pub use self::window::{taper_weights, window, window_power, Pedestal, WindowSpec, DEFAULT_TAPER};

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("unsupported channel count {0} (expected 1 or 3)")]
    Channels(usize),
    #[error("sample count {actual} does not match dimensions ({expected} expected)")]
    SampleCount { expected: usize, actual: usize },
    #[error("dimension error: {0}")]
    Dimensions(String),
    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, usize, usize),
        right: (usize, usize, usize),
    },
    #[error("image must be linear-encoded, found {0:?}")]
    Encoding(ColorEncoding),
    #[error("invalid window: {0}")]
    Window(String),
    #[error("raster format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
