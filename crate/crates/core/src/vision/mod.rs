//! Viewing geometry, display model and contrast sensitivity functions.

mod csf;
mod env;

use thiserror::Error;

pub use csf::{
    barten_csf, jf_csf, normalize_csf, peak_normalized, sample_csf, BartenCsf, ContextualSensitivity,
    ContrastSensitivity, CsfKind, CsfModel, FlatCsf, InContext, JohnsonFairchildCsf, DEFAULT_NPS_VISUAL,
};
pub use env::{DisplayMtfModel, ViewingEnvironment};

#[derive(Debug, Error)]
pub enum VisionError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("shape error: {0}")]
    Shape(String),
}

/// Trapezoidal integral of `y` over the abscissae `x`.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}
