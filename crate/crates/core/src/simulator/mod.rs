//! Camera-pipeline simulation and test-target generation.

mod demosaic;
mod filters;
mod pipeline;
mod targets;

use thiserror::Error;

pub use demosaic::{cfa_color, demosaic_gradient, demosaic_malvar, mosaic};
pub use filters::{
    bilateral_plane, box_mean, convolve_separable, correlate2d, gaussian_blur, gaussian_blur_plane, gaussian_kernel,
    guided_detail_boost, guided_filter_plane, unsharp_mask, Boundary,
};
pub use pipeline::{
    blend, generate_replicates, sensor_capture, simulate_capture, table_opacities, DenoiseParams, Opacities,
    PipelineConfig, PipelineKind, SharpenParams, Stage, StageOutput, StageReplicates,
};
pub use targets::{
    generate_dead_leaves, generate_scene, generate_uniform_patch, synthetic_scenes, DeadLeavesParams, SceneKind,
    SCENE_RANGE,
};

use crate::imgcore::ImageError;
use crate::spectral::SpectralError;

#[derive(Debug, Error)]
pub enum SimulatorError {
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("target generation failed: {0}")]
    Generation(String),
    #[error("pipeline fault at {stage}: {detail}")]
    Fault { stage: &'static str, detail: String },
}

/// Mixes a root seed with a label into an independent 64-bit seed
/// (FNV-1a over the label, then a splitmix64 finalizer).
pub fn derive_seed(root: u64, label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = root ^ h.rotate_left(17);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
