use serde::{Deserialize, Serialize};

use super::ImageError;

/// Minimum side length accepted by spectral operations.
pub const MIN_SPECTRAL_SIDE: usize = 8;

/// Rec. 709 / sRGB primaries to relative luminance.
pub const LUMA_WEIGHTS: [f64; 3] = [0.2126, 0.7152, 0.0722];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColorEncoding {
    Linear,
    Srgb,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageMeta {
    /// Bit depth of the file the samples came from, if any.
    pub source_bit_depth: Option<u8>,
    pub encoding: ColorEncoding,
    pub pixel_pitch_mm: Option<f64>,
}

impl Default for ImageMeta {
    fn default() -> Self {
        Self {
            source_bit_depth: None,
            encoding: ColorEncoding::Linear,
            pixel_pitch_mm: None,
        }
    }
}

/// Channel-planar floating-point raster.
///
/// Samples are stored plane by plane, each plane row-major. The working range
/// is linear relative intensity in `[0, 1]`, although intermediate results
/// (noise images, sharpened output) may leave it.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarImage {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f64>,
    pub meta: ImageMeta,
}

impl PlanarImage {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<f64>) -> Result<Self, ImageError> {
        if channels != 1 && channels != 3 {
            return Err(ImageError::Channels(channels));
        }
        if width == 0 || height == 0 {
            return Err(ImageError::Dimensions(format!("empty image {width}x{height}")));
        }
        let expected = width * height * channels;
        if data.len() != expected {
            return Err(ImageError::SampleCount {
                expected,
                actual: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
            meta: ImageMeta::default(),
        })
    }

    pub fn filled(width: usize, height: usize, channels: usize, value: f64) -> Result<Self, ImageError> {
        Self::new(width, height, channels, vec![value; width * height * channels])
    }

    /// Builds a single-channel image by evaluating `f(x, y)`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self, ImageError> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, 1, data)
    }

    pub fn from_planes(width: usize, height: usize, planes: Vec<Vec<f64>>) -> Result<Self, ImageError> {
        let channels = planes.len();
        let data: Vec<f64> = planes.into_iter().flatten().collect();
        Self::new(width, height, channels, data)
    }

    pub fn with_meta(mut self, meta: ImageMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn plane_len(&self) -> usize {
        self.width * self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn plane(&self, c: usize) -> &[f64] {
        let n = self.plane_len();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn plane_mut(&mut self, c: usize) -> &mut [f64] {
        let n = self.plane_len();
        &mut self.data[c * n..(c + 1) * n]
    }

    pub fn planes(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.plane_len())
    }

    /// Extracts channel `c` as a one-channel image with the same metadata.
    pub fn channel_image(&self, c: usize) -> PlanarImage {
        PlanarImage {
            width: self.width,
            height: self.height,
            channels: 1,
            data: self.plane(c).to_vec(),
            meta: self.meta.clone(),
        }
    }

    #[inline]
    pub fn get(&self, c: usize, x: usize, y: usize) -> f64 {
        self.data[c * self.plane_len() + y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, c: usize, x: usize, y: usize, v: f64) {
        let n = self.plane_len();
        self.data[c * n + y * self.width + x] = v;
    }

    pub fn same_shape(&self, other: &PlanarImage) -> bool {
        self.width == other.width && self.height == other.height && self.channels == other.channels
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.data.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / self.data.len() as f64
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> PlanarImage {
        PlanarImage {
            width: self.width,
            height: self.height,
            channels: self.channels,
            data: self.data.iter().map(|&v| f(v)).collect(),
            meta: self.meta.clone(),
        }
    }

    pub fn zip_map(&self, other: &PlanarImage, f: impl Fn(f64, f64) -> f64) -> Result<PlanarImage, ImageError> {
        if !self.same_shape(other) {
            return Err(ImageError::ShapeMismatch {
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(PlanarImage {
            width: self.width,
            height: self.height,
            channels: self.channels,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
            meta: self.meta.clone(),
        })
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.width, self.height, self.channels)
    }

    pub fn require_linear(&self) -> Result<(), ImageError> {
        match self.meta.encoding {
            ColorEncoding::Linear => Ok(()),
            other => Err(ImageError::Encoding(other)),
        }
    }

    pub fn require_spectral_size(&self) -> Result<(), ImageError> {
        if self.width < MIN_SPECTRAL_SIDE || self.height < MIN_SPECTRAL_SIDE {
            return Err(ImageError::Dimensions(format!(
                "{}x{} is below the {MIN_SPECTRAL_SIDE}x{MIN_SPECTRAL_SIDE} minimum for spectral analysis",
                self.width, self.height
            )));
        }
        Ok(())
    }

    /// Converts sRGB-encoded samples to linear intensity. Linear images pass through.
    pub fn linearized(&self) -> PlanarImage {
        match self.meta.encoding {
            ColorEncoding::Linear => self.clone(),
            ColorEncoding::Srgb => {
                let mut out = self.map(srgb_to_linear);
                out.meta.encoding = ColorEncoding::Linear;
                out
            }
        }
    }

    /// Applies the sRGB encoding curve, tagging the result as sRGB.
    pub fn srgb_encoded(&self) -> Result<PlanarImage, ImageError> {
        self.require_linear()?;
        let mut out = self.map(linear_to_srgb);
        out.meta.encoding = ColorEncoding::Srgb;
        Ok(out)
    }
}

pub fn srgb_to_linear(v: f64) -> f64 {
    if v <= 0.04045 {
        v / 12.92
    } else {
        ((v + 0.055) / 1.055).powf(2.4)
    }
}

pub fn linear_to_srgb(v: f64) -> f64 {
    let v = v.clamp(0.0, 1.0);
    if v <= 0.003_130_8 {
        v * 12.92
    } else {
        1.055 * v.powf(1.0 / 2.4) - 0.055
    }
}

/// Relative luminance of a linear image. One-channel input is returned unchanged.
pub fn to_luminance(img: &PlanarImage) -> Result<PlanarImage, ImageError> {
    img.require_linear()?;
    if img.channels() == 1 {
        return Ok(img.clone());
    }
    let n = img.plane_len();
    let (r, g, b) = (img.plane(0), img.plane(1), img.plane(2));
    let data = (0..n)
        .map(|i| LUMA_WEIGHTS[0] * r[i] + LUMA_WEIGHTS[1] * g[i] + LUMA_WEIGHTS[2] * b[i])
        .collect();
    let mut out = PlanarImage::new(img.width(), img.height(), 1, data)?;
    out.meta = img.meta.clone();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_channel_count() {
        assert!(matches!(
            PlanarImage::new(2, 2, 2, vec![0.0; 8]),
            Err(ImageError::Channels(2))
        ));
    }

    #[test]
    fn rejects_wrong_sample_count() {
        assert!(PlanarImage::new(4, 4, 3, vec![0.0; 47]).is_err());
    }

    #[test]
    fn gray_luminance_is_gray() {
        let img = PlanarImage::filled(8, 8, 3, 0.5).unwrap();
        let y = to_luminance(&img).unwrap();
        assert_eq!(y.channels(), 1);
        for &v in y.data() {
            assert!((v - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn single_channel_luminance_is_identity() {
        let img = PlanarImage::from_fn(9, 8, |x, y| (x * y) as f64 / 72.0).unwrap();
        assert_eq!(to_luminance(&img).unwrap(), img);
    }

    #[test]
    fn primaries_map_to_weights_summing_to_one() {
        let mut sum = 0.0;
        for c in 0..3 {
            let mut planes = vec![vec![0.0; 64]; 3];
            planes[c] = vec![1.0; 64];
            let img = PlanarImage::from_planes(8, 8, planes).unwrap();
            let y = to_luminance(&img).unwrap();
            assert!((y.data()[0] - LUMA_WEIGHTS[c]).abs() < 1e-15);
            sum += y.data()[0];
        }
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn srgb_input_is_refused() {
        let img = PlanarImage::filled(8, 8, 3, 0.5).unwrap().srgb_encoded().unwrap();
        assert!(matches!(
            to_luminance(&img),
            Err(ImageError::Encoding(ColorEncoding::Srgb))
        ));
    }

    #[test]
    fn srgb_round_trip() {
        for i in 0..=100 {
            let v = i as f64 / 100.0;
            assert!((srgb_to_linear(linear_to_srgb(v)) - v).abs() < 1e-12);
        }
    }
}
