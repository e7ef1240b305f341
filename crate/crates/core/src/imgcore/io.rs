//! Raster I/O: 8/16-bit PNG and TIFF through `image`, plus the lossless
//! `.sqmraw` float format used for replicate interchange.
//!
//! `.sqmraw` layout (all little-endian):
//!
//! ```text
//! b"SQMR" | u32 width | u32 height | u32 channels | f32 samples...
//! ```
//!
//! Samples are channel-planar, each plane row-major. Files are always
//! linear-encoded.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{ColorEncoding, ImageError, ImageMeta, PlanarImage};

pub const SQMRAW_MAGIC: &[u8; 4] = b"SQMR";

pub fn encode_sqmraw(img: &PlanarImage) -> Vec<u8> {
    let mut buf = Vec::with_capacity(16 + 4 * img.len());
    buf.extend_from_slice(SQMRAW_MAGIC);
    buf.extend_from_slice(&(img.width() as u32).to_le_bytes());
    buf.extend_from_slice(&(img.height() as u32).to_le_bytes());
    buf.extend_from_slice(&(img.channels() as u32).to_le_bytes());
    for &v in img.data() {
        buf.extend_from_slice(&(v as f32).to_le_bytes());
    }
    buf
}

pub fn decode_sqmraw(bytes: &[u8]) -> Result<PlanarImage, ImageError> {
    if bytes.len() < 16 || &bytes[..4] != SQMRAW_MAGIC {
        return Err(ImageError::Format("missing SQMR header".into()));
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap()) as usize;
    let (w, h, c) = (word(4), word(8), word(12));
    let body = &bytes[16..];
    let expected = w
        .checked_mul(h)
        .and_then(|n| n.checked_mul(c))
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| ImageError::Format("header dimensions overflow".into()))?;
    if body.len() != expected {
        return Err(ImageError::Format(format!(
            "expected {expected} sample bytes for {w}x{h}x{c}, found {}",
            body.len()
        )));
    }
    let data = body
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes(b.try_into().unwrap()) as f64)
        .collect();
    PlanarImage::new(w, h, c, data)
}

pub fn write_sqmraw(img: &PlanarImage, path: &Path) -> Result<(), ImageError> {
    img.require_linear()?;
    let mut f = BufWriter::new(File::create(path)?);
    f.write_all(&encode_sqmraw(img))?;
    f.flush()?;
    Ok(())
}

pub fn read_sqmraw(path: &Path) -> Result<PlanarImage, ImageError> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    decode_sqmraw(&bytes)
}

/// Loads a PNG or TIFF, scaling integer samples to `[0, 1]`.
///
/// Integer files carry no reliable transfer-function tag, so the caller states
/// the encoding; use [`PlanarImage::linearized`] before any measurement.
pub fn read_raster(path: &Path, encoding: ColorEncoding) -> Result<PlanarImage, ImageError> {
    let is_raw = path
        .extension()
        .map(|e| e.eq_ignore_ascii_case("sqmraw"))
        .unwrap_or(false);
    if is_raw {
        return read_sqmraw(path);
    }
    let dynimg = image::open(path).map_err(|e| ImageError::Format(e.to_string()))?;
    let color = dynimg.color();
    let bits = (color.bits_per_pixel() / color.channel_count() as u16) as u8;
    if bits != 8 && bits != 16 {
        return Err(ImageError::Format(format!("unsupported {bits}-bit samples")));
    }
    let (w, h) = (dynimg.width() as usize, dynimg.height() as usize);
    let img = if color.has_color() {
        let rgb = dynimg.to_rgb16();
        let raw = rgb.as_raw();
        let planes = (0..3)
            .map(|c| raw.iter().skip(c).step_by(3).map(|&v| v as f64 / 65535.0).collect())
            .collect();
        PlanarImage::from_planes(w, h, planes)?
    } else {
        let luma = dynimg.to_luma16();
        PlanarImage::new(w, h, 1, luma.as_raw().iter().map(|&v| v as f64 / 65535.0).collect())?
    };
    Ok(img.with_meta(ImageMeta {
        source_bit_depth: Some(bits),
        encoding,
        pixel_pitch_mm: None,
    }))
}

/// Writes a 16-bit PNG, clamping samples to `[0, 1]`. Samples are written as
/// stored; encode first if an sRGB file is wanted.
pub fn write_png16(img: &PlanarImage, path: &Path) -> Result<(), ImageError> {
    let (w, h) = (img.width() as u32, img.height() as u32);
    let q = |v: f64| (v.clamp(0.0, 1.0) * 65535.0).round() as u16;
    let result = if img.channels() == 1 {
        let buf: Vec<u16> = img.data().iter().map(|&v| q(v)).collect();
        image::ImageBuffer::<image::Luma<u16>, _>::from_raw(w, h, buf).map(|b| b.save(path))
    } else {
        let n = img.plane_len();
        let mut buf = Vec::with_capacity(3 * n);
        for i in 0..n {
            for c in 0..3 {
                buf.push(q(img.plane(c)[i]));
            }
        }
        image::ImageBuffer::<image::Rgb<u16>, _>::from_raw(w, h, buf).map(|b| b.save(path))
    };
    match result {
        Some(r) => r.map_err(|e| ImageError::Format(e.to_string())),
        None => Err(ImageError::Format("buffer size mismatch".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_is_bit_exact() {
        let img = PlanarImage::filled(3, 2, 1, 0.25).unwrap();
        let bytes = encode_sqmraw(&img);
        assert_eq!(&bytes[..4], b"SQMR");
        assert_eq!(&bytes[4..16], &[3, 0, 0, 0, 2, 0, 0, 0, 1, 0, 0, 0]);
        assert_eq!(&bytes[16..20], &0.25f32.to_le_bytes());
        assert_eq!(bytes.len(), 16 + 6 * 4);
    }

    #[test]
    fn truncated_body_is_rejected() {
        let img = PlanarImage::filled(4, 4, 3, 0.5).unwrap();
        let mut bytes = encode_sqmraw(&img);
        bytes.pop();
        assert!(matches!(decode_sqmraw(&bytes), Err(ImageError::Format(_))));
        assert!(decode_sqmraw(b"NOPE").is_err());
    }

    #[test]
    fn png_round_trip_16bit() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.png");
        let img = PlanarImage::from_planes(
            4,
            3,
            vec![vec![0.0; 12], (0..12).map(|i| i as f64 / 11.0).collect(), vec![1.0; 12]],
        )
        .unwrap();
        write_png16(&img, &path).unwrap();
        let back = read_raster(&path, ColorEncoding::Linear).unwrap();
        assert_eq!(back.meta.source_bit_depth, Some(16));
        for (a, b) in img.data().iter().zip(back.data()) {
            assert!((a - b).abs() <= 0.5 / 65535.0 + 1e-12);
        }
    }

    proptest! {
        // f32-representable samples survive the file format unchanged
        #[test]
        fn sqmraw_round_trip(w in 1usize..12, h in 1usize..12, three in any::<bool>(), seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let c = if three { 3 } else { 1 };
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let data = (0..w * h * c).map(|_| rng.gen::<f32>() as f64 * 2.0 - 0.5).collect();
            let img = PlanarImage::new(w, h, c, data).unwrap();
            let back = decode_sqmraw(&encode_sqmraw(&img)).unwrap();
            prop_assert_eq!(back, img);
        }
    }
}
