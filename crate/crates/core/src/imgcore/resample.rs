//! Separable bicubic resampling and scene preparation.

use super::{ImageError, PlanarImage};

/// Keys cubic convolution kernel with a = -0.5.
fn cubic(x: f64) -> f64 {
    const A: f64 = -0.5;
    let x = x.abs();
    if x <= 1.0 {
        ((A + 2.0) * x - (A + 3.0)) * x * x + 1.0
    } else if x < 2.0 {
        ((A * x - 5.0 * A) * x + 8.0 * A) * x - 4.0 * A
    } else {
        0.0
    }
}

/// Tap positions and normalized weights for one output sample.
struct Taps {
    first: isize,
    weights: Vec<f64>,
}

fn taps_for_axis(src_len: usize, dst_len: usize) -> Vec<Taps> {
    let scale = dst_len as f64 / src_len as f64;
    // widen the kernel when shrinking so the cubic acts as an anti-alias filter
    let kscale = scale.min(1.0);
    let support = 2.0 / kscale;
    (0..dst_len)
        .map(|i| {
            let center = (i as f64 + 0.5) / scale - 0.5;
            let first = (center - support).floor() as isize;
            let last = (center + support).ceil() as isize;
            let mut weights: Vec<f64> = (first..=last).map(|j| cubic((center - j as f64) * kscale)).collect();
            let sum: f64 = weights.iter().sum();
            weights.iter_mut().for_each(|w| *w /= sum);
            Taps { first, weights }
        })
        .collect()
}

fn resample_rows(src: &[f64], w: usize, h: usize, new_w: usize) -> Vec<f64> {
    let taps = taps_for_axis(w, new_w);
    let mut out = Vec::with_capacity(new_w * h);
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        for t in &taps {
            let mut acc = 0.0;
            for (k, wt) in t.weights.iter().enumerate() {
                let j = (t.first + k as isize).clamp(0, w as isize - 1) as usize;
                acc += wt * row[j];
            }
            out.push(acc);
        }
    }
    out
}

fn resample_cols(src: &[f64], w: usize, h: usize, new_h: usize) -> Vec<f64> {
    let taps = taps_for_axis(h, new_h);
    let mut out = vec![0.0; w * new_h];
    for (i, t) in taps.iter().enumerate() {
        let dst = &mut out[i * w..(i + 1) * w];
        for (k, wt) in t.weights.iter().enumerate() {
            let j = (t.first + k as isize).clamp(0, h as isize - 1) as usize;
            let src_row = &src[j * w..(j + 1) * w];
            for (d, s) in dst.iter_mut().zip(src_row) {
                *d += wt * s;
            }
        }
    }
    out
}

/// Bicubic resize of every channel to `new_w` x `new_h`.
pub fn resize_bicubic(img: &PlanarImage, new_w: usize, new_h: usize) -> Result<PlanarImage, ImageError> {
    if new_w == 0 || new_h == 0 {
        return Err(ImageError::Dimensions(format!("cannot resize to {new_w}x{new_h}")));
    }
    if new_w == img.width() && new_h == img.height() {
        return Ok(img.clone());
    }
    let planes = img
        .planes()
        .map(|p| {
            let rows = resample_rows(p, img.width(), img.height(), new_w);
            resample_cols(&rows, new_w, img.height(), new_h)
        })
        .collect();
    Ok(PlanarImage::from_planes(new_w, new_h, planes)?.with_meta(img.meta.clone()))
}

/// Center crop to `w` x `h`.
pub fn crop_center(img: &PlanarImage, w: usize, h: usize) -> Result<PlanarImage, ImageError> {
    if w > img.width() || h > img.height() {
        return Err(ImageError::Dimensions(format!(
            "crop {w}x{h} exceeds {}x{}",
            img.width(),
            img.height()
        )));
    }
    let x0 = (img.width() - w) / 2;
    let y0 = (img.height() - h) / 2;
    let planes = img
        .planes()
        .map(|p| {
            let mut out = Vec::with_capacity(w * h);
            for y in y0..y0 + h {
                out.extend_from_slice(&p[y * img.width() + x0..y * img.width() + x0 + w]);
            }
            out
        })
        .collect();
    Ok(PlanarImage::from_planes(w, h, planes)?.with_meta(img.meta.clone()))
}

/// Downsizes so the short side equals `side`, then center-crops to `side` x `side`.
pub fn prepare_scene(img: &PlanarImage, side: usize) -> Result<PlanarImage, ImageError> {
    let short = img.width().min(img.height());
    if short < side || side == 0 {
        return Err(ImageError::Dimensions(format!(
            "{}x{} is smaller than the requested {side}x{side} scene",
            img.width(),
            img.height()
        )));
    }
    let (new_w, new_h) = if img.width() <= img.height() {
        let h = (img.height() as f64 * side as f64 / img.width() as f64).round() as usize;
        (side, h.max(side))
    } else {
        let w = (img.width() as f64 * side as f64 / img.height() as f64).round() as usize;
        (w.max(side), side)
    };
    let resized = resize_bicubic(img, new_w, new_h)?;
    crop_center(&resized, side, side)
}
