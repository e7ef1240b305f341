//! Spatial filters on single planes: Gaussian, box, bilateral, guided filter,
//! unsharp masking and small dense kernels.

use serde::{Deserialize, Serialize};

use crate::imgcore::PlanarImage;

/// How filters read samples outside the image.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    /// Mirror about the edge sample (`-1 -> 1`).
    #[default]
    Reflect,
    /// Wrap around, treating the image as a torus.
    Periodic,
}

impl Boundary {
    #[inline]
    pub fn index(self, i: isize, n: usize) -> usize {
        let n = n as isize;
        match self {
            Self::Periodic => i.rem_euclid(n) as usize,
            Self::Reflect => {
                if n == 1 {
                    return 0;
                }
                let period = 2 * (n - 1);
                let mut m = i.rem_euclid(period);
                if m >= n {
                    m = period - m;
                }
                m as usize
            }
        }
    }
}

/// Normalized Gaussian taps with radius `ceil(3 sigma)`; `[1]` for `sigma <= 0`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    if sigma <= 0.0 {
        return vec![1.0];
    }
    let r = (3.0 * sigma).ceil().max(1.0) as isize;
    let mut k: Vec<f64> = (-r..=r)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let s: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= s);
    k
}

/// Separable convolution with odd-length, centered kernels.
pub fn convolve_separable(plane: &[f64], w: usize, h: usize, kx: &[f64], ky: &[f64], mode: Boundary) -> Vec<f64> {
    let rx = (kx.len() / 2) as isize;
    let ry = (ky.len() / 2) as isize;
    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        let row = &plane[y * w..(y + 1) * w];
        for x in 0..w {
            let mut acc = 0.0;
            for (j, &c) in kx.iter().enumerate() {
                acc += c * row[mode.index(x as isize + j as isize - rx, w)];
            }
            tmp[y * w + x] = acc;
        }
    }
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for (j, &c) in ky.iter().enumerate() {
            let sy = mode.index(y as isize + j as isize - ry, h);
            let src = &tmp[sy * w..(sy + 1) * w];
            let dst = &mut out[y * w..(y + 1) * w];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += c * s;
            }
        }
    }
    out
}

pub fn gaussian_blur_plane(plane: &[f64], w: usize, h: usize, sigma: f64, mode: Boundary) -> Vec<f64> {
    if sigma <= 0.0 {
        return plane.to_vec();
    }
    let k = gaussian_kernel(sigma);
    convolve_separable(plane, w, h, &k, &k, mode)
}

pub fn gaussian_blur(img: &PlanarImage, sigma: f64, mode: Boundary) -> PlanarImage {
    map_planes(img, |p, w, h| gaussian_blur_plane(p, w, h, sigma, mode))
}

/// Mean over the `(2r + 1)^2` window.
pub fn box_mean(plane: &[f64], w: usize, h: usize, r: usize, mode: Boundary) -> Vec<f64> {
    let k = vec![1.0 / (2 * r + 1) as f64; 2 * r + 1];
    convolve_separable(plane, w, h, &k, &k, mode)
}

/// Dense 2-D correlation with a square, odd-sized kernel given row-major.
pub fn correlate2d(plane: &[f64], w: usize, h: usize, kernel: &[f64], size: usize, mode: Boundary) -> Vec<f64> {
    debug_assert_eq!(kernel.len(), size * size);
    let r = (size / 2) as isize;
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for j in 0..size {
                let sy = mode.index(y as isize + j as isize - r, h);
                for i in 0..size {
                    let c = kernel[j * size + i];
                    if c != 0.0 {
                        acc += c * plane[sy * w + mode.index(x as isize + i as isize - r, w)];
                    }
                }
            }
            out[y * w + x] = acc;
        }
    }
    out
}

/// Bilateral filter with Gaussian spatial and range weights.
pub fn bilateral_plane(plane: &[f64], w: usize, h: usize, sigma_s: f64, sigma_r: f64, mode: Boundary) -> Vec<f64> {
    if sigma_s <= 0.0 || sigma_r <= 0.0 {
        return plane.to_vec();
    }
    let r = (2.0 * sigma_s).ceil() as isize;
    let size = (2 * r + 1) as usize;
    let mut spatial = Vec::with_capacity(size * size);
    for dy in -r..=r {
        for dx in -r..=r {
            spatial.push((-((dx * dx + dy * dy) as f64) / (2.0 * sigma_s * sigma_s)).exp());
        }
    }
    let inv_r = 1.0 / (2.0 * sigma_r * sigma_r);
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let center = plane[y * w + x];
            let (mut num, mut den) = (0.0, 0.0);
            let mut k = 0;
            for dy in -r..=r {
                let sy = mode.index(y as isize + dy, h);
                for dx in -r..=r {
                    let v = plane[sy * w + mode.index(x as isize + dx, w)];
                    let d = v - center;
                    let wgt = spatial[k] * (-d * d * inv_r).exp();
                    num += wgt * v;
                    den += wgt;
                    k += 1;
                }
            }
            out[y * w + x] = num / den;
        }
    }
    out
}

/// Guided image filter: local linear model `q = a I + b` fitted in `(2r+1)^2`
/// windows with regularization `eps`, coefficients averaged over windows.
pub fn guided_filter_plane(
    guide: &[f64],
    p: &[f64],
    w: usize,
    h: usize,
    r: usize,
    eps: f64,
    mode: Boundary,
) -> Vec<f64> {
    let mean_i = box_mean(guide, w, h, r, mode);
    let mean_p = box_mean(p, w, h, r, mode);
    let ip: Vec<f64> = guide.iter().zip(p).map(|(a, b)| a * b).collect();
    let ii: Vec<f64> = guide.iter().map(|a| a * a).collect();
    let corr_ip = box_mean(&ip, w, h, r, mode);
    let corr_ii = box_mean(&ii, w, h, r, mode);
    let mut a = vec![0.0; w * h];
    let mut b = vec![0.0; w * h];
    for i in 0..w * h {
        let var_i = corr_ii[i] - mean_i[i] * mean_i[i];
        let cov_ip = corr_ip[i] - mean_i[i] * mean_p[i];
        a[i] = cov_ip / (var_i + eps);
        b[i] = mean_p[i] - a[i] * mean_i[i];
    }
    let mean_a = box_mean(&a, w, h, r, mode);
    let mean_b = box_mean(&b, w, h, r, mode);
    (0..w * h).map(|i| mean_a[i] * guide[i] + mean_b[i]).collect()
}

/// `x + amount (x - G_sigma x)` per channel.
pub fn unsharp_mask(img: &PlanarImage, sigma: f64, amount: f64, mode: Boundary) -> PlanarImage {
    map_planes(img, |p, w, h| {
        let blurred = gaussian_blur_plane(p, w, h, sigma, mode);
        p.iter().zip(&blurred).map(|(x, b)| x + amount * (x - b)).collect()
    })
}

/// Self-guided filter detail boost per channel: `q + (1 + amount)(p - q)`.
pub fn guided_detail_boost(img: &PlanarImage, r: usize, eps: f64, amount: f64, mode: Boundary) -> PlanarImage {
    map_planes(img, |p, w, h| {
        let q = guided_filter_plane(p, p, w, h, r, eps, mode);
        p.iter()
            .zip(&q)
            .map(|(x, base)| base + (1.0 + amount) * (x - base))
            .collect()
    })
}

pub(crate) fn map_planes(img: &PlanarImage, f: impl Fn(&[f64], usize, usize) -> Vec<f64>) -> PlanarImage {
    let (w, h) = (img.width(), img.height());
    let planes: Vec<Vec<f64>> = img.planes().map(|p| f(p, w, h)).collect();
    PlanarImage::from_planes(w, h, planes)
        .expect("plane count and size preserved")
        .with_meta(img.meta.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(w: usize, h: usize) -> Vec<f64> {
        (0..w * h)
            .map(|i| ((i % w) as f64 * 0.37 + (i / w) as f64 * 0.11).sin())
            .collect()
    }

    #[test]
    fn boundary_indices() {
        let r: Vec<usize> = (-3..8).map(|i| Boundary::Reflect.index(i, 5)).collect();
        assert_eq!(r, vec![3, 2, 1, 0, 1, 2, 3, 4, 3, 2, 1]);
        let p: Vec<usize> = (-2..7).map(|i| Boundary::Periodic.index(i, 5)).collect();
        assert_eq!(p, vec![3, 4, 0, 1, 2, 3, 4, 0, 1]);
    }

    #[test]
    fn gaussian_kernel_normalized() {
        for s in [0.5, 1.0, 2.3] {
            let k = gaussian_kernel(s);
            assert!((k.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            assert_eq!(k.len() % 2, 1);
        }
        assert_eq!(gaussian_kernel(0.0), vec![1.0]);
    }

    #[test]
    fn periodic_blur_preserves_mean() {
        let p = ramp(32, 24);
        let b = gaussian_blur_plane(&p, 32, 24, 1.5, Boundary::Periodic);
        let m0 = p.iter().sum::<f64>();
        let m1 = b.iter().sum::<f64>();
        assert!((m0 - m1).abs() < 1e-9 * m0.abs().max(1.0));
    }

    #[test]
    fn constants_are_fixed_points() {
        let c = vec![0.42; 20 * 20];
        for out in [
            gaussian_blur_plane(&c, 20, 20, 1.2, Boundary::Reflect),
            box_mean(&c, 20, 20, 2, Boundary::Reflect),
            bilateral_plane(&c, 20, 20, 1.5, 0.05, Boundary::Reflect),
            guided_filter_plane(&c, &c, 20, 20, 2, 1e-3, Boundary::Reflect),
        ] {
            assert!(out.iter().all(|v| (v - 0.42).abs() < 1e-12));
        }
    }

    #[test]
    fn correlate_matches_separable() {
        let p = ramp(16, 12);
        let k1 = gaussian_kernel(0.7);
        let n = k1.len();
        let k2: Vec<f64> = (0..n * n).map(|i| k1[i / n] * k1[i % n]).collect();
        let a = convolve_separable(&p, 16, 12, &k1, &k1, Boundary::Reflect);
        let b = correlate2d(&p, 16, 12, &k2, n, Boundary::Reflect);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn bilateral_keeps_step_edges() {
        let (w, h) = (20, 8);
        let step: Vec<f64> = (0..w * h).map(|i| if i % w < 10 { 0.2 } else { 0.8 }).collect();
        let out = bilateral_plane(&step, w, h, 2.0, 0.02, Boundary::Reflect);
        for (a, b) in out.iter().zip(&step) {
            assert!((a - b).abs() < 1e-6);
        }
        let g = gaussian_blur_plane(&step, w, h, 2.0, Boundary::Reflect);
        assert!((g[9] - 0.2).abs() > 0.05);
    }

    #[test]
    fn guided_filter_with_tiny_eps_is_near_identity() {
        let p = ramp(16, 16);
        let q = guided_filter_plane(&p, &p, 16, 16, 1, 1e-9, Boundary::Reflect);
        for (a, b) in p.iter().zip(&q) {
            assert!((a - b).abs() < 1e-3);
        }
    }
}
