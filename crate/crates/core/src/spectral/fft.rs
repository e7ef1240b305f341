//! 2-D discrete Fourier transforms and power spectra.

use rustfft::num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use super::{Normalization, SpectralError, Spectrum2D};
use crate::imgcore::{window, window_power, PlanarImage, WindowSpec};

/// In-place unnormalized 2-D DFT of a row-major `width` x `height` buffer.
pub fn fft2_in_place(data: &mut [Complex64], width: usize, height: usize, direction: FftDirection) {
    assert_eq!(data.len(), width * height);
    let mut planner = FftPlanner::<f64>::new();
    let row_fft = planner.plan_fft(width, direction);
    row_fft.process(data);

    let col_fft = planner.plan_fft(height, direction);
    let mut column = vec![Complex64::new(0.0, 0.0); height];
    for x in 0..width {
        for (y, c) in column.iter_mut().enumerate() {
            *c = data[y * width + x];
        }
        col_fft.process(&mut column);
        for (y, c) in column.iter().enumerate() {
            data[y * width + x] = *c;
        }
    }
}

pub fn fft2_real(samples: &[f64], width: usize, height: usize) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft2_in_place(&mut buf, width, height, FftDirection::Forward);
    buf
}

/// Inverse transform including the `1 / (M N)` factor; returns the real part.
pub fn ifft2_real(mut spectrum: Vec<Complex64>, width: usize, height: usize) -> Vec<f64> {
    fft2_in_place(&mut spectrum, width, height, FftDirection::Inverse);
    let scale = 1.0 / (width * height) as f64;
    spectrum.into_iter().map(|c| c.re * scale).collect()
}

/// `|DFT|^2 / (M N)` of a one-channel image with its spatial mean removed.
pub fn power_spectrum_2d(img: &PlanarImage) -> Result<Spectrum2D, SpectralError> {
    power_spectrum_2d_with(img, true)
}

pub fn power_spectrum_2d_with(img: &PlanarImage, subtract_mean: bool) -> Result<Spectrum2D, SpectralError> {
    if img.channels() != 1 {
        return Err(SpectralError::Usage(format!(
            "power spectrum needs one channel, got {}",
            img.channels()
        )));
    }
    img.require_linear()?;
    img.require_spectral_size()?;
    let (w, h) = (img.width(), img.height());
    let mean = if subtract_mean { img.mean() } else { 0.0 };
    let centered: Vec<f64> = img.data().iter().map(|v| v - mean).collect();
    let f = fft2_real(&centered, w, h);
    let norm = 1.0 / (w * h) as f64;
    Ok(Spectrum2D {
        width: w,
        height: h,
        values: f.iter().map(|c| c.norm_sqr() * norm).collect(),
        normalization: Normalization::PowerPerSample,
    })
}

/// Power spectrum of the windowed image, rescaled by the window's mean square
/// so a stationary field keeps its unwindowed power level.
pub fn windowed_power_spectrum(img: &PlanarImage, spec: &WindowSpec) -> Result<Spectrum2D, SpectralError> {
    let windowed = window(img, spec);
    let mut ps = power_spectrum_2d(&windowed)?;
    ps.scale(1.0 / window_power(img.width(), img.height(), spec.taper()));
    Ok(ps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};
    use std::f64::consts::PI;

    /// Textbook O(N^4) DFT power, the independent route for the checks below.
    fn direct_dft_power(img: &PlanarImage) -> Vec<f64> {
        let (w, h) = (img.width(), img.height());
        let mut out = vec![0.0; w * h];
        for l in 0..h {
            for k in 0..w {
                let (mut re, mut im) = (0.0, 0.0);
                for y in 0..h {
                    for x in 0..w {
                        let phase = -2.0 * PI * (k as f64 * x as f64 / w as f64 + l as f64 * y as f64 / h as f64);
                        let v = img.get(0, x, y);
                        re += v * phase.cos();
                        im += v * phase.sin();
                    }
                }
                out[l * w + k] = (re * re + im * im) / (w * h) as f64;
            }
        }
        out
    }

    #[test]
    fn zero_image_zero_spectrum() {
        let img = PlanarImage::filled(16, 16, 1, 0.0).unwrap();
        assert!(power_spectrum_2d(&img).unwrap().values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn cosine_energy_lands_in_the_pair() {
        let (n, k, a) = (16usize, 3usize, 0.2);
        let img = PlanarImage::from_fn(n, n, |x, _| a * (2.0 * PI * k as f64 * x as f64 / n as f64).cos()).unwrap();
        let ps = power_spectrum_2d(&img).unwrap();
        let oracle = direct_dft_power(&img);
        for (i, (got, want)) in ps.values.iter().zip(&oracle).enumerate() {
            assert!((got - want).abs() < 1e-12, "bin {i}");
        }
        let expected_each = a * a * (n * n) as f64 / 4.0;
        assert!((ps.get(k, 0) - expected_each).abs() < 1e-10);
        assert!((ps.get(n - k, 0) - expected_each).abs() < 1e-10);
        assert!((ps.total() - a * a * (n * n) as f64 / 2.0).abs() < 1e-10);
        for l in 0..n {
            for kk in 0..n {
                if l == 0 && (kk == k || kk == n - k) {
                    continue;
                }
                assert!(ps.get(kk, l) < 1e-10);
            }
        }
    }

    #[test]
    fn matches_direct_dft_on_random_non_square() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let normal = Normal::new(0.0, 1.0).unwrap();
        let img = PlanarImage::from_fn(12, 9, |_, _| normal.sample(&mut rng)).unwrap();
        let ps = power_spectrum_2d_with(&img, false).unwrap();
        for (got, want) in ps.values.iter().zip(direct_dft_power(&img)) {
            assert!((got - want).abs() < 1e-9 * want.max(1.0));
        }
    }

    #[test]
    fn parseval_identity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let normal = Normal::new(0.3, 0.05).unwrap();
        let img = PlanarImage::from_fn(64, 48, |_, _| normal.sample(&mut rng)).unwrap();
        let ps = power_spectrum_2d(&img).unwrap();
        let m = img.mean();
        let energy: f64 = img.data().iter().map(|v| (v - m) * (v - m)).sum();
        assert!((ps.total() - energy).abs() / energy < 1e-9);
        assert!(ps.dc() < 1e-20);
    }

    #[test]
    fn inverse_round_trip() {
        let data: Vec<f64> = (0..40).map(|i| (i as f64 * 0.37).sin()).collect();
        let back = ifft2_real(fft2_real(&data, 8, 5), 8, 5);
        for (a, b) in data.iter().zip(back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn small_and_multichannel_inputs_are_rejected() {
        assert!(power_spectrum_2d(&PlanarImage::filled(7, 16, 1, 0.0).unwrap()).is_err());
        assert!(power_spectrum_2d(&PlanarImage::filled(16, 16, 3, 0.0).unwrap()).is_err());
    }
}
