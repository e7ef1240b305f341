use super::{FrequencyUnit, SpectralError, Spectrum1D, Spectrum2D};

pub const MIN_RADIAL_BINS: usize = 4;

/// Default bin count: one bin per eight pixels of the short side (64 at 512^2).
pub fn default_bins(width: usize, height: usize) -> usize {
    (width.min(height) / 8).max(MIN_RADIAL_BINS)
}

/// Annular averages together with the number of 2-D samples in each annulus.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub spectrum: Spectrum1D,
    pub counts: Vec<usize>,
}

/// Rotational average over annuli of width `0.5 / bins` cycles/pixel.
///
/// DC and samples beyond 0.5 cycles/pixel are excluded; annuli without samples
/// are dropped. Frequencies are annulus centers.
pub fn rotational_average(sp: &Spectrum2D, bins: usize) -> Result<Spectrum1D, SpectralError> {
    rotational_profile(sp, bins).map(|p| p.spectrum)
}

pub fn rotational_profile(sp: &Spectrum2D, bins: usize) -> Result<RadialProfile, SpectralError> {
    if bins < MIN_RADIAL_BINS {
        return Err(SpectralError::Config(format!(
            "radial bin count {bins} below minimum {MIN_RADIAL_BINS}"
        )));
    }
    let width = 0.5 / bins as f64;
    let mut sums = vec![0.0; bins];
    let mut counts = vec![0usize; bins];
    for l in 0..sp.height {
        for k in 0..sp.width {
            if k == 0 && l == 0 {
                continue;
            }
            let (u, v) = sp.frequency(k, l);
            let r = (u * u + v * v).sqrt();
            let idx = (r / width) as usize;
            if idx < bins {
                sums[idx] += sp.get(k, l);
                counts[idx] += 1;
            }
        }
    }
    let mut freqs = Vec::new();
    let mut values = Vec::new();
    let mut kept = Vec::new();
    for i in 0..bins {
        if counts[i] > 0 {
            freqs.push((i as f64 + 0.5) * width);
            values.push(sums[i] / counts[i] as f64);
            kept.push(counts[i]);
        }
    }
    let spectrum = Spectrum1D::new(freqs, values, FrequencyUnit::CyclesPerPixel, "", sp.normalization)?;
    Ok(RadialProfile { spectrum, counts: kept })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Normalization;

    fn analytic(n: usize, f: impl Fn(f64) -> f64) -> Spectrum2D {
        let mut sp = Spectrum2D {
            width: n,
            height: n,
            values: vec![0.0; n * n],
            normalization: Normalization::PowerPerSample,
        };
        for l in 0..n {
            for k in 0..n {
                let (u, v) = sp.frequency(k, l);
                sp.values[l * n + k] = f((u * u + v * v).sqrt());
            }
        }
        sp
    }

    #[test]
    fn flat_spectrum_is_flat() {
        let sp = analytic(64, |_| 2.5);
        let s = rotational_average(&sp, 16).unwrap();
        assert_eq!(s.len(), 16);
        assert!(s.values.iter().all(|&v| (v - 2.5).abs() < 1e-14));
    }

    #[test]
    fn gaussian_profile_recovered() {
        let sp = analytic(128, |r| (-r * r).exp());
        let s = rotational_average(&sp, 32).unwrap();
        for (f, v) in s.frequencies.iter().zip(&s.values) {
            if *f <= 0.4 {
                let expected = (-f * f).exp();
                assert!((v - expected).abs() / expected < 0.02, "f={f}");
            }
        }
    }

    #[test]
    fn too_few_bins() {
        let sp = analytic(16, |_| 1.0);
        assert!(matches!(rotational_average(&sp, 3), Err(SpectralError::Config(_))));
    }

    #[test]
    fn dc_excluded_and_centers_reported() {
        let mut sp = analytic(32, |_| 0.0);
        sp.values[0] = 1e6;
        let s = rotational_average(&sp, 8).unwrap();
        assert!(s.values.iter().all(|&v| v == 0.0));
        assert!((s.frequencies[0] - 0.5 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn count_weighted_mean_equals_annular_sample_mean() {
        let sp = analytic(40, |r| 1.0 / (0.01 + r));
        let p = rotational_profile(&sp, 10).unwrap();
        let weighted: f64 = p
            .spectrum
            .values
            .iter()
            .zip(&p.counts)
            .map(|(v, &c)| v * c as f64)
            .sum();
        let mut direct = 0.0;
        for l in 0..40 {
            for k in 0..40 {
                let (u, v) = sp.frequency(k, l);
                let r = (u * u + v * v).sqrt();
                if (k, l) != (0, 0) && r < 0.5 {
                    direct += sp.get(k, l);
                }
            }
        }
        assert!((weighted - direct).abs() / direct < 1e-12);
    }

    #[test]
    fn cosine_pair_occupies_one_annulus() {
        use crate::imgcore::PlanarImage;
        use crate::spectral::power_spectrum_2d;
        let (n, k) = (16usize, 3usize);
        let img = PlanarImage::from_fn(n, n, |x, _| {
            0.2 * (2.0 * std::f64::consts::PI * k as f64 * x as f64 / n as f64).cos()
        })
        .unwrap();
        let s = rotational_average(&power_spectrum_2d(&img).unwrap(), 8).unwrap();
        let nonzero: Vec<usize> = (0..s.len()).filter(|&i| s.values[i] > 1e-10).collect();
        assert_eq!(nonzero.len(), 1);
        let i = nonzero[0];
        let half = 0.5 / 8.0 / 2.0;
        let target = k as f64 / n as f64;
        assert!((s.frequencies[i] - target).abs() <= half + 1e-12);
    }

    #[test]
    fn default_bin_rule() {
        assert_eq!(default_bins(512, 512), 64);
        assert_eq!(default_bins(256, 300), 32);
        assert_eq!(default_bins(16, 16), MIN_RADIAL_BINS);
    }
}
