//! Separable raised-cosine (Tukey) edge taper.

use serde::{Deserialize, Serialize};

use super::{ImageError, PlanarImage};

pub const DEFAULT_TAPER: f64 = 0.125;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pedestal {
    /// Fade toward the mean of each plane.
    Mean,
    Value(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    taper: f64,
    pedestal: Pedestal,
}

impl WindowSpec {
    pub fn new(taper: f64, pedestal: Pedestal) -> Result<Self, ImageError> {
        if !(taper > 0.0 && taper <= 0.5) {
            return Err(ImageError::Window(format!("taper fraction {taper} outside (0, 0.5]")));
        }
        if let Pedestal::Value(v) = pedestal {
            if !(0.0..=1.0).contains(&v) {
                return Err(ImageError::Window(format!("pedestal {v} outside [0, 1]")));
            }
        }
        Ok(Self { taper, pedestal })
    }

    /// Default signal window: 12.5 % taper per edge toward the image mean.
    pub fn signal() -> Self {
        Self {
            taper: DEFAULT_TAPER,
            pedestal: Pedestal::Mean,
        }
    }

    /// Default noise window: same taper, fading to zero.
    pub fn noise() -> Self {
        Self {
            taper: DEFAULT_TAPER,
            pedestal: Pedestal::Value(0.0),
        }
    }

    pub fn taper(&self) -> f64 {
        self.taper
    }

    pub fn pedestal(&self) -> Pedestal {
        self.pedestal
    }

    pub fn with_taper(self, taper: f64) -> Result<Self, ImageError> {
        Self::new(taper, self.pedestal)
    }

    pub fn with_pedestal(self, pedestal: Pedestal) -> Result<Self, ImageError> {
        Self::new(self.taper, pedestal)
    }
}

impl Default for WindowSpec {
    fn default() -> Self {
        Self::signal()
    }
}

/// One-dimensional taper weights for `n` samples.
///
/// The ramp spans `2 * taper * d_max` samples from each edge, where `d_max` is
/// the largest distance to an edge, so the central sample always has weight 1
/// and the first and last samples have weight 0.
pub fn taper_weights(n: usize, taper: f64) -> Vec<f64> {
    let d_max = ((n.max(1) - 1) / 2) as f64;
    let ramp = 2.0 * taper * d_max;
    (0..n)
        .map(|i| {
            let d = i.min(n - 1 - i) as f64;
            if d >= ramp || ramp <= 0.0 {
                1.0
            } else {
                0.5 * (1.0 - (std::f64::consts::PI * d / ramp).cos())
            }
        })
        .collect()
}

/// Mean of the squared 2-D window weights, used to restore power after windowing.
pub fn window_power(width: usize, height: usize, taper: f64) -> f64 {
    let wx = taper_weights(width, taper);
    let wy = taper_weights(height, taper);
    let sx: f64 = wx.iter().map(|w| w * w).sum::<f64>() / width as f64;
    let sy: f64 = wy.iter().map(|w| w * w).sum::<f64>() / height as f64;
    sx * sy
}

/// Blends every plane toward the pedestal with the separable taper.
pub fn window(img: &PlanarImage, spec: &WindowSpec) -> PlanarImage {
    let (w, h) = (img.width(), img.height());
    let wx = taper_weights(w, spec.taper);
    let wy = taper_weights(h, spec.taper);
    let mut out = img.clone();
    for c in 0..img.channels() {
        let plane = out.plane_mut(c);
        let pedestal = match spec.pedestal {
            Pedestal::Mean => plane.iter().sum::<f64>() / plane.len() as f64,
            Pedestal::Value(v) => v,
        };
        for (y, row) in plane.chunks_exact_mut(w).enumerate() {
            for (x, v) in row.iter_mut().enumerate() {
                let weight = wx[x] * wy[y];
                *v = pedestal + weight * (*v - pedestal);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imgcore::to_luminance;
    use proptest::prelude::*;

    fn test_image(w: usize, h: usize) -> PlanarImage {
        PlanarImage::from_fn(w, h, |x, y| ((x * 7 + y * 13) % 17) as f64 / 17.0).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(WindowSpec::new(0.0, Pedestal::Mean).is_err());
        assert!(WindowSpec::new(0.6, Pedestal::Mean).is_err());
        assert!(WindowSpec::new(0.2, Pedestal::Value(1.5)).is_err());
        assert!(WindowSpec::new(0.5, Pedestal::Value(0.0)).is_ok());
    }

    #[test]
    fn pedestal_image_is_unchanged() {
        let img = PlanarImage::filled(32, 24, 1, 0.3).unwrap();
        let spec = WindowSpec::new(0.25, Pedestal::Value(0.3)).unwrap();
        assert_eq!(window(&img, &spec), img);
        let spec = WindowSpec::new(0.25, Pedestal::Mean).unwrap();
        let out = window(&img, &spec);
        for &v in out.data() {
            assert!((v - 0.3).abs() < 1e-12);
        }
    }

    #[test]
    fn center_and_corners() {
        for &(w, h) in &[(33, 33), (32, 32), (40, 17)] {
            let img = test_image(w, h);
            for &taper in &[0.05, 0.125, 0.5] {
                let spec = WindowSpec::new(taper, Pedestal::Value(0.5)).unwrap();
                let out = window(&img, &spec);
                let (cx, cy) = (w / 2, h / 2);
                assert_eq!(out.get(0, cx, cy), img.get(0, cx, cy), "{w}x{h} taper {taper}");
                for &(x, y) in &[(0, 0), (w - 1, 0), (0, h - 1), (w - 1, h - 1)] {
                    assert_eq!(out.get(0, x, y), 0.5);
                }
            }
        }
    }

    #[test]
    fn interior_untouched() {
        let img = test_image(64, 64);
        let out = window(&img, &WindowSpec::new(0.125, Pedestal::Value(0.0)).unwrap());
        // ramp length 2 * 0.125 * 31 = 7.75 samples
        for y in 8..56 {
            for x in 8..56 {
                assert_eq!(out.get(0, x, y), img.get(0, x, y));
            }
        }
        assert_ne!(out.get(0, 3, 30), img.get(0, 3, 30));
    }

    #[test]
    fn window_power_matches_direct_sum() {
        let (w, h, t) = (48, 30, 0.125);
        let wx = taper_weights(w, t);
        let wy = taper_weights(h, t);
        let mut direct = 0.0;
        for &vy in &wy {
            for &vx in &wx {
                direct += (vx * vy).powi(2);
            }
        }
        assert!((direct / (w * h) as f64 - window_power(w, h, t)).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn luminance_commutes_with_window(seed in any::<u64>(), taper in 0.01f64..0.5) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let data: Vec<f64> = (0..3 * 20 * 16).map(|_| rng.gen::<f64>()).collect();
            let img = PlanarImage::new(20, 16, 3, data).unwrap();
            let spec = WindowSpec::new(taper, Pedestal::Mean).unwrap();
            let a = to_luminance(&window(&img, &spec)).unwrap();
            let b = window(&to_luminance(&img).unwrap(), &spec);
            for (x, y) in a.data().iter().zip(b.data()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
