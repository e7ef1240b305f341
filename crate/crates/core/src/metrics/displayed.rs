use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::spectral::Spectrum1D;
use crate::sysperf::MtfCurve;
use crate::vision::ViewingEnvironment;

/// How the display MTF enters the displayed signal spectrum.
///
/// The printed signal formula carries an `^-1` on the squared display MTF while
/// the noise formula multiplies by it. `Multiply` treats both alike.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DisplaySignalReading {
    #[default]
    Multiply,
    Inverse,
}

/// Displayed signal and noise power on a cycles/degree grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisplayedSpectra {
    pub frequencies: Vec<f64>,
    pub signal: Vec<f64>,
    pub noise: Vec<f64>,
}

impl DisplayedSpectra {
    pub fn new(frequencies: Vec<f64>, signal: Vec<f64>, noise: Vec<f64>) -> Result<Self, MetricsError> {
        if signal.len() != frequencies.len() || noise.len() != frequencies.len() {
            return Err(MetricsError::Shape("signal, noise and grid lengths differ".into()));
        }
        if signal.iter().chain(&noise).any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(MetricsError::Domain(
                "displayed spectra must be finite and non-negative".into(),
            ));
        }
        Ok(Self {
            frequencies,
            signal,
            noise,
        })
    }
}

/// `S = PS_scene MTF^2 g^2 MTF_disp^2` and `N = NPS g^2 MTF_disp^2 + NPS_disp`.
pub fn displayed_spectra(
    scene_ps: &Spectrum1D,
    mtf: &MtfCurve,
    nps: &Spectrum1D,
    env: &ViewingEnvironment,
    reading: DisplaySignalReading,
) -> Result<DisplayedSpectra, MetricsError> {
    let scene = env.to_cpd(scene_ps);
    let m = env.to_cpd(&mtf.spectrum);
    let n = env.to_cpd(nps);
    if !scene.same_grid(&m) || !scene.same_grid(&n) {
        return Err(MetricsError::Shape(
            "scene spectrum, MTF and NPS must share one frequency grid".into(),
        ));
    }
    let g2 = env.display_gamma * env.display_gamma;
    let mut signal = Vec::with_capacity(scene.len());
    let mut noise = Vec::with_capacity(scene.len());
    for i in 0..scene.len() {
        let d = env.display_mtf(scene.frequencies[i]);
        let d2 = d * d;
        let disp_signal = match reading {
            DisplaySignalReading::Multiply => d2,
            DisplaySignalReading::Inverse => {
                if d2 == 0.0 {
                    return Err(MetricsError::Domain(format!(
                        "display MTF vanishes at {} cy/deg",
                        scene.frequencies[i]
                    )));
                }
                1.0 / d2
            }
        };
        let t = m.values[i];
        signal.push(scene.values[i] * t * t * g2 * disp_signal);
        noise.push(n.values[i] * g2 * d2 + env.display_nps);
    }
    DisplayedSpectra::new(scene.frequencies, signal, noise)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{FrequencyUnit, Normalization};
    use crate::sysperf::MtfVariant;
    use crate::vision::DisplayMtfModel;

    fn grid() -> Vec<f64> {
        (1..=10).map(|i| i as f64 * 0.04).collect()
    }

    fn curve(values: Vec<f64>, norm: Normalization) -> Spectrum1D {
        Spectrum1D::new(grid(), values, FrequencyUnit::CyclesPerPixel, "", norm).unwrap()
    }

    fn unit_mtf() -> MtfCurve {
        MtfCurve::new(curve(vec![1.0; 10], Normalization::Transfer), MtfVariant::Analytic, 0).unwrap()
    }

    fn identity_env() -> ViewingEnvironment {
        ViewingEnvironment {
            display_gamma: 1.0,
            display_mtf: DisplayMtfModel::Ideal,
            ..Default::default()
        }
    }

    #[test]
    fn identity_display_passes_spectra_through() {
        let ps: Vec<f64> = (1..=10).map(|i| 1.0 / i as f64).collect();
        let nps: Vec<f64> = (1..=10).map(|i| 1e-4 * i as f64).collect();
        let env = identity_env();
        let ds = displayed_spectra(
            &curve(ps.clone(), Normalization::PowerPerSample),
            &unit_mtf(),
            &curve(nps.clone(), Normalization::PowerPerSample),
            &env,
            DisplaySignalReading::Multiply,
        )
        .unwrap();
        assert_eq!(ds.signal, ps);
        assert_eq!(ds.noise, nps);
        assert!((ds.frequencies[0] - env.cpd_from_cpp(0.04)).abs() < 1e-12);
    }

    #[test]
    fn gamma_squared_law() {
        let ps = curve(vec![0.3; 10], Normalization::PowerPerSample);
        let nps = curve(vec![0.01; 10], Normalization::PowerPerSample);
        let a = displayed_spectra(
            &ps,
            &unit_mtf(),
            &nps,
            &ViewingEnvironment::default(),
            Default::default(),
        )
        .unwrap();
        let env2 = ViewingEnvironment {
            display_gamma: 4.4,
            ..Default::default()
        };
        let b = displayed_spectra(&ps, &unit_mtf(), &nps, &env2, Default::default()).unwrap();
        for i in 0..10 {
            assert!((b.signal[i] / a.signal[i] - 4.0).abs() < 1e-12);
            assert!((b.noise[i] / a.noise[i] - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn display_noise_is_additive() {
        let env = ViewingEnvironment {
            display_nps: 0.7,
            ..Default::default()
        };
        let ds = displayed_spectra(
            &curve(vec![1.0; 10], Normalization::PowerPerSample),
            &unit_mtf(),
            &curve(vec![0.0; 10], Normalization::PowerPerSample),
            &env,
            Default::default(),
        )
        .unwrap();
        assert!(ds.noise.iter().all(|&v| v == 0.7));
    }

    #[test]
    fn inverse_reading_divides() {
        let env = ViewingEnvironment {
            display_gamma: 1.0,
            ..Default::default()
        };
        let ps = curve(vec![1.0; 10], Normalization::PowerPerSample);
        let nps = curve(vec![1.0; 10], Normalization::PowerPerSample);
        let inv = displayed_spectra(&ps, &unit_mtf(), &nps, &env, DisplaySignalReading::Inverse).unwrap();
        for i in 0..10 {
            assert!((inv.signal[i] * inv.noise[i] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_mismatch() {
        let short = Spectrum1D::new(
            vec![0.1, 0.2],
            vec![1.0, 1.0],
            FrequencyUnit::CyclesPerPixel,
            "",
            Normalization::PowerPerSample,
        )
        .unwrap();
        let nps = curve(vec![1.0; 10], Normalization::PowerPerSample);
        assert!(matches!(
            displayed_spectra(&short, &unit_mtf(), &nps, &identity_env(), Default::default()),
            Err(MetricsError::Shape(_))
        ));
    }
}
