use serde::{Deserialize, Serialize};

use super::VisionError;
use crate::spectral::{FrequencyUnit, Spectrum1D};

/// Display MTF model, evaluated in cycles/degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DisplayMtfModel {
    /// Full pixel aperture: `|sinc(pi u / (2 u_N))|`, equal to `2/pi` at the display Nyquist.
    ApertureSinc,
    /// Perfect display, MTF 1 everywhere.
    Ideal,
    /// Measured or externally modelled curve in cycles/degree, held flat past its ends.
    Tabulated { frequencies: Vec<f64>, values: Vec<f64> },
}

impl DisplayMtfModel {
    pub fn evaluate(&self, u_cpd: f64, nyquist_cpd: f64) -> f64 {
        match self {
            Self::ApertureSinc => {
                let x = std::f64::consts::PI * u_cpd / (2.0 * nyquist_cpd);
                if x.abs() < 1e-12 {
                    1.0
                } else {
                    (x.sin() / x).abs()
                }
            }
            Self::Ideal => 1.0,
            Self::Tabulated { frequencies, values } => {
                match Spectrum1D::new(
                    frequencies.clone(),
                    values.clone(),
                    FrequencyUnit::CyclesPerDegree,
                    "display",
                    crate::spectral::Normalization::Transfer,
                ) {
                    Ok(s) => s.interpolate(u_cpd),
                    Err(_) => f64::NAN,
                }
            }
        }
    }
}

/// Display and observer geometry shared by all visual computations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ViewingEnvironment {
    pub distance_cm: f64,
    pub pixel_pitch_mm: f64,
    /// White-point luminance, cd/m^2.
    pub white_luminance: f64,
    pub display_gamma: f64,
    /// Integration cutoff in cycles/degree; the display Nyquist when unset.
    pub u_max: Option<f64>,
    /// Angular stimulus size for the Barten CSF; the angle of `image_side` pixels when unset.
    pub field_size_deg: Option<f64>,
    pub image_side: usize,
    pub display_mtf: DisplayMtfModel,
    /// Display noise power, constant over frequency.
    pub display_nps: f64,
}

impl Default for ViewingEnvironment {
    fn default() -> Self {
        Self {
            distance_cm: 60.0,
            pixel_pitch_mm: 0.27,
            white_luminance: 120.0,
            display_gamma: 2.2,
            u_max: None,
            field_size_deg: None,
            image_side: 512,
            display_mtf: DisplayMtfModel::ApertureSinc,
            display_nps: 0.0,
        }
    }
}

impl ViewingEnvironment {
    pub fn validate(&self) -> Result<(), VisionError> {
        let positive = [
            ("distance_cm", self.distance_cm),
            ("pixel_pitch_mm", self.pixel_pitch_mm),
            ("white_luminance", self.white_luminance),
            ("display_gamma", self.display_gamma),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(VisionError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if let Some(u) = self.u_max {
            if !(u > 0.0 && u.is_finite()) {
                return Err(VisionError::Config(format!("u_max must be positive, got {u}")));
            }
        }
        if let Some(f) = self.field_size_deg {
            if !(f > 0.0 && f.is_finite()) {
                return Err(VisionError::Config(format!("field_size_deg must be positive, got {f}")));
            }
        }
        if !(self.display_nps >= 0.0 && self.display_nps.is_finite()) {
            return Err(VisionError::Config("display_nps must be non-negative".into()));
        }
        if let DisplayMtfModel::Tabulated { frequencies, values } = &self.display_mtf {
            Spectrum1D::new(
                frequencies.clone(),
                values.clone(),
                FrequencyUnit::CyclesPerDegree,
                "display",
                crate::spectral::Normalization::Transfer,
            )
            .map_err(|e| VisionError::Config(format!("tabulated display MTF: {e}")))?;
        }
        Ok(())
    }

    /// Display pixels subtended by one degree of visual angle.
    pub fn pixels_per_degree(&self) -> f64 {
        let distance_mm = self.distance_cm * 10.0;
        2.0 * distance_mm * 0.5f64.to_radians().tan() / self.pixel_pitch_mm
    }

    pub fn cpd_from_cpp(&self, u_cpp: f64) -> f64 {
        u_cpp * self.pixels_per_degree()
    }

    pub fn cpp_from_cpd(&self, u_cpd: f64) -> f64 {
        u_cpd / self.pixels_per_degree()
    }

    pub fn nyquist_cpd(&self) -> f64 {
        self.cpd_from_cpp(0.5)
    }

    pub fn u_max(&self) -> f64 {
        self.u_max.unwrap_or_else(|| self.nyquist_cpd())
    }

    pub fn field_size_deg(&self) -> f64 {
        self.field_size_deg.unwrap_or_else(|| {
            let half_mm = 0.5 * self.image_side as f64 * self.pixel_pitch_mm;
            2.0 * (half_mm / (self.distance_cm * 10.0)).atan().to_degrees()
        })
    }

    pub fn display_mtf(&self, u_cpd: f64) -> f64 {
        self.display_mtf.evaluate(u_cpd, self.nyquist_cpd())
    }

    /// Converts a cycles/pixel curve to cycles/degree; cycles/degree input is returned as is.
    pub fn to_cpd(&self, s: &Spectrum1D) -> Spectrum1D {
        match s.unit {
            FrequencyUnit::CyclesPerDegree => s.clone(),
            FrequencyUnit::CyclesPerPixel => {
                let ppd = self.pixels_per_degree();
                Spectrum1D {
                    frequencies: s.frequencies.iter().map(|f| f * ppd).collect(),
                    values: s.values.clone(),
                    unit: FrequencyUnit::CyclesPerDegree,
                    variant: s.variant.clone(),
                    normalization: s.normalization,
                }
            }
        }
    }
}
