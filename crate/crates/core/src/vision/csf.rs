//! Contrast sensitivity functions.

use serde::{Deserialize, Serialize};

use super::{trapezoid, ViewingEnvironment, VisionError};
use crate::spectral::Spectrum1D;

/// Sensitivity as a function of frequency in cycles/degree.
pub trait ContrastSensitivity: Send + Sync {
    fn sensitivity(&self, u_cpd: f64) -> f64;

    fn name(&self) -> &str;
}

/// Scene-dependent sensitivity (contextual CSF / visual perception function).
///
/// No model ships with the crate; implement this to plug one in and wrap it
/// with [`InContext`] to use it wherever a plain CSF is expected.
pub trait ContextualSensitivity: Send + Sync {
    fn sensitivity(&self, u_cpd: f64, scene_ps: &Spectrum1D) -> f64;

    fn name(&self) -> &str;
}

/// A contextual model bound to one scene's power spectrum.
pub struct InContext<'a, M: ContextualSensitivity + ?Sized> {
    pub model: &'a M,
    pub scene_ps: &'a Spectrum1D,
}

impl<M: ContextualSensitivity + ?Sized> ContrastSensitivity for InContext<'_, M> {
    fn sensitivity(&self, u_cpd: f64) -> f64 {
        self.model.sensitivity(u_cpd, self.scene_ps)
    }

    fn name(&self) -> &str {
        self.model.name()
    }
}

/// Barten's 1989 luminance CSF.
///
/// `S(u) = a u exp(-b u) sqrt(1 + c exp(b u))` with
/// `a = 540 (1 + 0.7/L)^-0.2 / (1 + 12 / (w (1 + u/3)^2))`,
/// `b = 0.3 (1 + 100/L)^0.15` and `c = 0.06`, for luminance `L` in cd/m^2 and
/// field size `w` in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BartenCsf {
    pub luminance: f64,
    pub field_size_deg: f64,
}

impl BartenCsf {
    pub const GAIN: f64 = 540.0;
    pub const C: f64 = 0.06;

    pub fn new(luminance: f64, field_size_deg: f64) -> Result<Self, VisionError> {
        if !(luminance > 0.0) || !(field_size_deg > 0.0) {
            return Err(VisionError::Config(format!(
                "Barten CSF needs positive luminance and field size, got {luminance} and {field_size_deg}"
            )));
        }
        Ok(Self {
            luminance,
            field_size_deg,
        })
    }

    pub fn for_environment(env: &ViewingEnvironment) -> Result<Self, VisionError> {
        Self::new(env.white_luminance, env.field_size_deg())
    }

    fn eval(&self, u: f64) -> f64 {
        let l = self.luminance;
        let w = self.field_size_deg;
        let a = Self::GAIN * (1.0 + 0.7 / l).powf(-0.2) / (1.0 + 12.0 / (w * (1.0 + u / 3.0).powi(2)));
        let b = 0.3 * (1.0 + 100.0 / l).powf(0.15);
        a * u * (-b * u).exp() * (1.0 + Self::C * (b * u).exp()).sqrt()
    }
}

impl ContrastSensitivity for BartenCsf {
    fn sensitivity(&self, u_cpd: f64) -> f64 {
        self.eval(u_cpd.max(0.0))
    }

    fn name(&self) -> &str {
        "barten"
    }
}

/// Johnson and Fairchild's luminance CSF, `75 u^0.8 exp(-0.2 u)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct JohnsonFairchildCsf;

impl JohnsonFairchildCsf {
    pub const A: f64 = 75.0;
    pub const B: f64 = 0.8;
    pub const C: f64 = 0.2;
}

impl ContrastSensitivity for JohnsonFairchildCsf {
    fn sensitivity(&self, u_cpd: f64) -> f64 {
        let u = u_cpd.max(0.0);
        Self::A * u.powf(Self::B) * (-Self::C * u).exp()
    }

    fn name(&self) -> &str {
        "johnson-fairchild"
    }
}

/// Unit sensitivity everywhere; reduces the visual metrics to their plain forms.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FlatCsf;

impl ContrastSensitivity for FlatCsf {
    fn sensitivity(&self, _u_cpd: f64) -> f64 {
        1.0
    }

    fn name(&self) -> &str {
        "flat"
    }
}

pub fn barten_csf(u_cpd: f64, env: &ViewingEnvironment, field_size_deg: f64) -> Result<f64, VisionError> {
    check_frequency(u_cpd)?;
    Ok(BartenCsf::new(env.white_luminance, field_size_deg)?.eval(u_cpd))
}

pub fn jf_csf(u_cpd: f64) -> Result<f64, VisionError> {
    check_frequency(u_cpd)?;
    Ok(JohnsonFairchildCsf.sensitivity(u_cpd))
}

fn check_frequency(u: f64) -> Result<(), VisionError> {
    if u < 0.0 || u.is_nan() {
        return Err(VisionError::Domain(format!("negative spatial frequency {u}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CsfKind {
    Barten,
    JohnsonFairchild,
}

impl CsfKind {
    pub const ALL: [CsfKind; 2] = [Self::Barten, Self::JohnsonFairchild];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Barten => "barten",
            Self::JohnsonFairchild => "johnson-fairchild",
        }
    }

    pub fn build(&self, env: &ViewingEnvironment) -> Result<Box<dyn ContrastSensitivity>, VisionError> {
        Ok(match self {
            Self::Barten => Box::new(BartenCsf::for_environment(env)?),
            Self::JohnsonFairchild => Box::new(JohnsonFairchildCsf),
        })
    }
}

impl std::fmt::Display for CsfKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for CsfKind {
    type Err = VisionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| VisionError::Config(format!("unknown CSF {s:?}")))
    }
}

/// CSF choice plus the eye's internal noise power used by the information metrics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CsfModel {
    pub kind: CsfKind,
    /// Internal visual noise power, constant over frequency. Zero is allowed.
    pub nps_visual: f64,
}

pub const DEFAULT_NPS_VISUAL: f64 = 1.0;

impl Default for CsfModel {
    fn default() -> Self {
        Self {
            kind: CsfKind::Barten,
            nps_visual: DEFAULT_NPS_VISUAL,
        }
    }
}

impl CsfModel {
    pub fn validate(&self) -> Result<(), VisionError> {
        if !(self.nps_visual >= 0.0 && self.nps_visual.is_finite()) {
            return Err(VisionError::Config(format!(
                "nps_visual must be non-negative, got {}",
                self.nps_visual
            )));
        }
        Ok(())
    }
}

pub fn sample_csf(csf: &dyn ContrastSensitivity, grid: &[f64]) -> Vec<f64> {
    grid.iter().map(|&u| csf.sensitivity(u)).collect()
}

/// Rescales `csf` so its trapezoidal area over `grid` equals that of `reference`.
pub fn normalize_csf(csf: &[f64], reference: &[f64], grid: &[f64]) -> Result<Vec<f64>, VisionError> {
    if csf.len() != grid.len() || reference.len() != grid.len() {
        return Err(VisionError::Shape("CSF samples and grid differ in length".into()));
    }
    let area = trapezoid(grid, csf);
    let target = trapezoid(grid, reference);
    if !(area > 0.0) || !(target > 0.0) {
        return Err(VisionError::Domain(format!(
            "cannot normalize CSF areas {area} and {target}"
        )));
    }
    let k = target / area;
    Ok(csf.iter().map(|v| v * k).collect())
}

/// Scales samples so the largest equals 1.
pub fn peak_normalized(samples: &[f64]) -> Result<Vec<f64>, VisionError> {
    let peak = samples.iter().cloned().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(VisionError::Domain("CSF has no positive sample".into()));
    }
    Ok(samples.iter().map(|v| v / peak).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_grid(max: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|i| max * i as f64 / n as f64).collect()
    }

    fn argmax(csf: &dyn ContrastSensitivity, grid: &[f64]) -> (f64, f64) {
        grid.iter()
            .map(|&u| (u, csf.sensitivity(u)))
            .fold((0.0, f64::MIN), |a, b| if b.1 > a.1 { b } else { a })
    }

    /// Direct transcription of the published Barten formula, kept separate from the implementation.
    fn barten_reference(u: f64, l: f64, w: f64) -> f64 {
        let a = 540.0 * (1.0 + 0.7 / l).powf(-0.2) / (1.0 + 12.0 / (w * (1.0 + u / 3.0) * (1.0 + u / 3.0)));
        let b = 0.3 * (1.0 + 100.0 / l).powf(0.15);
        a * u * (-b * u).exp() * (1.0 + 0.06 * (b * u).exp()).sqrt()
    }

    #[test]
    fn barten_shape_at_120_cd() {
        let csf = BartenCsf::new(120.0, 13.12).unwrap();
        let grid = dense_grid(80.0, 8000);
        let (peak_u, peak) = argmax(&csf, &grid);
        assert!((2.0..=8.0).contains(&peak_u), "peak at {peak_u}");
        assert!(csf.sensitivity(40.0) < 0.1 * peak);
        assert!(csf.sensitivity(60.0) < 0.01 * peak);
        let mut prev = peak;
        for &u in grid.iter().filter(|&&u| u > peak_u) {
            let v = csf.sensitivity(u);
            assert!(v < prev, "not decreasing at {u}");
            prev = v;
        }
        for &u in &grid {
            assert!((csf.sensitivity(u) - barten_reference(u, 120.0, 13.12)).abs() < 1e-9);
        }
    }

    #[test]
    fn jf_shape() {
        let grid = dense_grid(80.0, 8000);
        let (peak_u, peak) = argmax(&JohnsonFairchildCsf, &grid);
        assert!((peak_u - 4.0).abs() < 0.02);
        assert!(jf_csf(0.0).unwrap() < peak);
        assert!(JohnsonFairchildCsf.sensitivity(60.0) < 0.01 * peak);
        let mut prev = f64::MAX;
        for &u in grid.iter().filter(|&&u| u > 20.0) {
            let v = jf_csf(u).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn non_negative_and_finite_to_80() {
        let env = ViewingEnvironment::default();
        for kind in CsfKind::ALL {
            let csf = kind.build(&env).unwrap();
            for u in dense_grid(80.0, 800) {
                let v = csf.sensitivity(u);
                assert!(v >= 0.0 && v.is_finite());
            }
        }
    }

    #[test]
    fn negative_frequency_is_domain_error() {
        assert!(matches!(jf_csf(-1.0), Err(VisionError::Domain(_))));
        let env = ViewingEnvironment::default();
        assert!(barten_csf(-0.1, &env, 10.0).is_err());
        assert!(barten_csf(3.0, &env, 10.0).unwrap() > 0.0);
    }

    #[test]
    fn normalization() {
        let grid = dense_grid(20.0, 200);
        let a = sample_csf(&JohnsonFairchildCsf, &grid);
        let b = sample_csf(&BartenCsf::new(120.0, 10.0).unwrap(), &grid);
        assert_eq!(normalize_csf(&a, &a, &grid).unwrap(), a);
        let doubled: Vec<f64> = a.iter().map(|v| 2.0 * v).collect();
        let halved = normalize_csf(&doubled, &a, &grid).unwrap();
        for (x, y) in halved.iter().zip(&a) {
            assert!((x - y).abs() <= 1e-12 * y.abs());
        }
        let n = normalize_csf(&a, &b, &grid).unwrap();
        let rel = (trapezoid(&grid, &n) - trapezoid(&grid, &b)).abs() / trapezoid(&grid, &b);
        assert!(rel < 1e-12);
        let ratio = n[10] / a[10];
        for (x, y) in n.iter().zip(&a).skip(1) {
            assert!((x / y - ratio).abs() < 1e-12 * ratio);
        }
        assert!(normalize_csf(&vec![0.0; grid.len()], &a, &grid).is_err());
    }

    #[test]
    fn contextual_adapter() {
        struct Masked;
        impl ContextualSensitivity for Masked {
            fn sensitivity(&self, u: f64, scene: &Spectrum1D) -> f64 {
                JohnsonFairchildCsf.sensitivity(u) / (1.0 + scene.interpolate(u))
            }
            fn name(&self) -> &str {
                "masked"
            }
        }
        let scene = Spectrum1D::new(
            vec![1.0, 10.0],
            vec![1.0, 1.0],
            crate::spectral::FrequencyUnit::CyclesPerDegree,
            "",
            crate::spectral::Normalization::PowerPerSample,
        )
        .unwrap();
        let c = InContext {
            model: &Masked,
            scene_ps: &scene,
        };
        assert!((c.sensitivity(4.0) - 0.5 * jf_csf(4.0).unwrap()).abs() < 1e-12);
        assert_eq!(c.name(), "masked");
    }
}
