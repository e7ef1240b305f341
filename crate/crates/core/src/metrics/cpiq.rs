//! Acutance, visual noise and their Minkowski combination into a quality score.

use rustfft::num_complex::Complex64;
use rustfft::FftDirection;
use serde::{Deserialize, Serialize};

use super::{MetricCalibration, MetricKind, MetricScore, MetricsError};
use crate::imgcore::PlanarImage;
use crate::spectral::{default_bins, dft_frequency, fft2_in_place, fft2_real};
use crate::sysperf::MtfCurve;
use crate::vision::{ContrastSensitivity, ViewingEnvironment};

/// Upper end of the CSF normalization integral, cycles/degree.
pub const CSF_INTEGRATION_LIMIT: f64 = 80.0;
const ACUTANCE_STEP: f64 = 0.01;

/// Minkowski exponent constants: `n_max = 1 + C1 tanh(QL_max / C2)`.
pub const MINKOWSKI_C1: f64 = 2.0;
pub const MINKOWSKI_C2: f64 = 16.9;

/// Quality of the reference scenes on the SQS2 scale.
pub const REFERENCE_QUALITY: f64 = 23.0;

/// `Q_T = integral_0^u_max MTF MTF_disp CSF du / integral_0^80 CSF du`.
///
/// Both integrals use a 0.01 cy/deg trapezoid grid. The system MTF is
/// interpolated linearly and held flat outside its measured range.
pub fn acutance(
    mtf_system: &MtfCurve,
    env: &ViewingEnvironment,
    csf: &dyn ContrastSensitivity,
) -> Result<f64, MetricsError> {
    let mtf = env.to_cpd(&mtf_system.spectrum);
    let steps = (CSF_INTEGRATION_LIMIT / ACUTANCE_STEP).round() as usize;
    let u_max = env.u_max();
    let mut num = 0.0;
    let mut den = 0.0;
    let mut prev: Option<(f64, f64, f64)> = None;
    for i in 0..=steps {
        let u = i as f64 * ACUTANCE_STEP;
        let c = csf.sensitivity(u);
        let weighted = if u <= u_max {
            mtf.interpolate(u) * env.display_mtf(u) * c
        } else {
            0.0
        };
        if let Some((pu, pc, pw)) = prev {
            let h = u - pu;
            den += 0.5 * h * (pc + c);
            if u <= u_max {
                num += 0.5 * h * (pw + weighted);
            } else if pu < u_max {
                // partial last panel up to u_max
                let t = u_max - pu;
                let w_end = mtf.interpolate(u_max) * env.display_mtf(u_max) * csf.sensitivity(u_max);
                num += 0.5 * t * (pw + w_end);
            }
        }
        prev = Some((u, c, weighted));
    }
    if !(den > 0.0) {
        return Err(MetricsError::Domain("CSF has zero area".into()));
    }
    Ok(num / den)
}

/// Settings of the visual noise computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OmegaConfig {
    /// Weight on `log10(1 + var L*)`.
    pub w_l: f64,
    /// Radial bins of the default binning removed by the high-pass filter.
    pub highpass_bins: usize,
}

impl Default for OmegaConfig {
    fn default() -> Self {
        Self {
            w_l: 1.0,
            highpass_bins: 2,
        }
    }
}

/// CIE lightness of relative luminance `y` (white = 1).
pub fn lightness(y: f64) -> f64 {
    const EPS: f64 = 216.0 / 24389.0;
    const KAPPA: f64 = 24389.0 / 27.0;
    if y > EPS {
        116.0 * y.cbrt() - 16.0
    } else {
        KAPPA * y
    }
}

/// Visual noise of luminance noise fields viewed around `mean_level`.
///
/// Each field is filtered in the frequency domain by the peak-normalized CSF,
/// the display MTF and a high-pass cut, then added to `mean_level` and
/// converted to L*. `amplitude` scales the fields first (e.g. to undo the
/// shrinkage of replicate-mean differencing). The result is
/// `w_L log10(1 + var L*)` with the variance pooled over all fields.
pub fn visual_noise_omega(
    fields: &[&PlanarImage],
    mean_level: f64,
    amplitude: f64,
    env: &ViewingEnvironment,
    csf: &dyn ContrastSensitivity,
    cfg: &OmegaConfig,
) -> Result<f64, MetricsError> {
    let first = fields
        .first()
        .ok_or_else(|| MetricsError::Usage("visual noise needs at least one noise field".into()))?;
    let (w, h) = (first.width(), first.height());
    let filter = omega_filter(w, h, env, csf, cfg)?;
    // Welford accumulation keeps var exactly 0 for constant lightness
    let mut mean = 0.0;
    let mut m2 = 0.0;
    let mut count = 0usize;
    for f in fields {
        if f.channels() != 1 || f.width() != w || f.height() != h {
            return Err(MetricsError::Shape(
                "noise fields must be one-channel and equally sized".into(),
            ));
        }
        f.require_linear().map_err(crate::spectral::SpectralError::from)?;
        let mut spec = fft2_real(f.data(), w, h);
        for (s, g) in spec.iter_mut().zip(&filter) {
            *s *= *g * amplitude;
        }
        fft2_in_place(&mut spec, w, h, FftDirection::Inverse);
        let norm = 1.0 / (w * h) as f64;
        for c in &spec {
            let l = lightness(mean_level + c.re * norm);
            count += 1;
            let d = l - mean;
            mean += d / count as f64;
            m2 += d * (l - mean);
        }
    }
    let var = (m2 / count as f64).max(0.0);
    Ok(cfg.w_l * (1.0 + var).log10())
}

fn omega_filter(
    w: usize,
    h: usize,
    env: &ViewingEnvironment,
    csf: &dyn ContrastSensitivity,
    cfg: &OmegaConfig,
) -> Result<Vec<Complex64>, MetricsError> {
    let ppd = env.pixels_per_degree();
    let cutoff = cfg.highpass_bins as f64 * 0.5 / default_bins(w, h) as f64;
    let mut peak: f64 = 0.0;
    let mut raw = vec![0.0; w * h];
    for l in 0..h {
        let v = dft_frequency(l, h);
        for k in 0..w {
            let u = dft_frequency(k, w);
            let r = (u * u + v * v).sqrt();
            let s = csf.sensitivity(r * ppd);
            peak = peak.max(s);
            raw[l * w + k] = if r < cutoff { 0.0 } else { s * env.display_mtf(r * ppd) };
        }
    }
    if !(peak > 0.0) {
        return Err(MetricsError::Domain("CSF is zero over the image frequencies".into()));
    }
    Ok(raw.into_iter().map(|g| Complex64::new(g / peak, 0.0)).collect())
}

/// Per-attribute quality losses in JND and the maximum loss for the viewing conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityLoss {
    pub losses: Vec<f64>,
    /// Defaults to the largest of `losses`.
    pub ql_max: Option<f64>,
}

pub fn minkowski_exponent(ql_max: f64) -> f64 {
    1.0 + MINKOWSKI_C1 * (ql_max / MINKOWSKI_C2).tanh()
}

/// `QL_m = (sum QL_i^n)^(1/n)` with `n = 1 + 2 tanh(QL_max / 16.9)`.
pub fn minkowski_combine(ql: &QualityLoss) -> Result<f64, MetricsError> {
    if let Some(v) = ql.losses.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return Err(MetricsError::Domain(format!(
            "quality loss {v} is negative or not finite"
        )));
    }
    let ql_max = match ql.ql_max {
        Some(m) if !(m >= 0.0) => return Err(MetricsError::Domain(format!("QL_max {m} is negative"))),
        Some(m) => m,
        None => ql.losses.iter().cloned().fold(0.0, f64::max),
    };
    let n = minkowski_exponent(ql_max);
    let largest = ql.losses.iter().cloned().fold(0.0, f64::max);
    if largest == 0.0 {
        return Ok(0.0);
    }
    // factor out the largest term to keep the powers in range
    let s: f64 = ql.losses.iter().map(|v| (v / largest).powf(n)).sum();
    Ok(largest * s.powf(1.0 / n))
}

/// Monotone mapping from an attribute measure to JND of quality loss.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum JndMapping {
    /// The measure is used as the loss directly.
    #[default]
    Identity,
    /// `scale * measure`, `scale > 0`.
    Linear { scale: f64 },
}

impl JndMapping {
    pub fn apply(&self, x: f64) -> f64 {
        match self {
            Self::Identity => x,
            Self::Linear { scale } => scale * x,
        }
    }
}

/// `23 - QL_m` over the texture and noise losses.
pub fn cpiq_score(texture_ql: f64, noise_ql: f64, ql_max: Option<f64>) -> Result<MetricScore, MetricsError> {
    let qm = minkowski_combine(&QualityLoss {
        losses: vec![texture_ql, noise_ql],
        ql_max,
    })?;
    Ok(MetricScore::new(
        MetricKind::Cpiq,
        REFERENCE_QUALITY - qm,
        None,
        MetricCalibration::identity(),
    ))
}

/// Texture loss from acutance: the shortfall `1 - Q_T`, floored at 0, through `mapping`.
pub fn texture_loss(q_t: f64, mapping: JndMapping) -> f64 {
    mapping.apply((1.0 - q_t).max(0.0))
}
