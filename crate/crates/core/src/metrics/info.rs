//! Information-capacity style metrics on displayed spectra.

use super::{integrate_log, DisplayedSpectra, MetricCalibration, MetricKind, MetricScore, MetricsError};

/// Visual signal-to-noise ratio `S CSF^2 / (N CSF^2 + NPS_visual)` per bin.
fn visual_snr(ds: &DisplayedSpectra, csf: &[f64], nps_visual: f64, u_max: f64) -> Result<Vec<f64>, MetricsError> {
    if csf.len() != ds.frequencies.len() {
        return Err(MetricsError::Shape(
            "CSF samples do not match the displayed grid".into(),
        ));
    }
    if !(nps_visual >= 0.0) {
        return Err(MetricsError::Domain(format!("negative visual noise {nps_visual}")));
    }
    let mut out = Vec::with_capacity(csf.len());
    for (i, &c) in csf.iter().enumerate() {
        let c2 = c * c;
        let denom = ds.noise[i] * c2 + nps_visual;
        let u = ds.frequencies[i];
        if denom <= 0.0 && u > 0.0 && u <= u_max {
            return Err(MetricsError::Domain(format!("zero total noise at {u} cy/deg")));
        }
        out.push(if denom > 0.0 { ds.signal[i] * c2 / denom } else { 0.0 });
    }
    Ok(out)
}

/// Perceived information capacity: `k1 sqrt(integral ln(1 + SNR_v) du/u) + k2`.
pub fn pic(
    ds: &DisplayedSpectra,
    csf: &[f64],
    nps_visual: f64,
    u_max: f64,
    cal: MetricCalibration,
) -> Result<MetricScore, MetricsError> {
    let ratio = visual_snr(ds, csf, nps_visual, u_max)?;
    let integrand: Vec<f64> = ratio.iter().map(|r| r.ln_1p()).collect();
    let (integral, u1) = integrate_log(&ds.frequencies, &integrand, u_max)?;
    Ok(MetricScore::new(MetricKind::Pic, integral.sqrt(), Some(u1), cal))
}

/// Square-root integral with noise: `k1 / ln 2 integral SNR_v^(1/4) du/u + k2`.
pub fn sqrin(
    ds: &DisplayedSpectra,
    csf: &[f64],
    nps_visual: f64,
    u_max: f64,
    cal: MetricCalibration,
) -> Result<MetricScore, MetricsError> {
    let ratio = visual_snr(ds, csf, nps_visual, u_max)?;
    let integrand: Vec<f64> = ratio.iter().map(|r| r.powf(0.25)).collect();
    let (integral, u1) = integrate_log(&ds.frequencies, &integrand, u_max)?;
    Ok(MetricScore::new(
        MetricKind::Sqrin,
        integral / std::f64::consts::LN_2,
        Some(u1),
        cal,
    ))
}
