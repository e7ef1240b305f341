use serde::{Deserialize, Serialize};

use super::{MtfCurve, SysperfError};
use crate::spectral::{Normalization, Spectrum1D};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeqCurve {
    pub spectrum: Spectrum1D,
    /// Mean linear output signal.
    pub mu_a: f64,
    /// Frequencies dropped because the NPS was zero while the MTF was not.
    pub excluded: Vec<f64>,
}

impl NeqCurve {
    pub fn frequencies(&self) -> &[f64] {
        &self.spectrum.frequencies
    }

    pub fn values(&self) -> &[f64] {
        &self.spectrum.values
    }
}

/// `NEQ(u) = MTF(u)^2 mu_A^2 / NPS(u)`.
///
/// Bins where the NPS is zero but the MTF is not have no finite NEQ; they are
/// left out of the curve and listed in `excluded`. Bins where both vanish are 0.
pub fn neq(mtf: &MtfCurve, nps: &Spectrum1D, mu_a: f64) -> Result<NeqCurve, SysperfError> {
    if !(mu_a > 0.0) || !mu_a.is_finite() {
        return Err(SysperfError::Domain(format!(
            "mean signal must be positive, got {mu_a}"
        )));
    }
    if !mtf.spectrum.same_grid(nps) {
        return Err(SysperfError::Shape("MTF and NPS grids differ".into()));
    }
    let m2 = mu_a * mu_a;
    let mut freqs = Vec::with_capacity(nps.len());
    let mut values = Vec::with_capacity(nps.len());
    let mut excluded = Vec::new();
    for ((&f, &t), &p) in nps.frequencies.iter().zip(mtf.values()).zip(&nps.values) {
        if p < 0.0 {
            return Err(SysperfError::Domain(format!("negative NPS at {f}")));
        }
        if p == 0.0 {
            if t > 0.0 {
                excluded.push(f);
                continue;
            }
            freqs.push(f);
            values.push(0.0);
        } else {
            freqs.push(f);
            values.push(t * t * m2 / p);
        }
    }
    if freqs.is_empty() {
        return Err(SysperfError::Degenerate("every NEQ bin was excluded".into()));
    }
    let variant = format!("{}+{}", mtf.variant.as_str(), nps.variant);
    let spectrum = Spectrum1D::new(freqs, values, nps.unit, variant, Normalization::Quanta)?;
    Ok(NeqCurve {
        spectrum,
        mu_a,
        excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::FrequencyUnit;
    use crate::sysperf::MtfVariant;

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|i| (i as f64 + 0.5) * 0.5 / n as f64).collect()
    }

    fn flat_mtf(n: usize, v: f64) -> MtfCurve {
        let s = Spectrum1D::new(
            grid(n),
            vec![v; n],
            FrequencyUnit::CyclesPerPixel,
            "",
            Normalization::Transfer,
        )
        .unwrap();
        MtfCurve::new(s, MtfVariant::Analytic, 0).unwrap()
    }

    fn nps(values: Vec<f64>) -> Spectrum1D {
        let n = values.len();
        Spectrum1D::new(
            grid(n),
            values,
            FrequencyUnit::CyclesPerPixel,
            "uniform-patch",
            Normalization::PowerPerSample,
        )
        .unwrap()
    }

    #[test]
    fn unit_mtf_flat_nps() {
        let c = neq(&flat_mtf(10, 1.0), &nps(vec![4e-4; 10]), 0.3).unwrap();
        let expected = 0.3 * 0.3 / 4e-4;
        assert!(c.values().iter().all(|&v| v == expected));
        assert_eq!(c.mu_a, 0.3);
    }

    #[test]
    fn halving_mtf_quarters_neq() {
        let a = neq(&flat_mtf(6, 0.8), &nps(vec![1e-3; 6]), 0.5).unwrap();
        let b = neq(&flat_mtf(6, 0.4), &nps(vec![1e-3; 6]), 0.5).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x / y - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn intensity_scaling_invariance() {
        let p: Vec<f64> = (1..=8).map(|i| 1e-4 * i as f64).collect();
        let a = neq(&flat_mtf(8, 0.7), &nps(p.clone()), 0.2).unwrap();
        let c = 3.7;
        let scaled: Vec<f64> = p.iter().map(|v| v * c * c).collect();
        let b = neq(&flat_mtf(8, 0.7), &nps(scaled), 0.2 * c).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() / x < 1e-9);
        }
    }

    #[test]
    fn zero_nps_bins_are_excluded() {
        let c = neq(&flat_mtf(4, 1.0), &nps(vec![1e-3, 0.0, 1e-3, 1e-3]), 0.5).unwrap();
        assert_eq!(c.values().len(), 3);
        assert_eq!(c.excluded.len(), 1);
        let z = neq(&flat_mtf(4, 0.0), &nps(vec![0.0; 4]), 0.5).unwrap();
        assert!(z.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn non_positive_mean_signal() {
        assert!(matches!(
            neq(&flat_mtf(4, 1.0), &nps(vec![1.0; 4]), 0.0),
            Err(SysperfError::Domain(_))
        ));
    }
}
