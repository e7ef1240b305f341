//! Logarithmic NEQ metrics.

use super::{integrate_log, MetricCalibration, MetricKind, MetricScore, MetricsError};
use crate::sysperf::NeqCurve;
use crate::vision::{ContrastSensitivity, ViewingEnvironment};

fn weighted_log_integral(
    neq: &NeqCurve,
    env: &ViewingEnvironment,
    csf: Option<&dyn ContrastSensitivity>,
) -> Result<(f64, f64), MetricsError> {
    let curve = env.to_cpd(&neq.spectrum);
    let integrand: Vec<f64> = curve
        .frequencies
        .iter()
        .zip(&curve.values)
        .map(|(&u, &q)| {
            let d = env.display_mtf(u);
            let c = csf.map_or(1.0, |c| c.sensitivity(u));
            c * c * d * d * q
        })
        .collect();
    let (integral, u1) = integrate_log(&curve.frequencies, &integrand, env.u_max())?;
    if !(integral > 0.0) || !integral.is_finite() {
        return Err(MetricsError::Domain(format!("weighted NEQ integral is {integral}")));
    }
    Ok((integral, u1))
}

/// `k1 log10(integral MTF_disp^2 NEQ du/u) + k2`.
pub fn log_neq(neq: &NeqCurve, env: &ViewingEnvironment, cal: MetricCalibration) -> Result<MetricScore, MetricsError> {
    let (integral, u1) = weighted_log_integral(neq, env, None)?;
    Ok(MetricScore::new(MetricKind::LogNeq, integral.log10(), Some(u1), cal))
}

/// `k1 log10(integral CSF^2 MTF_disp^2 NEQ du/u) + k2`.
pub fn visual_log_neq(
    neq: &NeqCurve,
    env: &ViewingEnvironment,
    csf: &dyn ContrastSensitivity,
    cal: MetricCalibration,
) -> Result<MetricScore, MetricsError> {
    let (integral, u1) = weighted_log_integral(neq, env, Some(csf))?;
    Ok(MetricScore::new(
        MetricKind::VisualLogNeq,
        integral.log10(),
        Some(u1),
        cal,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{FrequencyUnit, Normalization, Spectrum1D};
    use crate::vision::{BartenCsf, DisplayMtfModel, FlatCsf};

    struct Scaled<C>(C, f64);
    impl<C: ContrastSensitivity> ContrastSensitivity for Scaled<C> {
        fn sensitivity(&self, u: f64) -> f64 {
            self.1 * self.0.sensitivity(u)
        }
        fn name(&self) -> &str {
            "scaled"
        }
    }

    fn neq_curve(values: Vec<f64>) -> NeqCurve {
        let n = values.len();
        let f = (0..n).map(|i| (i as f64 + 0.5) * 0.5 / n as f64).collect();
        NeqCurve {
            spectrum: Spectrum1D::new(f, values, FrequencyUnit::CyclesPerPixel, "", Normalization::Quanta).unwrap(),
            mu_a: 0.5,
            excluded: vec![],
        }
    }

    fn ideal() -> ViewingEnvironment {
        ViewingEnvironment {
            display_mtf: DisplayMtfModel::Ideal,
            ..Default::default()
        }
    }

    const CAL: MetricCalibration = MetricCalibration { k1: 3.0, k2: 1.0 };

    #[test]
    fn flat_closed_form() {
        let env = ideal();
        let q = 2500.0;
        let s = log_neq(&neq_curve(vec![q; 64]), &env, CAL).unwrap();
        let u1 = env.cpd_from_cpp(0.5 / 128.0);
        let want = 3.0 * (q * (env.u_max() / u1).ln()).log10() + 1.0;
        assert!((s.value - want).abs() / want < 1e-3);
        assert!((s.u1.unwrap() - u1).abs() < 1e-12);
    }

    #[test]
    fn tenfold_neq_adds_k1() {
        let env = ViewingEnvironment::default();
        let v: Vec<f64> = (1..=32).map(|i| 1e4 / i as f64).collect();
        let a = log_neq(&neq_curve(v.clone()), &env, CAL).unwrap();
        let b = log_neq(&neq_curve(v.iter().map(|x| x * 10.0).collect()), &env, CAL).unwrap();
        assert!((b.value - a.value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn flat_csf_reduces_to_log_neq() {
        let env = ViewingEnvironment::default();
        let c = neq_curve((1..=32).map(|i| 100.0 * i as f64).collect());
        let a = log_neq(&c, &env, CAL).unwrap();
        let b = visual_log_neq(&c, &env, &FlatCsf, CAL).unwrap();
        assert!((a.value - b.value).abs() < 1e-12);
    }

    #[test]
    fn csf_scale_shifts_by_twice_log() {
        let env = ViewingEnvironment::default();
        let c = neq_curve((1..=32).map(|i| 100.0 * i as f64).collect());
        let barten = BartenCsf::for_environment(&env).unwrap();
        let a = visual_log_neq(&c, &env, &barten, CAL).unwrap();
        let b = visual_log_neq(&c, &env, &Scaled(barten, 7.0), CAL).unwrap();
        assert!((b.value - a.value - 2.0 * 3.0 * 7f64.log10()).abs() < 1e-12);
    }

    #[test]
    fn zero_neq_is_degenerate() {
        assert!(matches!(
            log_neq(&neq_curve(vec![0.0; 16]), &ideal(), CAL),
            Err(MetricsError::Domain(_))
        ));
    }

    #[test]
    fn strictly_increasing_in_neq() {
        let env = ViewingEnvironment::default();
        let base: Vec<f64> = (1..=16).map(|i| 50.0 * i as f64).collect();
        let a = log_neq(&neq_curve(base.clone()), &env, CAL).unwrap().value;
        for i in 0..16 {
            let mut v = base.clone();
            v[i] *= 1.5;
            assert!(log_neq(&neq_curve(v), &env, CAL).unwrap().value > a);
        }
    }
}
