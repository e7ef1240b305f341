use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::SpectralError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrequencyUnit {
    #[serde(rename = "cy/px")]
    CyclesPerPixel,
    #[serde(rename = "cy/deg")]
    CyclesPerDegree,
}

impl FrequencyUnit {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::CyclesPerPixel => "cy/px",
            Self::CyclesPerDegree => "cy/deg",
        }
    }

    pub fn parse(s: &str) -> Result<Self, SpectralError> {
        match s {
            "cy/px" => Ok(Self::CyclesPerPixel),
            "cy/deg" => Ok(Self::CyclesPerDegree),
            other => Err(SpectralError::Parse(format!("unknown frequency unit {other:?}"))),
        }
    }
}

/// What the values of a spectrum mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    /// `|DFT|^2 / (M N)`: white noise of variance s^2 has mean bin value s^2.
    #[serde(rename = "power/mn")]
    PowerPerSample,
    /// Raw `|DFT|^2`.
    #[serde(rename = "power")]
    Unnormalized,
    /// Dimensionless transfer (MTF).
    #[serde(rename = "transfer")]
    Transfer,
    /// Noise equivalent quanta.
    #[serde(rename = "quanta")]
    Quanta,
    /// Visual sensitivity.
    #[serde(rename = "sensitivity")]
    Sensitivity,
}

impl Normalization {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::PowerPerSample => "power/mn",
            Self::Unnormalized => "power",
            Self::Transfer => "transfer",
            Self::Quanta => "quanta",
            Self::Sensitivity => "sensitivity",
        }
    }

    pub fn parse(s: &str) -> Result<Self, SpectralError> {
        Ok(match s {
            "power/mn" => Self::PowerPerSample,
            "power" => Self::Unnormalized,
            "transfer" => Self::Transfer,
            "quanta" => Self::Quanta,
            "sensitivity" => Self::Sensitivity,
            other => return Err(SpectralError::Parse(format!("unknown normalization {other:?}"))),
        })
    }
}

/// Two-dimensional power spectrum in standard DFT order.
///
/// Bin `(k, l)` sits at `u = k / M` (wrapped to `(-0.5, 0.5]`) along the width
/// and `v = l / N` along the height; values are stored row-major by `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum2D {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
    pub normalization: Normalization,
}

/// Signed DFT frequency of index `k` on an axis of length `n`, in cycles/sample.
pub fn dft_frequency(k: usize, n: usize) -> f64 {
    if 2 * k <= n {
        k as f64 / n as f64
    } else {
        k as f64 / n as f64 - 1.0
    }
}

impl Spectrum2D {
    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.values[l * self.width + k]
    }

    pub fn frequency(&self, k: usize, l: usize) -> (f64, f64) {
        (dft_frequency(k, self.width), dft_frequency(l, self.height))
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn dc(&self) -> f64 {
        self.values[0]
    }

    pub fn scale(&mut self, factor: f64) {
        self.values.iter_mut().for_each(|v| *v *= factor);
    }
}

/// One-dimensional spectrum or transfer curve on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum1D {
    pub frequencies: Vec<f64>,
    pub values: Vec<f64>,
    pub unit: FrequencyUnit,
    /// Which measurement produced the curve (`uniform-patch`, `pictorial-spd`, ...).
    pub variant: String,
    pub normalization: Normalization,
}

impl Spectrum1D {
    pub fn new(
        frequencies: Vec<f64>,
        values: Vec<f64>,
        unit: FrequencyUnit,
        variant: impl Into<String>,
        normalization: Normalization,
    ) -> Result<Self, SpectralError> {
        let s = Self {
            frequencies,
            values,
            unit,
            variant: variant.into(),
            normalization,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), SpectralError> {
        if self.frequencies.len() != self.values.len() {
            return Err(SpectralError::Shape(format!(
                "{} frequencies vs {} values",
                self.frequencies.len(),
                self.values.len()
            )));
        }
        if self.frequencies.is_empty() {
            return Err(SpectralError::Shape("empty spectrum".into()));
        }
        if self.frequencies[0] <= 0.0 {
            return Err(SpectralError::Shape("first frequency must be positive".into()));
        }
        if self.frequencies.windows(2).any(|w| w[1] <= w[0]) {
            return Err(SpectralError::Shape("frequencies must be strictly increasing".into()));
        }
        if self.unit == FrequencyUnit::CyclesPerPixel && *self.frequencies.last().unwrap() > 0.5 + 1e-12 {
            return Err(SpectralError::Shape("cycles/pixel grid exceeds 0.5".into()));
        }
        if let Some(i) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(SpectralError::Degenerate(format!("non-finite value at bin {i}")));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Same grid (and unit) as `other`, to within rounding.
    pub fn same_grid(&self, other: &Spectrum1D) -> bool {
        self.unit == other.unit
            && self.frequencies.len() == other.frequencies.len()
            && self
                .frequencies
                .iter()
                .zip(&other.frequencies)
                .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(1.0))
    }

    pub fn with_values(
        &self,
        values: Vec<f64>,
        variant: impl Into<String>,
        normalization: Normalization,
    ) -> Spectrum1D {
        Spectrum1D {
            frequencies: self.frequencies.clone(),
            values,
            unit: self.unit,
            variant: variant.into(),
            normalization,
        }
    }

    /// Piecewise-linear value at `f`, holding the end values outside the grid.
    pub fn interpolate(&self, f: f64) -> f64 {
        let fr = &self.frequencies;
        if f <= fr[0] {
            return self.values[0];
        }
        let last = fr.len() - 1;
        if f >= fr[last] {
            return self.values[last];
        }
        let i = fr.partition_point(|&x| x <= f) - 1;
        let t = (f - fr[i]) / (fr[i + 1] - fr[i]);
        self.values[i] + t * (self.values[i + 1] - self.values[i])
    }

    /// Resamples onto another curve's grid.
    pub fn resampled_to(&self, grid: &[f64]) -> Spectrum1D {
        Spectrum1D {
            frequencies: grid.to_vec(),
            values: grid.iter().map(|&f| self.interpolate(f)).collect(),
            unit: self.unit,
            variant: self.variant.clone(),
            normalization: self.normalization,
        }
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), SpectralError> {
        write_curve_csv(w, self, None)
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Spectrum1D, SpectralError> {
        read_curve_csv(r).map(|(s, _)| s)
    }

    pub fn to_json(&self) -> Result<String, SpectralError> {
        curve_to_json(self, None)
    }
}

pub(crate) const CURVE_HEADER: [&str; 5] = ["frequency_cpp", "value", "unit", "variant", "normalization"];
pub(crate) const MU_A_FIELD: &str = "mu_A";

/// CSV form shared by NPS, MTF, NEQ and CSF curves; NEQ adds a `mu_A` column.
pub fn write_curve_csv<W: Write>(w: W, s: &Spectrum1D, mu_a: Option<f64>) -> Result<(), SpectralError> {
    let mut wr = csv::Writer::from_writer(w);
    let mut header: Vec<&str> = CURVE_HEADER.to_vec();
    if mu_a.is_some() {
        header.push(MU_A_FIELD);
    }
    wr.write_record(&header)?;
    for (f, v) in s.frequencies.iter().zip(&s.values) {
        let mut rec = vec![
            f.to_string(),
            v.to_string(),
            s.unit.as_str().to_string(),
            s.variant.clone(),
            s.normalization.as_str().to_string(),
        ];
        if let Some(m) = mu_a {
            rec.push(m.to_string());
        }
        wr.write_record(&rec)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_curve_csv<R: Read>(r: R) -> Result<(Spectrum1D, Option<f64>), SpectralError> {
    let mut rd = csv::Reader::from_reader(r);
    let headers = rd.headers()?.clone();
    let names: Vec<&str> = headers.iter().collect();
    if names.len() < 5 || names[..5] != CURVE_HEADER {
        return Err(SpectralError::Parse(format!("unexpected curve header {names:?}")));
    }
    let has_mu = names.get(5) == Some(&MU_A_FIELD);
    let mut freqs = Vec::new();
    let mut values = Vec::new();
    let mut meta: Option<(String, String, String)> = None;
    let mut mu_a = None;
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|e| SpectralError::Parse(format!("{s:?}: {e}")))
    };
    for rec in rd.records() {
        let rec = rec?;
        freqs.push(num(&rec[0])?);
        values.push(num(&rec[1])?);
        if meta.is_none() {
            meta = Some((rec[2].to_string(), rec[3].to_string(), rec[4].to_string()));
        }
        if has_mu && mu_a.is_none() {
            mu_a = Some(num(&rec[5])?);
        }
    }
    let (unit, variant, norm) = meta.ok_or_else(|| SpectralError::Parse("curve has no rows".into()))?;
    let s = Spectrum1D::new(
        freqs,
        values,
        FrequencyUnit::parse(&unit)?,
        variant,
        Normalization::parse(&norm)?,
    )?;
    Ok((s, mu_a))
}

#[derive(Serialize, Deserialize)]
struct CurveRecord {
    frequency_cpp: f64,
    value: f64,
    unit: FrequencyUnit,
    variant: String,
    normalization: Normalization,
    #[serde(rename = "mu_A", skip_serializing_if = "Option::is_none", default)]
    mu_a: Option<f64>,
}

/// JSON mirror of the CSV form: an array of records with the same fields.
pub fn curve_to_json(s: &Spectrum1D, mu_a: Option<f64>) -> Result<String, SpectralError> {
    let recs: Vec<CurveRecord> = s
        .frequencies
        .iter()
        .zip(&s.values)
        .map(|(&f, &v)| CurveRecord {
            frequency_cpp: f,
            value: v,
            unit: s.unit,
            variant: s.variant.clone(),
            normalization: s.normalization,
            mu_a,
        })
        .collect();
    serde_json::to_string_pretty(&recs).map_err(|e| SpectralError::Parse(e.to_string()))
}

pub fn curve_from_json(text: &str) -> Result<(Spectrum1D, Option<f64>), SpectralError> {
    let recs: Vec<CurveRecord> = serde_json::from_str(text).map_err(|e| SpectralError::Parse(e.to_string()))?;
    let first = recs
        .first()
        .ok_or_else(|| SpectralError::Parse("curve has no records".into()))?;
    let (unit, variant, norm, mu_a) = (first.unit, first.variant.clone(), first.normalization, first.mu_a);
    let s = Spectrum1D::new(
        recs.iter().map(|r| r.frequency_cpp).collect(),
        recs.iter().map(|r| r.value).collect(),
        unit,
        variant,
        norm,
    )?;
    Ok((s, mu_a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve() -> Spectrum1D {
        Spectrum1D::new(
            vec![0.1, 0.2, 0.4],
            vec![3.0, 1.0, 0.5],
            FrequencyUnit::CyclesPerPixel,
            "uniform-patch",
            Normalization::PowerPerSample,
        )
        .unwrap()
    }

    #[test]
    fn csv_header_and_round_trip() {
        let s = curve();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("frequency_cpp,value,unit,variant,normalization\n"));
        assert!(text.contains("0.1,3,cy/px,uniform-patch,power/mn"));
        assert_eq!(Spectrum1D::read_csv(&buf[..]).unwrap(), s);
    }

    #[test]
    fn neq_csv_carries_mu_a() {
        let s = curve();
        let mut buf = Vec::new();
        write_curve_csv(&mut buf, &s, Some(0.42)).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("frequency_cpp,value,unit,variant,normalization,mu_A\n"));
        let (back, mu) = read_curve_csv(&buf[..]).unwrap();
        assert_eq!(back, s);
        assert_eq!(mu, Some(0.42));
    }

    #[test]
    fn json_mirror() {
        let s = curve();
        let text = curve_to_json(&s, None).unwrap();
        assert!(text.contains("\"frequency_cpp\""));
        assert!(!text.contains("mu_A"));
        assert_eq!(curve_from_json(&text).unwrap(), (s, None));
    }

    #[test]
    fn grid_validation() {
        let bad = |f: Vec<f64>| {
            Spectrum1D::new(
                f.clone(),
                vec![1.0; f.len()],
                FrequencyUnit::CyclesPerPixel,
                "x",
                Normalization::Transfer,
            )
        };
        assert!(bad(vec![0.0, 0.1]).is_err());
        assert!(bad(vec![0.2, 0.1]).is_err());
        assert!(bad(vec![0.1, 0.6]).is_err());
        assert!(bad(vec![0.1, 0.5]).is_ok());
    }

    #[test]
    fn interpolation_holds_ends() {
        let s = curve();
        assert_eq!(s.interpolate(0.0), 3.0);
        assert_eq!(s.interpolate(0.5), 0.5);
        assert!((s.interpolate(0.15) - 2.0).abs() < 1e-12);
        assert!((s.interpolate(0.3) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn dft_frequency_wraps() {
        assert_eq!(dft_frequency(0, 8), 0.0);
        assert_eq!(dft_frequency(4, 8), 0.5);
        assert_eq!(dft_frequency(5, 8), -0.375);
        assert_eq!(dft_frequency(2, 5), 0.4);
        assert_eq!(dft_frequency(3, 5), -0.4);
    }
}
