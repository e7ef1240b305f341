use super::MetricsError;

/// `integral f(u) du/u` from the first positive grid point `u1` to `u_max`,
/// by the trapezoid rule in `ln u`.
///
/// Points above `u_max` are ignored. When the grid stops short of `u_max` the
/// last value is held out to it. Returns the integral and `u1`.
pub fn integrate_log(frequencies: &[f64], values: &[f64], u_max: f64) -> Result<(f64, f64), MetricsError> {
    if frequencies.len() != values.len() {
        return Err(MetricsError::Shape("grid and values differ in length".into()));
    }
    let mut pts: Vec<(f64, f64)> = frequencies
        .iter()
        .zip(values)
        .filter(|(&u, _)| u > 0.0 && u <= u_max)
        .map(|(&u, &v)| (u.ln(), v))
        .collect();
    let Some(&(first, _)) = pts.first() else {
        return Err(MetricsError::Domain(format!("no grid point in (0, {u_max}]")));
    };
    let &(last_x, last_v) = pts.last().unwrap();
    let end = u_max.ln();
    if end > last_x {
        pts.push((end, last_v));
    }
    let integral = pts
        .windows(2)
        .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
        .sum();
    Ok((integral, first.exp()))
}
