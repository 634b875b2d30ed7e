//! Power-law fits of decay series.

use serde::Serialize;

use crate::error::RunError;

/// `value ≈ c t^{-alpha}` in the log-log least-squares sense, with the
/// scaled suprema `sup t^{1/3} value` and `sup t^{dim/2} value`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    pub c: f64,
    pub alpha: f64,
    pub points: usize,
    pub sup_t_third: f64,
    pub sup_t_half_dim: f64,
}

/// Fits all given points; needs at least four, times `>= 1`, values `> 0`.
pub fn fit_decay_rate(times: &[f64], values: &[f64], dim: usize) -> Result<DecayFit, RunError> {
    if times.len() != values.len() {
        return Err(RunError::Usage("times and values differ in length".into()));
    }
    if times.len() < 4 {
        return Err(RunError::Usage(format!("decay fit needs at least 4 points, got {}", times.len())));
    }
    if let Some(v) = values.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(RunError::Usage(format!("decay fit needs positive values, got {v}")));
    }
    if let Some(t) = times.iter().find(|t| !(**t >= 1.0) || !t.is_finite()) {
        return Err(RunError::Usage(format!("decay fit needs times >= 1, got {t}")));
    }
    let m = times.len() as f64;
    let xs: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(RunError::Usage("decay fit needs distinct times".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let sup = |p: f64| times.iter().zip(values).map(|(t, v)| t.powf(p) * v).fold(0.0, f64::max);
    Ok(DecayFit {
        c: (my - slope * mx).exp(),
        alpha: -slope,
        points: times.len(),
        sup_t_third: sup(1.0 / 3.0),
        sup_t_half_dim: sup(dim as f64 / 2.0),
    })
}

/// Fits the points inside the window `[T/4, T]`, `T` the last time.
pub fn fit_window(times: &[f64], values: &[f64], dim: usize) -> Result<DecayFit, RunError> {
    let end = times.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (t, v): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(values)
        .filter(|(t, _)| **t >= end / 4.0 && **t >= 1.0)
        .map(|(t, v)| (*t, *v))
        .unzip();
    fit_decay_rate(&t, &v, dim)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_laws() {
        let t: Vec<f64> = (1..=20).map(|k| k as f64).collect();
        let v: Vec<f64> = t.iter().map(|t| t.powf(-0.5)).collect();
        let f = fit_decay_rate(&t, &v, 1).unwrap();
        assert!((f.alpha - 0.5).abs() < 1e-12 && (f.c - 1.0).abs() < 1e-12);
        assert!((f.sup_t_half_dim - 1.0).abs() < 1e-12);
        let v: Vec<f64> = t.iter().map(|t| 3.0 * t.powf(-1.0 / 3.0)).collect();
        let f = fit_decay_rate(&t, &v, 1).unwrap();
        assert!((f.alpha - 1.0 / 3.0).abs() < 1e-12 && (f.c - 3.0).abs() < 1e-12);
        assert!((f.sup_t_third - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit_decay_rate(&[1.0, 2.0, 3.0], &[1.0, 1.0, 1.0], 1).is_err());
        assert!(fit_decay_rate(&[1.0, 2.0, 3.0, 4.0], &[1.0, 0.0, 1.0, 1.0], 1).is_err());
        assert!(fit_decay_rate(&[0.5, 2.0, 3.0, 4.0], &[1.0, 1.0, 1.0, 1.0], 1).is_err());
    }

    #[test]
    fn window_keeps_last_quarter() {
        let t: Vec<f64> = (1..=64).map(|k| k as f64).collect();
        // Transient before t = 16 must not affect the fit.
        let v: Vec<f64> = t.iter().map(|&t| if t < 16.0 { 1.0 } else { 2.0 * t.powf(-0.5) }).collect();
        let f = fit_window(&t, &v, 1).unwrap();
        assert_eq!(f.points, 49);
        assert!((f.alpha - 0.5).abs() < 1e-12);
    }
}
