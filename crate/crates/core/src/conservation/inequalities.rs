use std::collections::HashMap;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::{evaluate_at_points, grad_l2, lp_norm, ComplexField, Space};

/// Cumulative trapezoid of uniformly spaced samples, starting at zero.
fn cumulative_trapezoid<T: Real>(f: &[T], h: T) -> Vec<T> {
    let half = h / T::lit(2.0);
    let mut out = Vec::with_capacity(f.len());
    let mut acc = T::zero();
    out.push(acc);
    for w in f.windows(2) {
        acc += half * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// `(∫_s^t τ^{-2} (∫_s^τ F)^2 dτ, 4 ∫_s^t F^2)` for `F >= 0` sampled on a
/// uniform lattice of `[s, t]` including both ends.
pub fn hardy_check<T: Real>(samples: &[T], s: T, t: T) -> Result<(T, T)> {
    if !(s > T::zero()) || !(t > s) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("Hardy check needs 0 < s < t, got {s}, {t}")));
    }
    if samples.len() < 2 {
        return Err(Error::InvalidArgument("Hardy check needs at least two samples".into()));
    }
    if let Some(bad) = samples.iter().find(|v| !(**v >= T::zero()) || !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("Hardy check needs finite F >= 0, got {bad}")));
    }
    let h = (t - s) / T::from_usize_lossy(samples.len() - 1);
    let inner = cumulative_trapezoid(samples, h);
    let outer: Vec<T> = inner
        .iter()
        .enumerate()
        .map(|(k, &i)| {
            let tau = s + h * T::from_usize_lossy(k);
            i * i / (tau * tau)
        })
        .collect();
    let sq: Vec<T> = samples.iter().map(|&f| f * f).collect();
    let lhs = *cumulative_trapezoid(&outer, h).last().expect("nonempty");
    let rhs = T::lit(4.0) * *cumulative_trapezoid(&sq, h).last().expect("nonempty");
    Ok((lhs, rhs))
}

/// Largest relative spread of a 2D field over lattice orbits of equal
/// `k_1^2 + k_2^2` (indices centred on the origin); zero for 1D fields.
pub fn angular_variance<T: Real>(field: &ComplexField<T>) -> T {
    let grid = field.grid();
    if grid.dim() == 1 {
        return T::zero();
    }
    let peak = field.max_abs();
    if peak == T::zero() {
        return T::zero();
    }
    let half = (grid.points_per_dim() / 2) as i64;
    let orbit = |idx: usize| {
        let [a, b] = grid.unflatten(idx);
        let (k1, k2) = (a as i64 - half, b as i64 - half);
        k1 * k1 + k2 * k2
    };
    let mut sums: HashMap<i64, (Complex<T>, usize)> = HashMap::new();
    for (idx, z) in field.values().iter().enumerate() {
        let e = sums.entry(orbit(idx)).or_insert((Complex::new(T::zero(), T::zero()), 0));
        e.0 = e.0 + z;
        e.1 += 1;
    }
    let mut spread: HashMap<i64, T> = HashMap::new();
    for (idx, z) in field.values().iter().enumerate() {
        let key = orbit(idx);
        let (sum, count) = sums[&key];
        let mean = sum / T::from_usize_lossy(count);
        *spread.entry(key).or_insert(T::zero()) += (z - mean).norm_sqr() / T::from_usize_lossy(count);
    }
    spread.into_values().fold(T::zero(), T::max)
        / (peak * peak)
}

/// Angular variance above which a 2D field is not treated as radial.
pub const RADIAL_THRESHOLD: f64 = 1e-8;

/// `(lhs, rhs)` of the one-point Gagliardo–Nirenberg bound.
///
/// * 1D: `||φ||_∞ <= p^{1/p} ||φ||_{2p-2}^{1-1/p} ||φ'||^{1/p}`, `radius`
///   ignored.
/// * 2D radial: `|φ(x)|^p <= (p/|x|) ||φ||_{2p-2}^{p-1} ||∇φ||` at
///   `|x| = radius > 0`.
pub fn gn_linf_bound_check<T: Real>(field: &ComplexField<T>, p: T, radius: Option<T>) -> Result<(T, T)> {
    field.expect_space(Space::Physical)?;
    if !(p >= T::lit(1.5)) || !p.is_finite() {
        return Err(Error::InvalidArgument(format!("exponent p = {p} must be at least 3/2")));
    }
    let q = p + p - T::lit(2.0);
    let lq = lp_norm(field, q)?;
    let grad = grad_l2(field)?;
    match field.grid().dim() {
        1 => {
            let lhs = field.max_abs();
            let rhs = p.powf(p.recip()) * lq.powf(T::one() - p.recip()) * grad.powf(p.recip());
            Ok((lhs, rhs))
        }
        _ => {
            let r = match radius {
                Some(r) if r > T::zero() && r.is_finite() => r,
                _ => {
                    return Err(Error::InvalidArgument(
                        "2D bound needs an evaluation radius > 0".into(),
                    ))
                }
            };
            let spread = angular_variance(field);
            if spread > T::lit(RADIAL_THRESHOLD) {
                return Err(Error::NotRadial(spread.to_f64_lossy()));
            }
            let value = evaluate_at_points(field, &[[r, T::zero()]])?[0];
            let lhs = value.norm().powf(p);
            let rhs = p / r * lq.powf(p - T::one()) * grad;
            Ok((lhs, rhs))
        }
    }
}
