//! Change of frame `u(t, x) = (1+t)^{-n/2} v(τ, x/(1+t)) e^{i|x|^2/(2(1+t))}`,
//! `τ = t/(1+t)`, which maps `t ∈ [0, ∞)` onto `τ ∈ [0, 1)`.

use num_complex::Complex;

use super::evolve::{evolve, EvolveError, EvolveOptions, Observer, Trajectory};
use super::{Frame, SolverState};
use crate::error::{Error, Result};
use crate::operators::rescale;
use crate::scalar::Real;
use crate::spectral::{ComplexField, Space};

fn half_dim<T: Real>(field: &ComplexField<T>) -> T {
    T::from_usize_lossy(field.grid().dim()) / T::lit(2.0)
}

/// Direct-frame snapshot at `t >= 0` to pseudoconformal `(v(τ), τ)`:
/// `v(τ, y) = (1+t)^{n/2} u(t, (1+t) y) e^{-i(1+t)|y|^2/2}`.
pub fn pseudoconformal_map<T: Real>(u: &ComplexField<T>, t: T) -> Result<(ComplexField<T>, T)> {
    if !(t >= T::zero()) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "pseudoconformal map needs t >= 0, got {t}"
        )));
    }
    u.expect_space(Space::Physical)?;
    let s = T::one() + t;
    let mut v = rescale(u, s, Space::Physical)?.scaled(Complex::new(s.powf(half_dim(u)), T::zero()));
    let c = s / T::lit(2.0);
    let grid = v.grid().clone();
    for (z, &y2) in v.values_mut().iter_mut().zip(grid.x_sq()) {
        *z = *z * Complex::from_polar(T::one(), -c * y2);
    }
    Ok((v, t / s))
}

/// Pseudoconformal `v(τ)`, `τ ∈ [0, 1)`, back to `(u(t), t)` with
/// `t = τ/(1-τ)`.
pub fn pseudoconformal_inverse<T: Real>(
    v: &ComplexField<T>,
    tau: T,
) -> Result<(ComplexField<T>, T)> {
    if !(tau >= T::zero() && tau < T::one()) {
        return Err(Error::InvalidArgument(format!(
            "pseudoconformal time {tau} outside [0, 1)"
        )));
    }
    v.expect_space(Space::Physical)?;
    let s = (T::one() - tau).recip();
    let mut u = rescale(v, s.recip(), Space::Physical)?
        .scaled(Complex::new(s.powf(-half_dim(v)), T::zero()));
    let c = (s + s).recip();
    let grid = u.grid().clone();
    for (z, &x2) in u.values_mut().iter_mut().zip(grid.x_sq()) {
        *z = *z * Complex::from_polar(T::one(), c * x2);
    }
    Ok((u, tau * s))
}

/// Evolves a pseudoconformal-frame state to `tau_end <= 1 - eps_min`.
pub fn evolve_pseudoconformal<T: Real>(
    state: SolverState<T>,
    tau_end: T,
    checkpoints: &[T],
    observers: &mut [&mut dyn Observer<T>],
    options: &EvolveOptions,
) -> std::result::Result<Trajectory<T>, EvolveError<T>> {
    if state.frame != Frame::Pseudoconformal {
        return Err(EvolveError {
            violation: Error::InvalidArgument("state is not in the pseudoconformal frame".into())
                .into(),
            time: state.time.to_f64_lossy(),
            last_good: None,
        });
    }
    evolve(state, tau_end, checkpoints, observers, options)
}
