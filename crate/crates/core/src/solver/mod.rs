//! Strang split-step integration in the direct frame and in the
//! pseudoconformal frame.
//!
//! Direct frame: `i u_t + Δu/2 = g(|u|^2) u`.
//! Pseudoconformal frame: `i v_τ + Δv/2 = g(|v|^2) v / (1 - τ)`, `τ ∈ [0, 1)`.
//!
//! Both splittings use the exact free flow and the exact potential flow
//! (`|u|` is invariant under the latter), so every substep is unitary or
//! pointwise unimodular.

mod evolve;
mod pseudoconformal;
mod snapshot;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::{dft_in_place, ComplexField, Direction, Grid, Space};

pub use evolve::{
    evolve, BoundaryMonitor, EvolveError, EvolveOptions, Observer, Snapshot, StateRecord,
    Trajectory, Violation,
};
pub use pseudoconformal::{evolve_pseudoconformal, pseudoconformal_inverse, pseudoconformal_map};
pub use snapshot::{read_snapshot, write_snapshot, SNAPSHOT_MAGIC};

/// Gauge-invariant nonlinearity `u g(|u|^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NonlinearityKind {
    /// Free evolution.
    Linear,
    /// `g = |u|^{2/n}`, `n ∈ {1, 2}`.
    Power { n: u32 },
    /// `g = (1 + |u|^2)^{1/n} - 1`, `n >= 3`.
    Saturated { n: u32 },
}

impl NonlinearityKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Linear => Ok(()),
            Self::Power { n } if n == 1 || n == 2 => Ok(()),
            Self::Saturated { n } if n >= 3 => Ok(()),
            other => Err(Error::InvalidArgument(format!(
                "unsupported nonlinearity {other:?}"
            ))),
        }
    }

    /// The exponent parameter `n`, if any.
    pub fn exponent(&self) -> Option<u32> {
        match *self {
            Self::Linear => None,
            Self::Power { n } | Self::Saturated { n } => Some(n),
        }
    }

    /// `g(r)` for `r = |z|^2`.
    #[inline]
    pub fn potential<T: Real>(&self, r: T) -> T {
        match *self {
            Self::Linear => T::zero(),
            Self::Power { n } => match n {
                1 => r,
                2 => r.sqrt(),
                _ => r.powf(T::from_usize_lossy(n as usize).recip()),
            },
            Self::Saturated { n } => {
                (r.ln_1p() / T::from_usize_lossy(n as usize)).exp_m1()
            }
        }
    }
}

/// Which equation the stored field solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    /// `u(t)`, `t >= 0`.
    Direct,
    /// `v(τ)`, `τ ∈ [0, 1)`.
    Pseudoconformal,
}

/// A field together with its time, frame, nonlinearity and step size.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState<T: Real> {
    pub field: ComplexField<T>,
    pub time: T,
    pub frame: Frame,
    pub nonlinearity: NonlinearityKind,
    pub dt: T,
}

impl<T: Real> SolverState<T> {
    pub fn new(
        field: ComplexField<T>,
        time: T,
        frame: Frame,
        nonlinearity: NonlinearityKind,
        dt: T,
    ) -> Result<Self> {
        let s = Self {
            field,
            time,
            frame,
            nonlinearity,
            dt,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.field.expect_space(Space::Physical)?;
        self.field.check_finite("solver state")?;
        self.nonlinearity.validate()?;
        if !(self.dt > T::zero()) || !self.dt.is_finite() {
            return Err(Error::InvalidArgument(format!("time step {}", self.dt)));
        }
        if !self.time.is_finite() {
            return Err(Error::NonFinite("solver time"));
        }
        if self.frame == Frame::Pseudoconformal {
            if self.time < T::zero() || self.time >= T::one() {
                return Err(Error::InvalidArgument(format!(
                    "pseudoconformal time {} outside [0, 1)",
                    self.time
                )));
            }
            if let NonlinearityKind::Power { n } = self.nonlinearity {
                if n as usize != self.field.grid().dim() {
                    return Err(Error::InvalidArgument(format!(
                        "pseudoconformal frame needs the critical power n = dim, got n = {n}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Time integral of the potential coefficient over `[time, time + dt]`.
fn phase_weight<T: Real>(frame: Frame, time: T, dt: T) -> Result<T> {
    match frame {
        Frame::Direct => Ok(dt),
        Frame::Pseudoconformal => {
            let rem = T::one() - time;
            if !(time + dt < T::one()) {
                return Err(Error::CrossesSingularity {
                    tau: time.to_f64_lossy(),
                    dt: dt.to_f64_lossy(),
                });
            }
            // log((1 - τ) / (1 - τ - dt))
            Ok(-(-dt / rem).ln_1p())
        }
    }
}

fn apply_potential<T: Real>(buf: &mut [Complex<T>], kind: NonlinearityKind, weight: T) {
    if kind == NonlinearityKind::Linear {
        return;
    }
    for z in buf.iter_mut() {
        let theta = weight * kind.potential(z.norm_sqr());
        *z = *z * Complex::from_polar(T::one(), -theta);
    }
}

/// Exact potential substep of length `dt`; the time is not advanced.
pub fn nonlinear_substep<T: Real>(state: &SolverState<T>, dt: T) -> Result<SolverState<T>> {
    if !(dt > T::zero()) {
        return Err(Error::InvalidArgument(format!("substep length {dt}")));
    }
    let w = phase_weight(state.frame, state.time, dt)?;
    let mut out = state.clone();
    apply_potential(out.field.values_mut(), state.nonlinearity, w);
    Ok(out)
}

/// Strang stepper with the half-step free multiplier cached for one `dt`.
#[derive(Debug, Clone)]
pub struct StrangStepper<T: Real> {
    grid: Grid<T>,
    dt: T,
    /// `e^{-i (dt/2) |xi|^2 / 2} / N^dim` in raw DFT ordering.
    half: Vec<Complex<T>>,
}

impl<T: Real> StrangStepper<T> {
    pub fn new(grid: &Grid<T>, dt: T) -> Self {
        let inv_len = T::one() / T::from_usize_lossy(grid.len());
        let q = dt / T::lit(4.0);
        let half = grid
            .xi_sq_dft()
            .iter()
            .map(|&k2| Complex::from_polar(inv_len, -q * k2))
            .collect();
        Self {
            grid: grid.clone(),
            dt,
            half,
        }
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    fn half_free(&self, buf: &mut [Complex<T>]) {
        dft_in_place(&self.grid, buf, Direction::Forward);
        for (z, m) in buf.iter_mut().zip(&self.half) {
            *z = *z * m;
        }
        dft_in_place(&self.grid, buf, Direction::Inverse);
    }

    /// Advances `state` by the cached step.
    pub fn step(&self, state: &mut SolverState<T>) -> Result<()> {
        if !state.field.grid().same_as(&self.grid) {
            return Err(Error::GridMismatch);
        }
        let w = phase_weight(state.frame, state.time, self.dt)?;
        let buf = state.field.values_mut();
        self.half_free(buf);
        apply_potential(buf, state.nonlinearity, w);
        self.half_free(buf);
        state.time += self.dt;
        Ok(())
    }
}

/// One Strang step of length `dt`: half free flow, full potential flow,
/// half free flow.
pub fn strang_step<T: Real>(state: &SolverState<T>, dt: T) -> Result<SolverState<T>> {
    if !(dt > T::zero()) {
        return Err(Error::InvalidArgument(format!("time step {dt}")));
    }
    let mut out = state.clone();
    StrangStepper::new(state.field.grid(), dt).step(&mut out)?;
    out.field.check_finite("strang_step")?;
    Ok(out)
}
