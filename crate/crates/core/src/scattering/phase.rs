use num_complex::Complex;

use crate::error::{Error, Result};
use crate::operators::{j_norm, profile_w};
use crate::scalar::Real;
use crate::solver::NonlinearityKind;
use crate::spectral::{inverse_fourier, ComplexField, Grid, Space};

/// Which phase factor multiplies the profile before transforming back.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseSign {
    /// `e^{+i Φ̃}`.
    Plus,
    /// `e^{-i Φ̃}`.
    Minus,
    /// No correction (control).
    Off,
}

impl PhaseSign {
    fn factor<T: Real>(self) -> Option<T> {
        match self {
            Self::Plus => Some(T::one()),
            Self::Minus => Some(-T::one()),
            Self::Off => None,
        }
    }
}

/// Running trapezoid integrals from `τ = 1`:
///
/// * `Φ̃_t(y) = ∫_1^t |u(τ, τ y)|^{2/n} dτ` on the fixed frequency lattice,
///   evaluated through `|u(τ, τ y)| = τ^{-d/2} |W(τ)(y)|`;
/// * `H(t) = ∫_1^t τ^{-2} ||J(τ) u(τ)||^2 dτ`.
///
/// The two integrals keep separate node histories. The first update of each
/// must happen at `τ = 1` (within the time tolerance) and only sets the
/// left node.
#[derive(Debug, Clone)]
pub struct PhaseAccumulator<T: Real> {
    grid: Grid<T>,
    kind: NonlinearityKind,
    phi: Vec<T>,
    phase_node: Option<(T, Vec<T>)>,
    h: T,
    h_node: Option<(T, T)>,
    tolerance: T,
}

impl<T: Real> PhaseAccumulator<T> {
    /// `tolerance` bounds both the distance of the first node from `τ = 1`
    /// and the time mismatch accepted by [`modified_profile`]; half the
    /// solver step is the natural choice.
    pub fn new(grid: &Grid<T>, kind: NonlinearityKind, tolerance: T) -> Self {
        Self {
            grid: grid.clone(),
            kind,
            phi: vec![T::zero(); grid.len()],
            phase_node: None,
            h: T::zero(),
            h_node: None,
            tolerance: tolerance.abs(),
        }
    }

    pub fn phi_tilde(&self) -> &[T] {
        &self.phi
    }

    pub fn h(&self) -> T {
        self.h
    }

    /// Time of the latest phase node, if any.
    pub fn phase_time(&self) -> Option<T> {
        self.phase_node.as_ref().map(|(t, _)| *t)
    }

    pub fn h_time(&self) -> Option<T> {
        self.h_node.map(|(t, _)| t)
    }

    pub fn tolerance(&self) -> T {
        self.tolerance
    }

    pub fn kind(&self) -> NonlinearityKind {
        self.kind
    }

    /// Classifies a requested node time: `None` for a repeat of the previous
    /// node, `Some(prev)` for an advance.
    fn advance(&self, previous: Option<T>, tau: T) -> Result<Option<Option<T>>> {
        if !(tau >= T::one() - self.tolerance) || !tau.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "phase integrals start at t = 1, got {tau}"
            )));
        }
        match previous {
            None if (tau - T::one()).abs() > self.tolerance => Err(Error::InvalidArgument(
                format!("first node must sit at t = 1, got {tau}"),
            )),
            None => Ok(Some(None)),
            Some(p) if tau == p => Ok(None),
            Some(p) if tau < p => Err(Error::NonMonotoneTime {
                previous: p.to_f64_lossy(),
                requested: tau.to_f64_lossy(),
            }),
            Some(p) => Ok(Some(Some(p))),
        }
    }

    /// Integrand of the phase at one lattice point.
    #[inline]
    fn integrand(&self, tau: T, w_sq: T) -> T {
        let d = T::from_usize_lossy(self.grid.dim());
        match self.kind {
            NonlinearityKind::Linear => T::zero(),
            NonlinearityKind::Power { n } => {
                let n = T::from_usize_lossy(n as usize);
                // (τ^{-d} |W|^2)^{1/n}
                (w_sq * tau.powf(-d)).powf(n.recip())
            }
            NonlinearityKind::Saturated { .. } => self.kind.potential(w_sq * tau.powf(-d)),
        }
    }

    /// Adds the trapezoid panel from the previous node to `tau` using the
    /// profile `W(tau)` (frequency space).
    pub fn phase_update(&mut self, w: &ComplexField<T>, tau: T) -> Result<()> {
        w.expect_space(Space::Frequency)?;
        if !w.grid().same_as(&self.grid) {
            return Err(Error::GridMismatch);
        }
        let prev = match self.advance(self.phase_time(), tau)? {
            None => return Ok(()),
            Some(p) => p,
        };
        let f: Vec<T> = w
            .values()
            .iter()
            .map(|z| self.integrand(tau, z.norm_sqr()))
            .collect();
        if let (Some(t0), Some((_, f0))) = (prev, self.phase_node.as_ref()) {
            let half = (tau - t0) / T::lit(2.0);
            for ((p, a), b) in self.phi.iter_mut().zip(f0).zip(&f) {
                *p += half * (*a + *b);
            }
        }
        self.phase_node = Some((tau, f));
        Ok(())
    }

    /// Adds the trapezoid panel of `H` using `||J(tau) u(tau)||^2`.
    pub fn h_update_with_value(&mut self, tau: T, j_norm_sq: T) -> Result<()> {
        if !(j_norm_sq >= T::zero()) {
            return Err(Error::InvalidArgument(format!("squared norm {j_norm_sq}")));
        }
        let prev = match self.advance(self.h_time(), tau)? {
            None => return Ok(()),
            Some(p) => p,
        };
        let g = j_norm_sq / (tau * tau);
        if let (Some(t0), Some((_, g0))) = (prev, self.h_node) {
            self.h += (tau - t0) * (g0 + g) / T::lit(2.0);
        }
        self.h_node = Some((tau, g));
        Ok(())
    }

    /// Adds the trapezoid panel of `H` from the solution snapshot `u(tau)`.
    pub fn h_update(&mut self, u: &ComplexField<T>, tau: T) -> Result<()> {
        let j = j_norm(u, tau)?;
        self.h_update_with_value(tau, j * j)
    }

    /// Convenience: computes `W(tau)` and updates both integrals. Returns
    /// the profile for reuse.
    pub fn update_from_state(&mut self, u: &ComplexField<T>, tau: T) -> Result<ComplexField<T>> {
        let w = profile_w(u, tau)?;
        self.phase_update(&w, tau)?;
        self.h_update(u, tau)?;
        Ok(w)
    }
}

/// `v(t) = F^{-1} e^{±iΦ̃_t} W(t)` from a precomputed profile.
pub fn modified_profile_from_w<T: Real>(
    w: &ComplexField<T>,
    t: T,
    acc: &PhaseAccumulator<T>,
    sign: PhaseSign,
) -> Result<ComplexField<T>> {
    w.expect_space(Space::Frequency)?;
    let mut g = w.clone();
    if let Some(s) = sign.factor::<T>() {
        match acc.phase_time() {
            Some(ta) if (ta - t).abs() <= acc.tolerance() => {}
            Some(ta) => {
                return Err(Error::TimeMismatch {
                    expected: t.to_f64_lossy(),
                    found: ta.to_f64_lossy(),
                })
            }
            None if (t - T::one()).abs() <= acc.tolerance() => {}
            None => {
                return Err(Error::TimeMismatch {
                    expected: t.to_f64_lossy(),
                    found: 1.0,
                })
            }
        }
        if !w.grid().same_as(&acc.grid) {
            return Err(Error::GridMismatch);
        }
        for (z, &p) in g.values_mut().iter_mut().zip(acc.phi_tilde()) {
            *z = *z * Complex::from_polar(T::one(), s * p);
        }
    }
    inverse_fourier(&g)
}

/// `v(t) = F^{-1} e^{±iΦ̃_t} F M(t) U(-t) u(t)`; requires `t >= 1` and an
/// accumulator current at `t`.
pub fn modified_profile<T: Real>(
    u: &ComplexField<T>,
    t: T,
    acc: &PhaseAccumulator<T>,
    sign: PhaseSign,
) -> Result<ComplexField<T>> {
    let w = profile_w(u, t)?;
    modified_profile_from_w(&w, t, acc, sign)
}
