//! Pseudoconformal energy with its dissipation history, in the direct frame
//!
//! `(1+t)^{-1} ||J(1+t) u||^2 + c (1+t) ||u||_q^q + ∫_0^t (1+s)^{-2} ||J(1+s) u(s)||^2 ds = C_0`
//!
//! and in the compactified frame
//!
//! `(1-τ) ||∇v||^2 + c ||v||_q^q + ∫_0^τ ||∇v||^2 dσ = C_*`,
//!
//! with `q = 2 + 2/n`, `c = 2n/(n+1)`, for the power nonlinearity with `n`
//! equal to the dimension.

use crate::error::{Error, Result};
use crate::operators::j_norm;
use crate::scalar::Real;
use crate::solver::{Frame, NonlinearityKind, Observer, Snapshot};
use crate::spectral::{grad_l2, lp_power, ComplexField};

fn critical_exponent<T: Real>(field: &ComplexField<T>, kind: NonlinearityKind) -> Result<u32> {
    match kind {
        NonlinearityKind::Power { n } if n as usize == field.grid().dim() => Ok(n),
        other => Err(Error::InvalidArgument(format!(
            "pseudoconformal identities need the critical power nonlinearity, got {other:?} in {}D",
            field.grid().dim()
        ))),
    }
}

/// `(c, q) = (2n/(n+1), 2 + 2/n)`.
fn coefficients<T: Real>(n: u32) -> (T, T) {
    let n = T::from_usize_lossy(n as usize);
    let two = T::lit(2.0);
    (two * n / (n + T::one()), two + two / n)
}

fn relative<T: Real>(lhs: T, reference: T) -> T {
    let d = (lhs - reference).abs();
    if reference > T::zero() {
        d / reference
    } else {
        d
    }
}

/// One checkpoint of the direct-frame identity.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PseudoconformalRecord<T: Real> {
    pub time: T,
    /// `(1+t)^{-1} ||J(1+t) u||^2`.
    pub kinetic: T,
    /// `c (1+t) ||u||_q^q`.
    pub potential: T,
    pub dissipation: T,
    /// `|kinetic + potential + dissipation - C_0| / C_0`.
    pub residual: T,
    /// `||J(1+t) u||^2 / (C_0 (1+t))`; at most one up to the residual.
    pub j_growth_ratio: T,
    /// `dissipation / C_0`; at most one up to the residual.
    pub dissipation_ratio: T,
}

#[derive(Debug, Clone)]
pub struct PseudoconformalLedger<T: Real> {
    n: u32,
    c0: T,
    dissipation: T,
    /// Latest node: time, `||J(1+t)u||^2`, potential term.
    node: Option<(T, T, T)>,
    records: Vec<PseudoconformalRecord<T>>,
}

impl<T: Real> PseudoconformalLedger<T> {
    /// Takes the initial datum at `t = 0`.
    pub fn new(u0: &ComplexField<T>, kind: NonlinearityKind) -> Result<Self> {
        let n = critical_exponent(u0, kind)?;
        let (c, q) = coefficients::<T>(n);
        let j = j_norm(u0, T::one())?;
        Ok(Self {
            n,
            c0: j * j + c * lp_power(u0, q),
            dissipation: T::zero(),
            node: None,
            records: Vec::new(),
        })
    }

    pub fn c0(&self) -> T {
        self.c0
    }

    pub fn dissipation(&self) -> T {
        self.dissipation
    }

    pub fn records(&self) -> &[PseudoconformalRecord<T>] {
        &self.records
    }

    pub fn latest_time(&self) -> Option<T> {
        self.node.map(|(t, _, _)| t)
    }

    fn terms(&self, u: &ComplexField<T>, t: T) -> Result<(T, T)> {
        let (c, q) = coefficients::<T>(self.n);
        let j = j_norm(u, T::one() + t)?;
        Ok((j * j, c * (T::one() + t) * lp_power(u, q)))
    }

    /// Adds the trapezoid panel of the dissipation up to `t`. The first call
    /// must be at `t = 0`; repeating the latest time is a no-op.
    pub fn update(&mut self, u: &ComplexField<T>, t: T) -> Result<()> {
        match self.node {
            None if t != T::zero() => {
                return Err(Error::TimeMismatch { expected: 0.0, found: t.to_f64_lossy() })
            }
            Some((p, _, _)) if t == p => return Ok(()),
            Some((p, _, _)) if t < p => {
                return Err(Error::NonMonotoneTime {
                    previous: p.to_f64_lossy(),
                    requested: t.to_f64_lossy(),
                })
            }
            _ => {}
        }
        let (x, pot) = self.terms(u, t)?;
        let s = T::one() + t;
        if let Some((p, x0, _)) = self.node {
            let s0 = T::one() + p;
            self.dissipation += (t - p) / T::lit(2.0) * (x0 / (s0 * s0) + x / (s * s));
        }
        self.node = Some((t, x, pot));
        Ok(())
    }

    fn record_from(&self, t: T, x: T, potential: T) -> PseudoconformalRecord<T> {
        let s = T::one() + t;
        let kinetic = x / s;
        let ratio = |v: T| if self.c0 > T::zero() { v / self.c0 } else { v };
        PseudoconformalRecord {
            time: t,
            kinetic,
            potential,
            dissipation: self.dissipation,
            residual: relative(kinetic + potential + self.dissipation, self.c0),
            j_growth_ratio: ratio(x / s),
            dissipation_ratio: ratio(self.dissipation),
        }
    }

    /// Relative residual of the identity at `t`, where the ledger must be
    /// current.
    pub fn residual(&self, u: &ComplexField<T>, t: T) -> Result<T> {
        match self.node {
            Some((p, _, _)) if p == t => {
                let (x, pot) = self.terms(u, t)?;
                Ok(self.record_from(t, x, pot).residual)
            }
            other => Err(Error::TimeMismatch {
                expected: t.to_f64_lossy(),
                found: other.map_or(f64::NAN, |(p, _, _)| p.to_f64_lossy()),
            }),
        }
    }

    /// Stores a record for the latest node.
    pub fn checkpoint_latest(&mut self) -> Result<PseudoconformalRecord<T>> {
        let (t, x, pot) = self
            .node
            .ok_or_else(|| Error::InvalidArgument("ledger has no nodes yet".into()))?;
        let r = self.record_from(t, x, pot);
        if self.records.last().is_none_or(|l| l.time < t) {
            self.records.push(r);
        }
        Ok(r)
    }

    /// Whether `kinetic + potential` never increases between records by
    /// more than `tolerance * C_0`.
    pub fn state_part_monotone(&self, tolerance: T) -> bool {
        self.records.windows(2).all(|w| {
            w[1].kinetic + w[1].potential <= w[0].kinetic + w[0].potential + tolerance * self.c0
        })
    }
}

impl<T: Real> Observer<T> for PseudoconformalLedger<T> {
    fn node(&mut self, snap: &Snapshot<'_, T>) -> Result<()> {
        if snap.frame != Frame::Direct {
            return Err(Error::InvalidArgument("direct-frame ledger fed a compactified state".into()));
        }
        self.update(snap.field, snap.time)
    }

    fn checkpoint(&mut self, snap: &Snapshot<'_, T>) -> Result<()> {
        self.update(snap.field, snap.time)?;
        self.checkpoint_latest().map(|_| ())
    }
}

/// `|(1-τ)||∇v||^2 + c||v||_q^q + dissipation - C_*| / C_*` in the
/// compactified frame (absolute when `C_* = 0`).
pub fn v_frame_energy_residual<T: Real>(
    v: &ComplexField<T>,
    tau: T,
    dissipation: T,
    c_star: T,
    kind: NonlinearityKind,
) -> Result<T> {
    if !(tau >= T::zero() && tau < T::one()) {
        return Err(Error::InvalidArgument(format!("compactified time {tau} outside [0, 1)")));
    }
    let n = critical_exponent(v, kind)?;
    let (c, q) = coefficients::<T>(n);
    let g = grad_l2(v)?;
    Ok(relative((T::one() - tau) * g * g + c * lp_power(v, q) + dissipation, c_star))
}

/// One checkpoint of the compactified identity.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct VFrameRecord<T: Real> {
    pub tau: T,
    pub dissipation: T,
    pub residual: T,
}

/// Running `∫_0^τ ||∇v||^2` and the constant `C_*` for a compactified run.
#[derive(Debug, Clone)]
pub struct VFrameLedger<T: Real> {
    kind: NonlinearityKind,
    c_star: T,
    dissipation: T,
    node: Option<(T, T)>,
    records: Vec<VFrameRecord<T>>,
}

impl<T: Real> VFrameLedger<T> {
    /// Takes the compactified datum at `τ = 0`.
    pub fn new(v0: &ComplexField<T>, kind: NonlinearityKind) -> Result<Self> {
        let n = critical_exponent(v0, kind)?;
        let (c, q) = coefficients::<T>(n);
        let g = grad_l2(v0)?;
        Ok(Self {
            kind,
            c_star: g * g + c * lp_power(v0, q),
            dissipation: T::zero(),
            node: None,
            records: Vec::new(),
        })
    }

    pub fn c_star(&self) -> T {
        self.c_star
    }

    pub fn dissipation(&self) -> T {
        self.dissipation
    }

    pub fn records(&self) -> &[VFrameRecord<T>] {
        &self.records
    }

    pub fn update(&mut self, v: &ComplexField<T>, tau: T) -> Result<()> {
        match self.node {
            None if tau != T::zero() => {
                return Err(Error::TimeMismatch { expected: 0.0, found: tau.to_f64_lossy() })
            }
            Some((p, _)) if tau == p => return Ok(()),
            Some((p, _)) if tau < p => {
                return Err(Error::NonMonotoneTime {
                    previous: p.to_f64_lossy(),
                    requested: tau.to_f64_lossy(),
                })
            }
            _ => {}
        }
        let g = grad_l2(v)?;
        let g2 = g * g;
        if let Some((p, g0)) = self.node {
            self.dissipation += (tau - p) / T::lit(2.0) * (g0 + g2);
        }
        self.node = Some((tau, g2));
        Ok(())
    }

    pub fn residual(&self, v: &ComplexField<T>, tau: T) -> Result<T> {
        match self.node {
            Some((p, _)) if p == tau => v_frame_energy_residual(v, tau, self.dissipation, self.c_star, self.kind),
            other => Err(Error::TimeMismatch {
                expected: tau.to_f64_lossy(),
                found: other.map_or(f64::NAN, |(p, _)| p.to_f64_lossy()),
            }),
        }
    }
}

impl<T: Real> Observer<T> for VFrameLedger<T> {
    fn node(&mut self, snap: &Snapshot<'_, T>) -> Result<()> {
        if snap.frame != Frame::Pseudoconformal {
            return Err(Error::InvalidArgument("compactified ledger fed a direct-frame state".into()));
        }
        self.update(snap.field, snap.time)
    }

    fn checkpoint(&mut self, snap: &Snapshot<'_, T>) -> Result<()> {
        self.update(snap.field, snap.time)?;
        let residual = self.residual(snap.field, snap.time)?;
        if self.records.last().is_none_or(|l| l.tau < snap.time) {
            self.records.push(VFrameRecord { tau: snap.time, dissipation: self.dissipation, residual });
        }
        Ok(())
    }
}
