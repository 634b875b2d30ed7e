use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::{ComplexField, Space};

use super::weak::besov_weak_norm;

/// `||v_t - v_s||_{L^2}`.
pub fn cauchy_gap<T: Real>(v_t: &ComplexField<T>, v_s: &ComplexField<T>) -> Result<T> {
    Ok(v_t.sub(v_s)?.l2())
}

/// Upper bound for `|(v(t) - v(s) | φ)|` built from the growth integral:
///
/// `(1/s - 1/t)^{1/2} (H(t) - H(s))^{1/2} ||∇Fφ|| + (H(t) - H(s))^{1/2} H(t)^{1/2} ||Fφ||_∞`.
///
/// The overall constant is not tracked; callers compare ratios against
/// measured gaps. `s == t` gives zero.
pub fn tail_bound<T: Real>(h_s: T, h_t: T, s: T, t: T, grad_f_phi_norm: T, sup_f_phi: T) -> Result<T> {
    if !(s >= T::one()) || !(t >= s) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "tail bound needs 1 <= s <= t, got s = {s}, t = {t}"
        )));
    }
    if !(h_s >= T::zero() && h_t >= h_s) {
        return Err(Error::InvalidArgument(format!(
            "tail bound needs 0 <= H(s) <= H(t), got {h_s}, {h_t}"
        )));
    }
    if !(grad_f_phi_norm >= T::zero() && sup_f_phi >= T::zero()) {
        return Err(Error::InvalidArgument("test-function norms must be nonnegative".into()));
    }
    let dh = (h_t - h_s).sqrt();
    let ds = (s.recip() - t.recip()).max(T::zero()).sqrt();
    Ok(ds * dh * grad_f_phi_norm + dh * h_t.sqrt() * sup_f_phi)
}

/// One recorded checkpoint of the modified profile.
#[derive(Debug, Clone)]
pub struct LedgerEntry<T: Real> {
    pub time: T,
    pub profile: ComplexField<T>,
    /// `H(time)`.
    pub h: T,
}

/// Gap diagnostics between two checkpoints `s < t`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PairReport<T: Real> {
    pub s: T,
    pub t: T,
    pub l2_gap: T,
    pub weak_gap: T,
    pub tail_bound: T,
}

/// Checkpointed modified profiles of one run, with the norms of the test
/// function used for tail bounds.
#[derive(Debug, Clone)]
pub struct ConvergenceLedger<T: Real> {
    entries: Vec<LedgerEntry<T>>,
    /// Index of the weak norm (negative).
    pub s_index: T,
    /// `||∇Fφ||` of the reference test function.
    pub grad_f_phi_norm: T,
    /// `||Fφ||_∞` of the reference test function.
    pub sup_f_phi: T,
}

impl<T: Real> ConvergenceLedger<T> {
    pub fn new(s_index: T) -> Self {
        Self {
            entries: Vec::new(),
            s_index,
            grad_f_phi_norm: T::one(),
            sup_f_phi: T::one(),
        }
    }

    /// Appends a checkpoint; times must increase strictly and all profiles
    /// share one grid.
    pub fn push(&mut self, time: T, profile: ComplexField<T>, h: T) -> Result<()> {
        profile.expect_space(Space::Physical)?;
        if let Some(last) = self.entries.last() {
            if !(time > last.time) {
                return Err(Error::NonMonotoneTime {
                    previous: last.time.to_f64_lossy(),
                    requested: time.to_f64_lossy(),
                });
            }
            last.profile.expect_same_grid(&profile)?;
        }
        self.entries.push(LedgerEntry { time, profile, h });
        Ok(())
    }

    pub fn entries(&self) -> &[LedgerEntry<T>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn times(&self) -> Vec<T> {
        self.entries.iter().map(|e| e.time).collect()
    }

    /// Index of the checkpoint at `time` (exact match up to a relative
    /// `1e-9`).
    pub fn find(&self, time: T) -> Option<usize> {
        let tol = T::lit(1e-9) * time.abs().max(T::one());
        self.entries.iter().position(|e| (e.time - time).abs() <= tol)
    }

    /// Diagnostics between entries `i < j`.
    pub fn pair(&self, i: usize, j: usize) -> Result<PairReport<T>> {
        let (a, b) = match (self.entries.get(i), self.entries.get(j)) {
            (Some(a), Some(b)) if i < j => (a, b),
            _ => return Err(Error::InvalidArgument(format!("bad checkpoint pair ({i}, {j})"))),
        };
        let diff = b.profile.sub(&a.profile)?;
        Ok(PairReport {
            s: a.time,
            t: b.time,
            l2_gap: diff.l2(),
            weak_gap: besov_weak_norm(&diff, self.s_index),
            tail_bound: tail_bound(a.h, b.h, a.time, b.time, self.grad_f_phi_norm, self.sup_f_phi)?,
        })
    }

    /// Reports for every pair `(t, 2t)` present in the ledger, in time order.
    pub fn dyadic_pairs(&self) -> Result<Vec<PairReport<T>>> {
        let mut out = Vec::new();
        for (i, e) in self.entries.iter().enumerate() {
            if e.time < T::one() {
                continue;
            }
            if let Some(j) = self.find(e.time + e.time) {
                out.push(self.pair(i, j)?);
            }
        }
        Ok(out)
    }

    /// Reports between each consecutive pair of checkpoints at `t >= 1`.
    pub fn consecutive_pairs(&self) -> Result<Vec<PairReport<T>>> {
        let first = self.entries.iter().position(|e| e.time >= T::one());
        match first {
            None => Ok(Vec::new()),
            Some(f) => (f..self.entries.len().saturating_sub(1)).map(|i| self.pair(i, i + 1)).collect(),
        }
    }
}

/// Estimate of the scattering state taken at the last checkpoint.
#[derive(Debug, Clone)]
pub struct FinalState<T: Real> {
    pub time: T,
    pub u_plus: ComplexField<T>,
    /// `sup ||v(t) - v(T)||` over the checkpoints with `T/4 <= t < T`.
    pub achieved_gap: T,
    /// Gaps between consecutive checkpoints beyond `t = 1`.
    pub consecutive_gaps: Vec<T>,
    /// Whether the consecutive gaps never increase.
    pub monotone: bool,
}

/// Needs at least three checkpoints strictly beyond `t = 1`.
pub fn extract_final_state<T: Real>(ledger: &ConvergenceLedger<T>) -> Result<FinalState<T>> {
    let late: Vec<&LedgerEntry<T>> = ledger.entries().iter().filter(|e| e.time > T::one()).collect();
    if late.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "need three checkpoints beyond t = 1, have {}",
            late.len()
        )));
    }
    let last = late[late.len() - 1];
    let window = last.time / T::lit(4.0);
    let mut achieved = T::zero();
    for e in &late[..late.len() - 1] {
        if e.time >= window {
            achieved = achieved.max(cauchy_gap(&last.profile, &e.profile)?);
        }
    }
    let gaps = late
        .windows(2)
        .map(|w| cauchy_gap(&w[1].profile, &w[0].profile))
        .collect::<Result<Vec<T>>>()?;
    let monotone = gaps.windows(2).all(|w| w[1] <= w[0]);
    Ok(FinalState {
        time: last.time,
        u_plus: last.profile.clone(),
        achieved_gap: achieved,
        consecutive_gaps: gaps,
        monotone,
    })
}
