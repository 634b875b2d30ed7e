use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::solver::{Frame, Observer, Snapshot};
use crate::spectral::ComplexField;

use super::ledger::ConvergenceLedger;
use super::phase::{modified_profile_from_w, PhaseAccumulator, PhaseSign};

/// Feeds direct-frame solver nodes at `t >= 1` into a phase accumulator and
/// records modified profiles at checkpoints, one ledger per sign.
#[derive(Debug)]
pub struct ScatteringObserver<T: Real> {
    pub accumulator: PhaseAccumulator<T>,
    signs: Vec<PhaseSign>,
    ledgers: Vec<ConvergenceLedger<T>>,
    latest: Option<(T, ComplexField<T>)>,
}

impl<T: Real> ScatteringObserver<T> {
    pub fn new(accumulator: PhaseAccumulator<T>, signs: &[PhaseSign], s_index: T) -> Self {
        Self {
            accumulator,
            signs: signs.to_vec(),
            ledgers: signs.iter().map(|_| ConvergenceLedger::new(s_index)).collect(),
            latest: None,
        }
    }

    pub fn ledger(&self, sign: PhaseSign) -> Option<&ConvergenceLedger<T>> {
        self.signs.iter().position(|&s| s == sign).map(|i| &self.ledgers[i])
    }

    pub fn ledger_mut(&mut self, sign: PhaseSign) -> Option<&mut ConvergenceLedger<T>> {
        self.signs.iter().position(|&s| s == sign).map(move |i| &mut self.ledgers[i])
    }

    pub fn into_ledgers(self) -> Vec<(PhaseSign, ConvergenceLedger<T>)> {
        self.signs.into_iter().zip(self.ledgers).collect()
    }

    fn before_start(&self, t: T) -> bool {
        t < T::one() - self.accumulator.tolerance()
    }
}

impl<T: Real> Observer<T> for ScatteringObserver<T> {
    fn node(&mut self, snap: &Snapshot<'_, T>) -> Result<()> {
        if snap.frame != Frame::Direct {
            return Err(Error::InvalidArgument("phase tracking runs in the direct frame".into()));
        }
        if self.before_start(snap.time) {
            return Ok(());
        }
        let w = self.accumulator.update_from_state(snap.field, snap.time)?;
        self.latest = Some((snap.time, w));
        Ok(())
    }

    fn checkpoint(&mut self, snap: &Snapshot<'_, T>) -> Result<()> {
        if self.before_start(snap.time) {
            return Ok(());
        }
        let w = match &self.latest {
            Some((t, w)) if *t == snap.time => w,
            _ => return Err(Error::TimeMismatch {
                expected: snap.time.to_f64_lossy(),
                found: self.latest.as_ref().map_or(f64::NAN, |(t, _)| t.to_f64_lossy()),
            }),
        };
        let h = self.accumulator.h();
        for (sign, ledger) in self.signs.iter().zip(&mut self.ledgers) {
            let v = modified_profile_from_w(w, snap.time, &self.accumulator, *sign)?;
            ledger.push(snap.time, v, h)?;
        }
        Ok(())
    }
}
