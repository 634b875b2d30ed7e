//! Long-time behaviour: phase-corrected profiles, their Cauchy gaps, weak
//! norms and the growth integral bounding the weak tail.

mod ledger;
mod observer;
mod phase;
mod weak;

pub use ledger::{
    cauchy_gap, extract_final_state, tail_bound, ConvergenceLedger, FinalState, LedgerEntry, PairReport,
};
pub use observer::ScatteringObserver;
pub use phase::{modified_profile, modified_profile_from_w, PhaseAccumulator, PhaseSign};
pub use weak::{besov_weak_norm, dyadic_block_norms, weak_h1_pairing};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::modulate;
    use crate::solver::{evolve, EvolveOptions, Frame, NonlinearityKind, SolverState};
    use crate::spectral::{make_grid, ComplexField};
    use num_complex::Complex;

    #[test]
    fn linear_run_tracks_modulated_data() {
        let g = make_grid(1, 2048, 64.0).unwrap();
        let u0 = ComplexField::from_fn(&g, |[x, _]: [f64; 2]| Complex::new((-x * x / 2.0).exp(), 0.0));
        let dt = 0.01;
        let state = SolverState::new(u0.clone(), 0.0, Frame::Direct, NonlinearityKind::Linear, dt).unwrap();
        let acc = PhaseAccumulator::new(&g, NonlinearityKind::Linear, dt / 2.0);
        let mut obs = ScatteringObserver::new(acc, &[PhaseSign::Plus, PhaseSign::Off], -1.0);
        let checkpoints = [0.5, 1.0, 2.0, 4.0];
        evolve(state, 4.0, &checkpoints, &mut [&mut obs], &EvolveOptions::default()).unwrap();
        let ledger = obs.ledger(PhaseSign::Off).unwrap();
        assert_eq!(ledger.times(), vec![1.0, 2.0, 4.0]);
        for e in ledger.entries() {
            let expected = modulate(&u0, e.time).unwrap();
            assert!(e.profile.sub(&expected).unwrap().l2() < 1e-9);
        }
        // No nonlinearity: the phase stays zero and both signs agree.
        let plus = obs.ledger(PhaseSign::Plus).unwrap();
        assert!(plus.entries()[2].profile.sub(&ledger.entries()[2].profile).unwrap().l2() == 0.0);
        assert!(obs.accumulator.h() > 0.0);
    }
}
