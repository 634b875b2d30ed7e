//! Conserved and monotone functionals, the saturated nonlinearity algebra and
//! the inequality checks used by the diagnostics.

mod algebra;
mod inequalities;
mod ledgers;

pub use algebra::{
    algebra_slack, check_fvw_inequalities, f_sat, v_sat, w_sat, w_sat_alt, InequalityReport,
};
pub use inequalities::{angular_variance, gn_linf_bound_check, hardy_check, RADIAL_THRESHOLD};
pub use ledgers::{
    v_frame_energy_residual, PseudoconformalLedger, PseudoconformalRecord, VFrameLedger, VFrameRecord,
};

use num_complex::Complex;

use crate::error::Result;
use crate::scalar::Real;
use crate::solver::NonlinearityKind;
use crate::spectral::{grad_l2, ComplexField, Space};

/// `½ ∫ |u|^2`.
pub fn mass<T: Real>(field: &ComplexField<T>) -> T {
    field.norm_sqr() / T::lit(2.0)
}

/// Pointwise potential energy density `G(|z|^2)` with `G' = g`.
pub fn potential_density<T: Real>(kind: NonlinearityKind, z: Complex<T>) -> T {
    match kind {
        NonlinearityKind::Linear => T::zero(),
        NonlinearityKind::Power { n } => {
            let n = T::from_usize_lossy(n as usize);
            let r = z.norm_sqr();
            n / (n + T::one()) * r.powf(T::one() + n.recip())
        }
        NonlinearityKind::Saturated { n } => v_sat(z, n),
    }
}

/// Conserved energy `½ ||∇u||^2 + ∫ G(|u|^2)`: the power case gives
/// `½ ||∇u||^2 + n/(n+1) ||u||_{2+2/n}^{2+2/n}`, the saturated case uses `V`.
pub fn energy<T: Real>(field: &ComplexField<T>, kind: NonlinearityKind) -> Result<T> {
    field.expect_space(Space::Physical)?;
    let g = grad_l2(field)?;
    let pot: T = field.values().iter().map(|&z| potential_density(kind, z)).sum::<T>() * field.cell_volume();
    Ok(g * g / T::lit(2.0) + pot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{evolve, EvolveOptions, Frame, SolverState};
    use crate::spectral::{make_grid, Grid};

    fn gaussian(g: &Grid<f64>) -> ComplexField<f64> {
        ComplexField::from_fn(g, |[x, y]| Complex::new((-(x * x + y * y) / 2.0).exp(), 0.0))
    }

    #[test]
    fn gaussian_mass_and_energy() {
        let g = make_grid(1, 512, 20.0).unwrap();
        let u = gaussian(&g);
        let pi = std::f64::consts::PI;
        assert!((mass(&u) / (pi.sqrt() / 2.0) - 1.0).abs() < 1e-10);
        // ½ · √π/2 + ½ ∫ e^{-2x^2}.
        let e = energy(&u, NonlinearityKind::Power { n: 1 }).unwrap();
        assert!((e - (pi.sqrt() / 4.0 + 0.5 * (pi / 2.0).sqrt())).abs() < 1e-10);
        let zero = ComplexField::zeros(&g, Space::Physical);
        assert_eq!(mass(&zero), 0.0);
        assert_eq!(energy(&zero, NonlinearityKind::Saturated { n: 3 }).unwrap(), 0.0);
    }

    #[test]
    fn initial_constant_of_the_gaussian() {
        let g = make_grid(1, 1024, 32.0).unwrap();
        let l = PseudoconformalLedger::new(&gaussian(&g), NonlinearityKind::Power { n: 1 }).unwrap();
        let pi = std::f64::consts::PI;
        assert!((l.c0() - (pi.sqrt() + (pi / 2.0).sqrt())).abs() < 1e-10);
        assert!(PseudoconformalLedger::new(&gaussian(&g), NonlinearityKind::Power { n: 2 }).is_err());
    }

    fn cpce_residual(dt: f64, t_end: f64) -> (f64, PseudoconformalLedger<f64>) {
        let g = make_grid(1, 1024, 32.0).unwrap();
        let kind = NonlinearityKind::Power { n: 1 };
        let u0 = gaussian(&g);
        let mut ledger = PseudoconformalLedger::new(&u0, kind).unwrap();
        let state = SolverState::new(u0, 0.0, Frame::Direct, kind, dt).unwrap();
        let traj = evolve(state, t_end, &[0.0, 0.5, 1.0, t_end], &mut [&mut ledger], &EvolveOptions::default())
            .unwrap();
        let r = ledger.residual(&traj.final_state.field, t_end).unwrap();
        (r, ledger)
    }

    #[test]
    fn pseudoconformal_identity_converges() {
        let (coarse, ledger) = cpce_residual(0.02, 2.0);
        let (fine, _) = cpce_residual(0.01, 2.0);
        assert!(fine < 1e-3, "{fine}");
        assert!(fine < coarse / 2.5, "{coarse} -> {fine}");
        assert_eq!(ledger.records()[0].residual, 0.0);
        assert!(ledger.state_part_monotone(1e-3));
        for r in ledger.records() {
            assert!(r.j_growth_ratio <= 1.0 + 1e-3);
            assert!(r.dissipation_ratio <= 1.0 + 1e-3);
        }
    }
}
