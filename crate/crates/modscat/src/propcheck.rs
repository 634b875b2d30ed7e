//! Randomized checks of the algebraic and functional inequalities.
//!
//! Each suite returns one report per inequality; a report passes when no
//! sample violates it by more than the suite's slack.

use modscat_core::conservation::{check_fvw_inequalities, gn_linf_bound_check, hardy_check, InequalityReport};
use modscat_core::operators::{dollard_residual, free_propagate, modulate};
use modscat_core::spectral::{make_grid, ComplexField};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    /// Pointwise bounds on the saturated nonlinearity and its potentials.
    Fvw,
    /// Hardy-type bound on random non-negative step functions.
    Hardy,
    /// One-point Gagliardo–Nirenberg bounds on random 1D and 2D radial data.
    Gn,
    /// Group laws and the Dollard factorization on random data.
    Operators,
    All,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub reports: Vec<InequalityReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(InequalityReport::passed)
    }
}

/// Relative slack for quadrature-based checks.
const QUADRATURE_SLACK: f64 = 1e-9;

struct Tally {
    report: InequalityReport,
    slack: f64,
}

impl Tally {
    fn new(name: &str, seed: u64, slack: f64) -> Self {
        let report = InequalityReport {
            name: name.to_string(),
            samples: 0,
            violations: 0,
            worst_margin: f64::INFINITY,
            seed,
            witness: None,
        };
        Self { report, slack }
    }

    /// Records `lhs <= rhs`; the witness is the first violating sample index
    /// and its margin.
    fn record(&mut self, lhs: f64, rhs: f64) {
        let r = &mut self.report;
        let margin = (rhs - lhs) / rhs.abs().max(1.0);
        r.worst_margin = r.worst_margin.min(margin);
        if !(margin >= -self.slack) {
            r.violations += 1;
            r.witness.get_or_insert([r.samples as f64, margin]);
        }
        r.samples += 1;
    }
}

fn hardy_suite(samples: u64, seed: u64) -> Result<Vec<InequalityReport>, RunError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = Tally::new("hardy", seed, QUADRATURE_SLACK);
    for _ in 0..samples {
        let s = rng.random_range(0.1..4.0);
        let t = s * rng.random_range(1.5..50.0);
        let pieces = rng.random_range(1..=8usize);
        let heights: Vec<f64> = (0..pieces).map(|_| rng.random_range(0.0..2.0)).collect();
        let lattice = 2048;
        let values: Vec<f64> = (0..=lattice).map(|k| heights[(k * pieces / (lattice + 1)).min(pieces - 1)]).collect();
        let (lhs, rhs) = hardy_check(&values, s, t)?;
        tally.record(lhs, rhs);
    }
    Ok(vec![tally.report])
}

/// Random sum of up to three Gaussian bumps with complex amplitudes.
fn random_bumps(rng: &mut ChaCha8Rng, grid: &modscat_core::Grid64) -> ComplexField<f64> {
    let bumps: Vec<(f64, f64, f64, Complex<f64>)> = (0..rng.random_range(1..=3usize))
        .map(|_| {
            let amp = Complex::from_polar(rng.random_range(0.1..2.0), rng.random_range(0.0..std::f64::consts::TAU));
            (rng.random_range(-4.0..4.0), rng.random_range(0.5..2.0), rng.random_range(-2.0..2.0), amp)
        })
        .collect();
    ComplexField::from_fn(grid, |[x, _]| {
        bumps
            .iter()
            .map(|&(c, w, k, a)| a * Complex::from_polar((-(x - c) * (x - c) / (2.0 * w * w)).exp(), k * x))
            .sum()
    })
}

/// Random radial sum of up to three centered Gaussians.
fn random_radial(rng: &mut ChaCha8Rng, grid: &modscat_core::Grid64) -> ComplexField<f64> {
    let bumps: Vec<(f64, Complex<f64>)> = (0..rng.random_range(1..=3usize))
        .map(|_| {
            let amp = Complex::from_polar(rng.random_range(0.1..2.0), rng.random_range(0.0..std::f64::consts::TAU));
            (rng.random_range(0.7..2.5), amp)
        })
        .collect();
    ComplexField::from_fn(grid, |[x, y]| {
        let r2 = x * x + y * y;
        bumps.iter().map(|&(w, a)| a * (-r2 / (2.0 * w * w)).exp()).sum()
    })
}

fn gn_suite(samples: u64, seed: u64) -> Result<Vec<InequalityReport>, RunError> {
    let line = make_grid(1, 1024, 32.0)?;
    let plane = make_grid(2, 128, 16.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut one = Tally::new("gn_linf_1d", seed, QUADRATURE_SLACK);
    let mut two = Tally::new("gn_radial_2d", seed, QUADRATURE_SLACK);
    for _ in 0..samples {
        let u = random_bumps(&mut rng, &line);
        let p = rng.random_range(1.5..6.0);
        let (lhs, rhs) = gn_linf_bound_check(&u, p, None)?;
        one.record(lhs, rhs);
        let v = random_radial(&mut rng, &plane);
        let (p, r) = (rng.random_range(1.5..6.0), rng.random_range(0.2..6.0));
        let (lhs, rhs) = gn_linf_bound_check(&v, p, Some(r))?;
        two.record(lhs, rhs);
    }
    Ok(vec![one.report, two.report])
}

fn operators_suite(samples: u64, seed: u64) -> Result<Vec<InequalityReport>, RunError> {
    let grid = make_grid(1, 1024, 64.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut group = Tally::new("propagator_group_law", seed, 0.0);
    let mut unitary = Tally::new("propagator_unitary", seed, 0.0);
    let mut modul = Tally::new("modulation_group_law", seed, 0.0);
    let mut dollard = Tally::new("dollard_factorization", seed, 0.0);
    for _ in 0..samples {
        let u = random_bumps(&mut rng, &grid);
        let norm = u.l2();
        let (s, t) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let ab = free_propagate(&free_propagate(&u, s)?, t)?;
        let gap = ab.sub(&free_propagate(&u, s + t)?)?.l2() / norm;
        group.record(gap, 1e-12);
        unitary.record((free_propagate(&u, t)?.l2() - norm).abs() / norm, 1e-12);
        // Chirp phases add in 1/t: M(a) M(b) = M(ab / (a + b)).
        let (a, b) = (rng.random_range(0.5..4.0), rng.random_range(0.5..4.0));
        let mm = modulate(&modulate(&u, a)?, b)?;
        modul.record(mm.sub(&modulate(&u, a * b / (a + b))?)?.l2() / norm, 1e-12);
        let tau = rng.random_range(1.0..4.0);
        dollard.record(dollard_residual(&u, tau)?, 1e-6);
    }
    Ok(vec![group.report, unitary.report, modul.report, dollard.report])
}

/// Runs one suite (or all) with the given sample count per inequality.
pub fn run_suite(suite: Suite, samples: u64, seed: u64) -> Result<Vec<SuiteReport>, RunError> {
    if samples == 0 {
        return Err(RunError::Usage("samples must be positive".into()));
    }
    let one = |s: Suite| -> Result<SuiteReport, RunError> {
        let reports = match s {
            Suite::Fvw => {
                let mut r = Vec::new();
                for n in 1..=5 {
                    for mut rep in check_fvw_inequalities::<f64>(n, samples, seed)? {
                        rep.name = format!("{}_n{n}", rep.name);
                        r.push(rep);
                    }
                }
                r
            }
            Suite::Hardy => hardy_suite(samples, seed)?,
            Suite::Gn => gn_suite(samples, seed)?,
            Suite::Operators => operators_suite(samples, seed)?,
            Suite::All => unreachable!("expanded by the caller"),
        };
        Ok(SuiteReport { suite: s, seed, reports })
    };
    match suite {
        Suite::All => [Suite::Fvw, Suite::Hardy, Suite::Gn, Suite::Operators].into_iter().map(one).collect(),
        s => Ok(vec![one(s)?]),
    }
}
