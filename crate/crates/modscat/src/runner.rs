//! Config-driven runs, their artifacts and the contrast experiment.

use std::fs;
use std::path::Path;

use modscat_core::conservation::{energy, mass, PseudoconformalLedger, VFrameLedger};
use modscat_core::scattering::{
    extract_final_state, ConvergenceLedger, PhaseAccumulator, PhaseSign, ScatteringObserver,
};
use modscat_core::solver::{
    evolve, pseudoconformal_map, EvolveError, Frame, NonlinearityKind, Observer, SolverState, Violation,
};
use modscat_core::spectral::make_grid;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::diagnostics::{
    write_contrast, write_diagnostics, write_ledger, write_linf_series, CheckpointSample, ContrastRow,
    DiagnosticRecord, DiagnosticsObserver, LedgerRow,
};
use crate::error::RunError;
use crate::fit::{fit_window, DecayFit};
use crate::initial::{h11_norm, initial_data, Field};

/// Scalar outcome of a run, echoed in the manifest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub steps: usize,
    pub final_time: f64,
    pub h11_norm: f64,
    pub initial_mass: f64,
    pub initial_energy: Option<f64>,
    /// `max |m(t) - m(0)| / m(0)` over checkpoints.
    pub mass_drift: f64,
    /// `max |E(t) - E(0)| / |E(0)|` over checkpoints (direct frame only).
    pub energy_drift: Option<f64>,
    pub max_cpce_residual: Option<f64>,
    /// `||J(1+t)u||^2 <= C_0 (1+t)` at every checkpoint, up to that checkpoint's residual.
    pub j_growth_bounded: Option<bool>,
    /// Dissipation integral `<= C_0` at every checkpoint, up to that checkpoint's residual.
    pub dissipation_bounded: Option<bool>,
    /// `sup_{t >= 1} t^{1/3} ||u(t)||_∞` over nodes.
    pub sup_t_third_linf: Option<f64>,
    /// `sup_{t >= 1} t^{dim/2} ||u(t)||_∞` over nodes.
    pub sup_t_half_dim_linf: Option<f64>,
    pub decay_fit: Option<DecayFit>,
    pub final_gap: Option<FinalGap>,
    pub under_resolved: bool,
}

/// Final-state estimate `u⁺ ≈ v(T)` for the configured phase sign.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FinalGap {
    pub time: f64,
    /// `sup ||v(T) - v(s)||` over checkpoints `s` in `[T/4, T)`.
    pub achieved_gap: f64,
    /// Gaps between consecutive checkpoints beyond `t = 1`.
    pub consecutive_gaps: Vec<f64>,
    /// Consecutive gaps never increase (sensitive to uneven spacing).
    pub consecutive_monotone: bool,
    /// `||v(t) - v(t/2)||` over the dyadic pairs.
    pub dyadic_gaps: Vec<f64>,
    /// Dyadic gaps never increase across the pairs with `t >= 4`.
    pub dyadic_monotone_after_4: bool,
}

/// Everything a run produced, in memory.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub config: ExperimentConfig,
    pub run_id: String,
    pub records: Vec<DiagnosticRecord>,
    /// Dyadic pairs for the configured phase sign.
    pub pairs: Vec<LedgerRow>,
    /// Present when the configured sign is not `off`.
    pub contrast: Option<Vec<ContrastRow>>,
    pub linf_series: Vec<(f64, f64)>,
    pub summary: RunSummary,
    /// Final solver state (compactified field in the pseudoconformal frame).
    pub final_field: Field,
    /// Modified profile at the last checkpoint for the configured sign.
    pub final_profile: Option<Field>,
}

/// Git-style identifier: SHA-256 of the canonical JSON config (output
/// directory excluded) and the crate version, truncated to 40 hex digits.
pub fn run_id(config: &ExperimentConfig) -> String {
    let mut c = config.clone();
    c.output.dir = Default::default();
    let mut h = Sha256::new();
    h.update(serde_json::to_string(&c).expect("config serializes").as_bytes());
    h.update(env!("CARGO_PKG_VERSION").as_bytes());
    hex::encode(h.finalize())[..40].to_string()
}

fn violation_error(e: EvolveError<f64>) -> RunError {
    let name = match &e.violation {
        Violation::MassDrift(_) => "mass_drift",
        Violation::BoundaryMass(_) => "boundary_mass",
        Violation::SpectralTail(_) => "spectral_tail",
        Violation::Numerical(err) => return RunError::Numerical(err.clone()),
    };
    RunError::invariant(name, e.to_string())
}

fn is_critical(kind: NonlinearityKind, dim: usize) -> bool {
    matches!(kind, NonlinearityKind::Power { n } if n as usize == dim)
}

fn relative_drift(values: impl Iterator<Item = f64>, reference: f64) -> f64 {
    let scale = if reference != 0.0 { reference.abs() } else { 1.0 };
    values.map(|v| (v - reference).abs() / scale).fold(0.0, f64::max)
}

fn find(samples: &[f64], t: f64) -> Option<usize> {
    let tol = 1e-9 * t.abs().max(1.0);
    samples.iter().position(|s| (s - t).abs() <= tol)
}

/// Dyadic pairs of one ledger joined with the state functionals at `t`.
fn ledger_rows(ledger: &ConvergenceLedger<f64>, samples: &[CheckpointSample], dim: usize) -> Result<Vec<LedgerRow>, RunError> {
    let times: Vec<f64> = samples.iter().map(|s| s.t).collect();
    ledger
        .dyadic_pairs()?
        .into_iter()
        .map(|p| {
            let i = find(&times, p.t).ok_or_else(|| RunError::Output(format!("no sample at t = {}", p.t)))?;
            let s = &samples[i];
            let h = ledger.entries()[ledger.find(p.t).expect("pair end is an entry")].h;
            Ok(LedgerRow {
                t: p.t,
                s: p.s,
                l2_gap: p.l2_gap,
                weak_gap: p.weak_gap,
                tail_bound: p.tail_bound,
                h_t: h,
                mass: s.mass,
                energy: s.energy,
                linf: s.linf,
                t_linf_scaled: p.t.powf(dim as f64 / 2.0) * s.linf,
            })
        })
        .collect()
}

fn contrast_rows(plus: &ConvergenceLedger<f64>, off: &ConvergenceLedger<f64>) -> Result<Vec<ContrastRow>, RunError> {
    let a = plus.dyadic_pairs()?;
    let b = off.dyadic_pairs()?;
    Ok(a.iter()
        .zip(&b)
        .map(|(p, q)| ContrastRow {
            s: p.s,
            t: p.t,
            corrected: p.l2_gap,
            uncorrected: q.l2_gap,
            ratio: if q.l2_gap > 0.0 { p.l2_gap / q.l2_gap } else { 0.0 },
        })
        .collect())
}

/// Runs the configured evolution in memory.
pub fn simulate(config: &ExperimentConfig) -> Result<RunOutcome, RunError> {
    config.validate()?;
    let g = &config.grid;
    let grid = make_grid(g.dim, g.points, g.half_width)?;
    let kind = config.equation.nonlinearity();
    let dt = config.time.dt;
    let frame = config.equation.frame;
    let u0 = initial_data(&config.initial, &grid)?;
    let h11 = h11_norm(&u0)?;
    let initial_mass = mass(&u0);
    let options = config.evolve_options();
    let mut checkpoints = config.checkpoints();
    let snapshot_dir = if config.observers.snapshots {
        fs::create_dir_all(&config.output.dir)?;
        Some(config.output.dir.clone())
    } else {
        None
    };
    let mut diag = DiagnosticsObserver::new(kind, dt, snapshot_dir);

    let (trajectory, scattering, cpce, vframe, initial_energy) = match frame {
        Frame::Direct => {
            let track = config.observers.scattering && config.time.t_end >= 1.0;
            if track && find(&checkpoints, 1.0).is_none() {
                checkpoints.push(1.0);
                checkpoints.sort_by(f64::total_cmp);
            }
            let sign = config.conventions.phase_sign;
            let signs: Vec<PhaseSign> =
                if sign == PhaseSign::Off { vec![PhaseSign::Off] } else { vec![sign, PhaseSign::Off] };
            let mut scat = track.then(|| {
                ScatteringObserver::new(PhaseAccumulator::new(&grid, kind, dt / 2.0), &signs, config.conventions.weak_index)
            });
            let mut cpce = (config.observers.pseudoconformal && is_critical(kind, g.dim))
                .then(|| PseudoconformalLedger::new(&u0, kind))
                .transpose()?;
            let e0 = energy(&u0, kind)?;
            let state = SolverState::new(u0, 0.0, Frame::Direct, kind, dt)?;
            let mut observers: Vec<&mut dyn Observer<f64>> = vec![&mut diag];
            if let Some(s) = scat.as_mut() {
                observers.push(s);
            }
            if let Some(c) = cpce.as_mut() {
                observers.push(c);
            }
            let traj = evolve(state, config.time.t_end, &checkpoints, &mut observers, &options)
                .map_err(violation_error)?;
            (traj, scat, cpce, None, Some(e0))
        }
        Frame::Pseudoconformal => {
            let (v0, _) = pseudoconformal_map(&u0, 0.0)?;
            let mut vl = (config.observers.pseudoconformal && is_critical(kind, g.dim))
                .then(|| VFrameLedger::new(&v0, kind))
                .transpose()?;
            let state = SolverState::new(v0, 0.0, Frame::Pseudoconformal, kind, dt)?;
            let mut observers: Vec<&mut dyn Observer<f64>> = vec![&mut diag];
            if let Some(v) = vl.as_mut() {
                observers.push(v);
            }
            let traj = evolve(state, config.time.t_end, &checkpoints, &mut observers, &options)
                .map_err(violation_error)?;
            (traj, None, None, vl, None)
        }
    };

    let samples = &diag.samples;
    let sample_times: Vec<f64> = samples.iter().map(|s| s.t).collect();
    let sign = config.conventions.phase_sign;
    let main_ledger = scattering.as_ref().and_then(|s| s.ledger(sign));
    let records: Vec<DiagnosticRecord> = samples
        .iter()
        .map(|s| {
            let cpce_residual = match (&cpce, &vframe) {
                (Some(c), _) => c.records().iter().find(|r| r.time == s.solver_time).map(|r| r.residual),
                (_, Some(v)) => v.records().iter().find(|r| r.tau == s.solver_time).map(|r| r.residual),
                _ => None,
            };
            let (mut l2_gap, mut weak_gap, mut tail_bound, mut h_t) = (None, None, None, None);
            if let Some(l) = main_ledger {
                if let Some(j) = l.find(s.t) {
                    h_t = Some(l.entries()[j].h);
                    if let Some(i) = l.find(s.t / 2.0) {
                        let p = l.pair(i, j)?;
                        l2_gap = Some(p.l2_gap);
                        weak_gap = Some(p.weak_gap);
                        tail_bound = Some(p.tail_bound);
                    }
                }
            }
            Ok(DiagnosticRecord {
                t: s.t,
                mass: s.mass,
                energy: s.energy,
                linf: s.linf,
                t_half_dim_linf: s.t.powf(g.dim as f64 / 2.0) * s.linf,
                t_third_linf: s.t.cbrt() * s.linf,
                j_norm: s.j_norm,
                cpce_residual,
                l2_gap,
                weak_gap,
                tail_bound,
                h_t,
            })
        })
        .collect::<Result<_, RunError>>()?;
    debug_assert!(sample_times.windows(2).all(|w| w[0] < w[1]));

    let pairs = match main_ledger {
        Some(l) => ledger_rows(l, samples, g.dim)?,
        None => Vec::new(),
    };
    let contrast = match &scattering {
        Some(s) if sign != PhaseSign::Off => {
            Some(contrast_rows(s.ledger(sign).expect("tracked"), s.ledger(PhaseSign::Off).expect("tracked"))?)
        }
        _ => None,
    };
    let final_gap = match main_ledger {
        Some(l) if l.entries().iter().filter(|e| e.time > 1.0).count() >= 3 => {
            let f = extract_final_state(l)?;
            let late: Vec<f64> = pairs.iter().filter(|p| p.t >= 4.0).map(|p| p.l2_gap).collect();
            Some(FinalGap {
                time: f.time,
                achieved_gap: f.achieved_gap,
                consecutive_gaps: f.consecutive_gaps,
                consecutive_monotone: f.monotone,
                dyadic_gaps: pairs.iter().map(|p| p.l2_gap).collect(),
                dyadic_monotone_after_4: late.windows(2).all(|w| w[1] <= w[0]),
            })
        }
        _ => None,
    };
    let final_profile = main_ledger.and_then(|l| l.entries().last()).map(|e| e.profile.clone());

    let late: Vec<&(f64, f64)> = diag.linf_series.iter().filter(|(t, _)| *t >= 1.0).collect();
    let sup = |p: f64| (!late.is_empty()).then(|| late.iter().map(|(t, v)| t.powf(p) * v).fold(0.0, f64::max));
    let (ts, vs): (Vec<f64>, Vec<f64>) = late.iter().map(|(t, v)| (*t, *v)).unzip();
    let decay_fit = fit_window(&ts, &vs, g.dim).ok();

    let (max_cpce, j_ok, d_ok) = match &cpce {
        Some(c) => {
            let rs = c.records();
            let worst = rs.iter().map(|r| r.residual).fold(0.0, f64::max);
            // Each bound is checked against the identity's own residual at that checkpoint.
            let slack = |r: f64| r.max(1e-12);
            (
                Some(worst),
                Some(rs.iter().all(|r| r.j_growth_ratio <= 1.0 + slack(r.residual))),
                Some(rs.iter().all(|r| r.dissipation_ratio <= 1.0 + slack(r.residual))),
            )
        }
        None => (vframe.as_ref().map(|v| v.records().iter().map(|r| r.residual).fold(0.0, f64::max)), None, None),
    };

    let summary = RunSummary {
        steps: trajectory.records.last().map_or(0, |r| r.step),
        final_time: trajectory.final_state.time,
        h11_norm: h11,
        initial_mass,
        initial_energy,
        mass_drift: relative_drift(samples.iter().map(|s| s.mass), initial_mass),
        energy_drift: initial_energy.map(|e0| relative_drift(samples.iter().filter_map(|s| s.energy), e0)),
        max_cpce_residual: max_cpce,
        j_growth_bounded: j_ok,
        dissipation_bounded: d_ok,
        sup_t_third_linf: sup(1.0 / 3.0),
        sup_t_half_dim_linf: sup(g.dim as f64 / 2.0),
        decay_fit,
        final_gap,
        under_resolved: trajectory.under_resolved,
    };
    Ok(RunOutcome {
        config: config.clone(),
        run_id: run_id(config),
        records,
        pairs,
        contrast,
        linf_series: diag.linf_series,
        summary,
        final_field: trajectory.final_state.field,
        final_profile,
    })
}

#[derive(Serialize)]
struct Manifest<'a> {
    run_id: &'a str,
    name: &'a str,
    version: &'static str,
    config: &'a ExperimentConfig,
    conventions: ConventionEcho,
    initial_data_family: &'static str,
    summary: &'a RunSummary,
    artifacts: Vec<&'static str>,
}

#[derive(Serialize)]
struct ConventionEcho {
    phase_sign: PhaseSign,
    phase_lower_limit: f64,
    weak_index: f64,
    fourier: &'static str,
    tracked_profile: &'static str,
    energy: &'static str,
    mass: &'static str,
}

/// Writes CSVs and the JSON manifest into `dir`.
pub fn write_artifacts(outcome: &RunOutcome, dir: &Path) -> Result<(), RunError> {
    fs::create_dir_all(dir)?;
    let mut artifacts = vec!["diagnostics.csv", "linf.csv"];
    write_diagnostics(fs::File::create(dir.join("diagnostics.csv"))?, &outcome.records)?;
    write_linf_series(fs::File::create(dir.join("linf.csv"))?, &outcome.linf_series)?;
    if !outcome.pairs.is_empty() {
        write_ledger(fs::File::create(dir.join("ledger.csv"))?, &outcome.pairs)?;
        artifacts.push("ledger.csv");
    }
    if let Some(c) = &outcome.contrast {
        write_contrast(fs::File::create(dir.join("contrast.csv"))?, c)?;
        artifacts.push("contrast.csv");
    }
    let c = &outcome.config.conventions;
    let manifest = Manifest {
        run_id: &outcome.run_id,
        name: &outcome.config.name,
        version: env!("CARGO_PKG_VERSION"),
        config: &outcome.config,
        conventions: ConventionEcho {
            phase_sign: c.phase_sign,
            phase_lower_limit: c.phase_lower_limit,
            weak_index: c.weak_index,
            fourier: "unitary: (2π)^{-n/2} ∫ e^{-ix·ξ} φ(x) dx",
            tracked_profile: "v(t) = F^{-1} e^{±iΦ̃_t} F M(t) U(-t) u(t), Φ̃ integrated from t = 1",
            energy: "½||∇u||² + ∫ G(|u|²), G' = nonlinearity",
            mass: "½ ∫ |u|²",
        },
        initial_data_family: "chosen test family; the theory only prescribes membership in the weighted Sobolev space",
        summary: &outcome.summary,
        artifacts: {
            artifacts.push("manifest.json");
            artifacts
        },
    };
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(())
}

/// Runs a config and writes its artifacts to the configured directory.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunOutcome, RunError> {
    let outcome = simulate(config)?;
    write_artifacts(&outcome, &config.output.dir)?;
    Ok(outcome)
}

/// The identical evolution tracked with the phase correction and without.
#[derive(Debug, Clone)]
pub struct ContrastReport {
    pub outcome: RunOutcome,
    pub rows: Vec<ContrastRow>,
}

impl ContrastReport {
    /// Ratio at the final dyadic pair.
    pub fn final_ratio(&self) -> Option<f64> {
        self.rows.last().map(|r| r.ratio)
    }
}

/// Needs a linear or power nonlinearity and `t_end >= 64`; forces the `plus`
/// sign with the uncorrected control alongside.
pub fn contrast_experiment(config: &ExperimentConfig) -> Result<ContrastReport, RunError> {
    if matches!(config.equation.nonlinearity(), NonlinearityKind::Saturated { .. }) {
        return Err(RunError::Config("the contrast experiment needs a linear or power nonlinearity".into()));
    }
    if config.equation.frame != Frame::Direct || config.time.t_end < 64.0 {
        return Err(RunError::Config("the contrast experiment runs in the direct frame to t_end >= 64".into()));
    }
    let mut c = config.clone();
    c.conventions.phase_sign = PhaseSign::Plus;
    c.observers.scattering = true;
    let outcome = run_experiment(&c)?;
    let rows = outcome.contrast.clone().expect("plus sign tracks the control");
    Ok(ContrastReport { outcome, rows })
}

/// Thread cap from `MODSCAT_THREADS`, if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var("MODSCAT_THREADS").ok()?.trim().parse().ok().filter(|n| *n > 0)
}

/// Runs independent experiments in parallel (capped by `MODSCAT_THREADS`),
/// each writing to its own directory. Results keep the input order.
pub fn run_sweep(configs: &[ExperimentConfig]) -> Vec<Result<RunOutcome, RunError>> {
    use rayon::prelude::*;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        builder = builder.num_threads(n);
    }
    match builder.build() {
        Ok(pool) => pool.install(|| configs.par_iter().map(run_experiment).collect()),
        Err(e) => configs.iter().map(|_| Err(RunError::Output(e.to_string()))).collect(),
    }
}
