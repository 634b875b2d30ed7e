use thiserror::Error as ThisError;

use super::{Frame, NonlinearityKind, SolverState, StrangStepper};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::{forward_fourier, ComplexField};

/// Read-only view of the state handed to observers.
#[derive(Debug, Clone, Copy)]
pub struct Snapshot<'a, T: Real> {
    pub field: &'a ComplexField<T>,
    pub time: T,
    /// Number of steps taken so far.
    pub step: usize,
    pub frame: Frame,
    pub nonlinearity: NonlinearityKind,
}

/// Receives snapshots during an evolution.
///
/// `node` fires every `node_stride` steps, at every checkpoint and at the
/// final time; it is meant for running quadratures. `checkpoint` fires at
/// the requested checkpoint times (snapped to the nearest step boundary),
/// always after `node` for the same step.
pub trait Observer<T: Real> {
    fn node(&mut self, _snap: &Snapshot<'_, T>) -> Result<()> {
        Ok(())
    }

    fn checkpoint(&mut self, _snap: &Snapshot<'_, T>) -> Result<()> {
        Ok(())
    }
}

/// Mass fraction allowed beyond a fraction of the box half-width.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BoundaryMonitor {
    /// Cells with some `|x_i| > radius_fraction * L` count as boundary cells.
    pub radius_fraction: f64,
    pub tolerance: f64,
}

impl Default for BoundaryMonitor {
    fn default() -> Self {
        Self {
            radius_fraction: 0.5,
            tolerance: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveOptions {
    /// Steps between quadrature nodes.
    pub node_stride: usize,
    /// Relative mass drift that aborts the run.
    pub mass_tolerance: f64,
    /// `None` disables the boundary check.
    pub boundary: Option<BoundaryMonitor>,
    /// Spectral mass fraction in the top frequency octave above which the
    /// run is flagged as under-resolved.
    pub spectral_tail_tolerance: f64,
    /// Abort instead of flag when the spectral tail tolerance is exceeded.
    pub abort_on_spectral_tail: bool,
    /// Closest approach to `τ = 1` in the pseudoconformal frame.
    pub eps_min: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            node_stride: 4,
            mass_tolerance: 1e-9,
            boundary: Some(BoundaryMonitor::default()),
            spectral_tail_tolerance: 1e-6,
            abort_on_spectral_tail: false,
            eps_min: 1e-3,
        }
    }
}

/// State summary recorded at each checkpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateRecord<T: Real> {
    pub time: T,
    pub step: usize,
    /// `int |u|^2`.
    pub mass: T,
    pub relative_mass_drift: T,
    pub boundary_fraction: T,
    pub spectral_tail: T,
}

/// Result of a completed evolution.
#[derive(Debug, Clone)]
pub struct Trajectory<T: Real> {
    pub records: Vec<StateRecord<T>>,
    pub final_state: SolverState<T>,
    /// Set when some checkpoint exceeded the spectral tail tolerance.
    pub under_resolved: bool,
}

/// The invariant that stopped an evolution.
#[derive(Debug, Clone, PartialEq, ThisError)]
pub enum Violation {
    #[error("relative mass drift {0:e} exceeds tolerance")]
    MassDrift(f64),
    #[error("boundary mass fraction {0:e} exceeds tolerance")]
    BoundaryMass(f64),
    #[error("top-octave spectral fraction {0:e} exceeds tolerance")]
    SpectralTail(f64),
    #[error(transparent)]
    Numerical(#[from] Error),
}

/// Structured abort carrying the last record that passed every check.
#[derive(Debug, Clone, ThisError)]
#[error("evolution aborted at t = {time}: {violation}")]
pub struct EvolveError<T: Real> {
    pub violation: Violation,
    pub time: f64,
    pub last_good: Option<StateRecord<T>>,
}

fn boundary_fraction<T: Real>(field: &ComplexField<T>, radius_fraction: T) -> T {
    let grid = field.grid();
    let r = radius_fraction * grid.half_width();
    let mut total = T::zero();
    let mut outer = T::zero();
    for (idx, z) in field.values().iter().enumerate() {
        let m = z.norm_sqr();
        total += m;
        let p = grid.position(idx);
        if p[0].abs() > r || p[1].abs() > r {
            outer += m;
        }
    }
    if total == T::zero() {
        T::zero()
    } else {
        outer / total
    }
}

/// Fraction of spectral mass with some `|xi_i|` in the top octave.
fn spectral_tail<T: Real>(field: &ComplexField<T>) -> Result<T> {
    let hat = forward_fourier(field)?;
    let grid = field.grid();
    let cut = grid.xi_max() / T::lit(2.0);
    let mut total = T::zero();
    let mut top = T::zero();
    for (idx, z) in hat.values().iter().enumerate() {
        let m = z.norm_sqr();
        total += m;
        let k = grid.frequency(idx);
        if k[0].abs() >= cut || k[1].abs() >= cut {
            top += m;
        }
    }
    Ok(if total == T::zero() { T::zero() } else { top / total })
}

/// Time of step `k`: `t0 + k dt`, except that the last step lands on `t_end`.
fn step_time<T: Real>(t0: T, dt: T, k: usize, steps: usize, t_end: T) -> T {
    if k == steps {
        t_end
    } else {
        t0 + T::from_usize_lossy(k) * dt
    }
}

/// Evolves `state` to `t_end`, calling observers at nodes and checkpoints.
///
/// Checkpoints must be sorted and lie in `[state.time, t_end]`; each is
/// snapped to the nearest step boundary. The final step is shortened so the
/// run ends exactly at `t_end`. With no checkpoints only the final state is
/// produced.
pub fn evolve<T: Real>(
    state: SolverState<T>,
    t_end: T,
    checkpoints: &[T],
    observers: &mut [&mut dyn Observer<T>],
    options: &EvolveOptions,
) -> std::result::Result<Trajectory<T>, EvolveError<T>> {
    let start = state.time;
    let abort = |violation: Violation, time: T, last: &Option<StateRecord<T>>| EvolveError {
        violation,
        time: time.to_f64_lossy(),
        last_good: *last,
    };
    let no_record = None;

    state
        .validate()
        .map_err(|e| abort(e.into(), start, &no_record))?;
    if !(t_end > start) {
        return Err(abort(
            Error::NonMonotoneTime {
                previous: start.to_f64_lossy(),
                requested: t_end.to_f64_lossy(),
            }
            .into(),
            start,
            &no_record,
        ));
    }
    if state.frame == Frame::Pseudoconformal && t_end > T::one() - T::lit(options.eps_min) {
        return Err(abort(
            Error::InvalidArgument(format!(
                "pseudoconformal end time {t_end} closer than {} to the singularity",
                options.eps_min
            ))
            .into(),
            start,
            &no_record,
        ));
    }
    if checkpoints.windows(2).any(|w| w[1] < w[0])
        || checkpoints
            .iter()
            .any(|&c| c < start || c > t_end || !c.is_finite())
    {
        return Err(abort(
            Error::InvalidArgument("checkpoints must be sorted and lie in the run interval".into())
                .into(),
            start,
            &no_record,
        ));
    }

    let dt = state.dt;
    let span = t_end - start;
    // Full steps, plus one partial step when dt does not divide the span.
    let ratio = span / dt;
    let mut steps = ratio.floor().to_usize().unwrap_or(0);
    let slack = T::lit(1e-9) * ratio.max(T::one());
    if ratio - T::from_usize_lossy(steps) > slack {
        steps += 1;
    }
    let steps = steps.max(1);

    let mut checkpoint_steps: Vec<usize> = checkpoints
        .iter()
        .map(|&c| {
            let k = ((c - start) / dt).round().to_usize().unwrap_or(0);
            k.min(steps)
        })
        .collect();
    checkpoint_steps.dedup();

    let stride = options.node_stride.max(1);
    let mass0 = state.field.norm_sqr();
    let mass_tol = T::lit(options.mass_tolerance);
    let boundary = options
        .boundary
        .map(|b| (T::lit(b.radius_fraction), T::lit(b.tolerance)));

    let full = StrangStepper::new(state.field.grid(), dt);
    let mut state = state;
    let mut records = Vec::with_capacity(checkpoint_steps.len());
    let mut last_good: Option<StateRecord<T>> = None;
    let mut under_resolved = false;
    let mut next_cp = 0usize;

    for k in 0..=steps {
        if k > 0 {
            let t_prev = step_time(start, dt, k - 1, steps, t_end);
            let t_next = step_time(start, dt, k, steps, t_end);
            state.time = t_prev;
            let h = t_next - t_prev;
            let result = if k == steps && (h - dt).abs() > T::epsilon() * dt * T::lit(16.0) {
                StrangStepper::new(state.field.grid(), h).step(&mut state)
            } else {
                full.step(&mut state)
            };
            result.map_err(|e| abort(e.into(), t_prev, &last_good))?;
            state.time = t_next;
        }

        let at_checkpoint = next_cp < checkpoint_steps.len() && checkpoint_steps[next_cp] == k;
        let at_node = k % stride == 0 || at_checkpoint || k == steps;
        if !at_node {
            continue;
        }

        state
            .field
            .check_finite("evolve")
            .map_err(|e| abort(e.into(), state.time, &last_good))?;
        let mass = state.field.norm_sqr();
        let drift = if mass0 == T::zero() {
            mass.abs()
        } else {
            ((mass - mass0) / mass0).abs()
        };
        if drift > mass_tol {
            return Err(abort(
                Violation::MassDrift(drift.to_f64_lossy()),
                state.time,
                &last_good,
            ));
        }
        let bfrac = match boundary {
            Some((radius, tol)) => {
                let f = boundary_fraction(&state.field, radius);
                if f > tol {
                    return Err(abort(
                        Violation::BoundaryMass(f.to_f64_lossy()),
                        state.time,
                        &last_good,
                    ));
                }
                f
            }
            None => T::zero(),
        };

        let snap = Snapshot {
            field: &state.field,
            time: state.time,
            step: k,
            frame: state.frame,
            nonlinearity: state.nonlinearity,
        };
        for obs in observers.iter_mut() {
            obs.node(&snap)
                .map_err(|e| abort(e.into(), snap.time, &last_good))?;
        }

        if at_checkpoint {
            next_cp += 1;
            let tail = spectral_tail(&state.field)
                .map_err(|e| abort(e.into(), state.time, &last_good))?;
            if tail > T::lit(options.spectral_tail_tolerance) {
                if options.abort_on_spectral_tail {
                    return Err(abort(
                        Violation::SpectralTail(tail.to_f64_lossy()),
                        state.time,
                        &last_good,
                    ));
                }
                under_resolved = true;
            }
            for obs in observers.iter_mut() {
                obs.checkpoint(&snap)
                    .map_err(|e| abort(e.into(), snap.time, &last_good))?;
            }
            let rec = StateRecord {
                time: state.time,
                step: k,
                mass,
                relative_mass_drift: drift,
                boundary_fraction: bfrac,
                spectral_tail: tail,
            };
            records.push(rec);
            last_good = Some(rec);
        }
    }

    Ok(Trajectory {
        records,
        final_state: state,
        under_resolved,
    })
}
