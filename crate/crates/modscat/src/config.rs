//! Experiment configuration.
//!
//! Configs are TOML documents (JSON is accepted as an alternative encoding,
//! selected by a `.json` extension). Grammar:
//!
//! ```toml
//! name = "reference"                  # run label
//!
//! [grid]
//! dim = 1                             # 1 or 2
//! points = 8192                       # points per dimension, power of two >= 16
//! half_width = 256.0                  # box is [-L, L)^dim
//!
//! [equation]
//! kind = "power"                      # "linear" | "power" | "saturated"
//! n = 1                               # exponent 2/n (ignored when linear)
//! frame = "direct"                    # "direct" | "pseudoconformal"
//!
//! [initial]
//! name = "gaussian"                   # see below
//! amplitude = 1.0
//! width = 1.0
//! center = [0.0, 0.0]
//! momentum = [0.0, 0.0]
//!
//! [time]
//! dt = 2.5e-3
//! t_end = 64.0                        # τ_end when the frame is pseudoconformal
//! schedule = { kind = "dyadic", fine_prefix = 4 }
//! # or schedule = { kind = "explicit", times = [0.5, 1.0, 2.0] }
//!
//! [observers]
//! scattering = true                   # phase, profiles, gaps
//! pseudoconformal = true              # conserved pseudoconformal energy
//! snapshots = false                   # binary state at checkpoints
//!
//! [monitor]
//! node_stride = 4
//! mass_tolerance = 1e-9
//! boundary = { radius_fraction = 0.9, tolerance = 1e-3 }   # omit to disable
//! spectral_tail_tolerance = 1e-6
//!
//! [output]
//! dir = "runs/reference"
//!
//! [conventions]
//! phase_sign = "plus"                 # "plus" | "minus" | "off"
//! phase_lower_limit = 1.0             # only 1 is supported
//! weak_index = -1.0                   # index of the weak norm
//! ```
//!
//! Initial data families: `gaussian {amplitude, width, center, momentum}`,
//! `radial_gaussian_2d {amplitude, width}` and
//! `random_h11 {seed, amplitude, correlation_length, envelope_width}`.

use std::path::{Path, PathBuf};

use modscat_core::scattering::PhaseSign;
use modscat_core::solver::{BoundaryMonitor, EvolveOptions, Frame, NonlinearityKind};
use serde::{Deserialize, Serialize};

use crate::error::RunError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dim: usize,
    pub points: usize,
    pub half_width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquationKind {
    Linear,
    Power,
    Saturated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationSpec {
    pub kind: EquationKind,
    #[serde(default = "one_u32")]
    pub n: u32,
    #[serde(default = "direct")]
    pub frame: Frame,
}

fn one_u32() -> u32 {
    1
}

fn direct() -> Frame {
    Frame::Direct
}

impl EquationSpec {
    pub fn nonlinearity(&self) -> NonlinearityKind {
        match self.kind {
            EquationKind::Linear => NonlinearityKind::Linear,
            EquationKind::Power => NonlinearityKind::Power { n: self.n },
            EquationKind::Saturated => NonlinearityKind::Saturated { n: self.n },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    Gaussian {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        center: [f64; 2],
        #[serde(default)]
        momentum: [f64; 2],
    },
    RadialGaussian2d {
        amplitude: f64,
        width: f64,
    },
    RandomH11 {
        seed: u64,
        amplitude: f64,
        correlation_length: f64,
        envelope_width: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Schedule {
    /// `{1, 2, 4, ...}` up to the end time, `fine_prefix` extra equally
    /// spaced points inside `(1, 2)`, and the end time itself.
    Dyadic {
        #[serde(default)]
        fine_prefix: usize,
    },
    Explicit {
        times: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub dt: f64,
    pub t_end: f64,
    pub schedule: Schedule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObserverSpec {
    #[serde(default = "yes")]
    pub scattering: bool,
    #[serde(default = "yes")]
    pub pseudoconformal: bool,
    #[serde(default)]
    pub snapshots: bool,
}

fn yes() -> bool {
    true
}

impl Default for ObserverSpec {
    fn default() -> Self {
        Self { scattering: true, pseudoconformal: true, snapshots: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonitorSpec {
    #[serde(default = "stride")]
    pub node_stride: usize,
    #[serde(default = "mass_tol")]
    pub mass_tolerance: f64,
    #[serde(default)]
    pub boundary: Option<BoundaryMonitor>,
    #[serde(default = "tail_tol")]
    pub spectral_tail_tolerance: f64,
}

fn stride() -> usize {
    4
}

fn mass_tol() -> f64 {
    1e-9
}

fn tail_tol() -> f64 {
    1e-6
}

impl Default for MonitorSpec {
    fn default() -> Self {
        Self {
            node_stride: stride(),
            mass_tolerance: mass_tol(),
            boundary: Some(BoundaryMonitor::default()),
            spectral_tail_tolerance: tail_tol(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Conventions {
    #[serde(default = "plus")]
    pub phase_sign: PhaseSign,
    #[serde(default = "one_f64")]
    pub phase_lower_limit: f64,
    #[serde(default = "minus_one")]
    pub weak_index: f64,
}

fn plus() -> PhaseSign {
    PhaseSign::Plus
}

fn one_f64() -> f64 {
    1.0
}

fn minus_one() -> f64 {
    -1.0
}

impl Default for Conventions {
    fn default() -> Self {
        Self { phase_sign: PhaseSign::Plus, phase_lower_limit: 1.0, weak_index: -1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub grid: GridSpec,
    pub equation: EquationSpec,
    pub initial: InitialSpec,
    pub time: TimeSpec,
    #[serde(default)]
    pub observers: ObserverSpec,
    #[serde(default)]
    pub monitor: MonitorSpec,
    pub output: OutputSpec,
    #[serde(default)]
    pub conventions: Conventions,
}

fn positive(name: &str, v: f64) -> Result<(), RunError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(RunError::Config(format!("{name} must be positive and finite, got {v}")))
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, RunError> {
        let c: Self = toml::from_str(text).map_err(|e| RunError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn from_json(text: &str) -> Result<Self, RunError> {
        let c: Self = serde_json::from_str(text).map_err(|e| RunError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable in TOML")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config is always representable in JSON")
    }

    /// Reads a config file; `.json` files are parsed as JSON, anything else
    /// as TOML.
    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunError::Usage(format!("cannot read {}: {e}", path.display())))?;
        if path.extension().is_some_and(|e| e == "json") {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        }
    }

    pub fn validate(&self) -> Result<(), RunError> {
        let g = &self.grid;
        if !(1..=2).contains(&g.dim) {
            return Err(RunError::Config(format!("grid.dim must be 1 or 2, got {}", g.dim)));
        }
        if g.points < 16 || !g.points.is_power_of_two() {
            return Err(RunError::Config(format!("grid.points must be a power of two >= 16, got {}", g.points)));
        }
        positive("grid.half_width", g.half_width)?;
        if self.equation.kind != EquationKind::Linear && self.equation.n == 0 {
            return Err(RunError::Config("equation.n must be at least 1".into()));
        }
        if self.equation.kind != EquationKind::Linear {
            self.equation.nonlinearity().validate().map_err(|e| RunError::Config(format!("equation: {e}")))?;
        }
        positive("time.dt", self.time.dt)?;
        positive("time.t_end", self.time.t_end)?;
        if self.equation.frame == Frame::Pseudoconformal && self.time.t_end >= 1.0 {
            return Err(RunError::Config(format!(
                "pseudoconformal runs end before τ = 1, got {}",
                self.time.t_end
            )));
        }
        if let Schedule::Explicit { times } = &self.time.schedule {
            if times.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
                return Err(RunError::Config("checkpoint times must be finite and >= 0".into()));
            }
        }
        if self.monitor.node_stride == 0 {
            return Err(RunError::Config("monitor.node_stride must be positive".into()));
        }
        positive("monitor.mass_tolerance", self.monitor.mass_tolerance)?;
        positive("monitor.spectral_tail_tolerance", self.monitor.spectral_tail_tolerance)?;
        if let Some(b) = &self.monitor.boundary {
            positive("monitor.boundary.tolerance", b.tolerance)?;
            if !(b.radius_fraction > 0.0 && b.radius_fraction < 1.0) {
                return Err(RunError::Config("monitor.boundary.radius_fraction must lie in (0, 1)".into()));
            }
        }
        if self.conventions.phase_lower_limit != 1.0 {
            return Err(RunError::Config(format!(
                "conventions.phase_lower_limit: only 1 is supported, got {}",
                self.conventions.phase_lower_limit
            )));
        }
        if !(self.conventions.weak_index <= 0.0) {
            return Err(RunError::Config("conventions.weak_index must be <= 0".into()));
        }
        match &self.initial {
            InitialSpec::Gaussian { amplitude, width, .. } => {
                nonnegative("initial.amplitude", *amplitude)?;
                positive("initial.width", *width)?;
            }
            InitialSpec::RadialGaussian2d { amplitude, width } => {
                if g.dim != 2 {
                    return Err(RunError::Config("radial_gaussian_2d needs grid.dim = 2".into()));
                }
                nonnegative("initial.amplitude", *amplitude)?;
                positive("initial.width", *width)?;
            }
            InitialSpec::RandomH11 { amplitude, correlation_length, envelope_width, .. } => {
                nonnegative("initial.amplitude", *amplitude)?;
                positive("initial.correlation_length", *correlation_length)?;
                positive("initial.envelope_width", *envelope_width)?;
            }
        }
        Ok(())
    }

    /// Checkpoint times inside `(start, end]`, sorted and deduplicated.
    pub fn checkpoints(&self) -> Vec<f64> {
        let end = self.time.t_end;
        let mut out: Vec<f64> = match &self.time.schedule {
            Schedule::Explicit { times } => times.clone(),
            Schedule::Dyadic { fine_prefix } => {
                let mut v = Vec::new();
                if self.equation.frame == Frame::Pseudoconformal {
                    // Dyadic in the distance to τ = 1.
                    let mut d = 0.5;
                    while 1.0 - d <= end {
                        v.push(1.0 - d);
                        d /= 2.0;
                    }
                } else {
                    let mut t = 1.0;
                    while t <= end {
                        v.push(t);
                        t *= 2.0;
                    }
                    let m = *fine_prefix + 1;
                    if end > 2.0 {
                        v.extend((1..m).map(|k| 1.0 + k as f64 / m as f64));
                    }
                }
                v.push(end);
                v
            }
        };
        out.retain(|t| *t > 0.0 && *t <= end);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    pub fn evolve_options(&self) -> EvolveOptions {
        EvolveOptions {
            node_stride: self.monitor.node_stride,
            mass_tolerance: self.monitor.mass_tolerance,
            boundary: self.monitor.boundary,
            spectral_tail_tolerance: self.monitor.spectral_tail_tolerance,
            ..EvolveOptions::default()
        }
    }
}

fn nonnegative(name: &str, v: f64) -> Result<(), RunError> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(RunError::Config(format!("{name} must be nonnegative and finite, got {v}")))
    }
}
