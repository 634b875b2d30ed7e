//! Per-checkpoint diagnostics and their CSV encodings.

use std::io::Write;
use std::path::PathBuf;

use modscat_core::conservation::{energy, mass};
use modscat_core::operators::j_norm;
use modscat_core::solver::{write_snapshot, Frame, NonlinearityKind, Observer, Snapshot, SolverState};
use modscat_core::spectral::grad_l2;
use serde::Serialize;

use crate::error::RunError;

/// Direct-frame time of a compactified time.
pub fn direct_time(frame: Frame, time: f64) -> f64 {
    match frame {
        Frame::Direct => time,
        Frame::Pseudoconformal => time / (1.0 - time),
    }
}

/// State functionals sampled at one checkpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckpointSample {
    /// Solver time (`τ` in the compactified frame).
    pub solver_time: f64,
    /// Direct-frame time.
    pub t: f64,
    pub mass: f64,
    /// Conserved energy; only available in the direct frame.
    pub energy: Option<f64>,
    /// `||u(t)||_∞` in the direct frame.
    pub linf: f64,
    /// `||J(1+t) u(t)||`.
    pub j_norm: f64,
}

/// Samples `||u||_∞` at every node and the full state functionals at
/// checkpoints, optionally writing binary snapshots.
#[derive(Debug)]
pub struct DiagnosticsObserver {
    kind: NonlinearityKind,
    dt: f64,
    /// `(t, ||u(t)||_∞)` at every node with `t > 0`, direct-frame time.
    pub linf_series: Vec<(f64, f64)>,
    pub samples: Vec<CheckpointSample>,
    snapshot_dir: Option<PathBuf>,
}

impl DiagnosticsObserver {
    pub fn new(kind: NonlinearityKind, dt: f64, snapshot_dir: Option<PathBuf>) -> Self {
        Self { kind, dt, linf_series: Vec::new(), samples: Vec::new(), snapshot_dir }
    }

    fn linf(snap: &Snapshot<'_, f64>) -> f64 {
        let m = snap.field.max_abs();
        match snap.frame {
            Frame::Direct => m,
            // |u(t, x)| = (1-τ)^{d/2} |v(τ, x/(1+t))|.
            Frame::Pseudoconformal => m * (1.0 - snap.time).powf(snap.field.grid().dim() as f64 / 2.0),
        }
    }
}

impl Observer<f64> for DiagnosticsObserver {
    fn node(&mut self, snap: &Snapshot<'_, f64>) -> modscat_core::Result<()> {
        let t = direct_time(snap.frame, snap.time);
        if t > 0.0 && self.linf_series.last().is_none_or(|(p, _)| *p < t) {
            self.linf_series.push((t, Self::linf(snap)));
        }
        Ok(())
    }

    fn checkpoint(&mut self, snap: &Snapshot<'_, f64>) -> modscat_core::Result<()> {
        let t = direct_time(snap.frame, snap.time);
        let (energy, jn) = match snap.frame {
            Frame::Direct => (Some(energy(snap.field, self.kind)?), j_norm(snap.field, 1.0 + t)?),
            Frame::Pseudoconformal => (None, grad_l2(snap.field)?),
        };
        self.samples.push(CheckpointSample {
            solver_time: snap.time,
            t,
            mass: mass(snap.field),
            energy,
            linf: Self::linf(snap),
            j_norm: jn,
        });
        if let Some(dir) = &self.snapshot_dir {
            let state = SolverState::new(snap.field.clone(), snap.time, snap.frame, snap.nonlinearity, self.dt)?;
            let path = dir.join(format!("snapshot_{:04}.bin", self.samples.len() - 1));
            let file = std::fs::File::create(path)?;
            write_snapshot(std::io::BufWriter::new(file), &state)?;
        }
        Ok(())
    }
}

/// One CSV row per checkpoint. Gap columns compare with the checkpoint at
/// half the time and are empty when that checkpoint does not exist.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagnosticRecord {
    pub t: f64,
    pub mass: f64,
    pub energy: Option<f64>,
    pub linf: f64,
    /// `t^{dim/2} ||u||_∞`.
    pub t_half_dim_linf: f64,
    /// `t^{1/3} ||u||_∞`.
    pub t_third_linf: f64,
    /// `||J(1+t) u(t)||`.
    pub j_norm: f64,
    pub cpce_residual: Option<f64>,
    pub l2_gap: Option<f64>,
    pub weak_gap: Option<f64>,
    pub tail_bound: Option<f64>,
    pub h_t: Option<f64>,
}

pub const DIAGNOSTIC_COLUMNS: [&str; 12] = [
    "t",
    "mass",
    "energy",
    "linf",
    "t_half_dim_linf",
    "t_third_linf",
    "j_norm",
    "cpce_residual",
    "l2_gap",
    "weak_gap",
    "tail_bound",
    "h_t",
];

/// Gap diagnostics for one dyadic pair `(s, t)` with state functionals at `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LedgerRow {
    pub t: f64,
    pub s: f64,
    pub l2_gap: f64,
    pub weak_gap: f64,
    pub tail_bound: f64,
    pub h_t: f64,
    pub mass: f64,
    pub energy: Option<f64>,
    pub linf: f64,
    /// `t^{dim/2} ||u(t)||_∞`.
    pub t_linf_scaled: f64,
}

pub const LEDGER_COLUMNS: [&str; 10] =
    ["t", "s", "l2_gap", "weak_gap", "tail_bound", "H_t", "mass", "energy", "linf", "t_linf_scaled"];

/// Corrected and uncorrected gaps for one dyadic pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContrastRow {
    pub s: f64,
    pub t: f64,
    pub corrected: f64,
    pub uncorrected: f64,
    /// `corrected / uncorrected` (zero when both vanish).
    pub ratio: f64,
}

pub const CONTRAST_COLUMNS: [&str; 5] = ["s", "t", "corrected", "uncorrected", "ratio"];

/// Full-precision, locale-free float formatting (17 significant digits).
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn write_rows<W: Write>(out: W, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<(), RunError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_diagnostics<W: Write>(out: W, rows: &[DiagnosticRecord]) -> Result<(), RunError> {
    write_rows(
        out,
        &DIAGNOSTIC_COLUMNS,
        rows.iter().map(|r| {
            vec![
                fmt_f64(r.t),
                fmt_f64(r.mass),
                fmt_opt(r.energy),
                fmt_f64(r.linf),
                fmt_f64(r.t_half_dim_linf),
                fmt_f64(r.t_third_linf),
                fmt_f64(r.j_norm),
                fmt_opt(r.cpce_residual),
                fmt_opt(r.l2_gap),
                fmt_opt(r.weak_gap),
                fmt_opt(r.tail_bound),
                fmt_opt(r.h_t),
            ]
        }),
    )
}

pub fn write_ledger<W: Write>(out: W, rows: &[LedgerRow]) -> Result<(), RunError> {
    write_rows(
        out,
        &LEDGER_COLUMNS,
        rows.iter().map(|r| {
            vec![
                fmt_f64(r.t),
                fmt_f64(r.s),
                fmt_f64(r.l2_gap),
                fmt_f64(r.weak_gap),
                fmt_f64(r.tail_bound),
                fmt_f64(r.h_t),
                fmt_f64(r.mass),
                fmt_opt(r.energy),
                fmt_f64(r.linf),
                fmt_f64(r.t_linf_scaled),
            ]
        }),
    )
}

pub fn write_contrast<W: Write>(out: W, rows: &[ContrastRow]) -> Result<(), RunError> {
    write_rows(
        out,
        &CONTRAST_COLUMNS,
        rows.iter().map(|r| {
            vec![fmt_f64(r.s), fmt_f64(r.t), fmt_f64(r.corrected), fmt_f64(r.uncorrected), fmt_f64(r.ratio)]
        }),
    )
}

pub fn write_linf_series<W: Write>(out: W, series: &[(f64, f64)]) -> Result<(), RunError> {
    write_rows(out, &["t", "linf"], series.iter().map(|(t, v)| vec![fmt_f64(*t), fmt_f64(*v)]))
}

/// Reads the `t` column and a named column from a CSV with a header row,
/// skipping rows where the named column is empty.
pub fn read_column(path: &std::path::Path, column: &str) -> Result<(Vec<f64>, Vec<f64>), RunError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| RunError::Usage(format!("{}: {e}", path.display())))?;
    let headers = r.headers().map_err(|e| RunError::Usage(e.to_string()))?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| RunError::Usage(format!("column `{name}` not found in {}", path.display())))
    };
    let (ti, ci) = (find("t")?, find(column)?);
    let mut ts = Vec::new();
    let mut vs = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| RunError::Usage(e.to_string()))?;
        let (t, v) = (&rec[ti], &rec[ci]);
        if v.is_empty() {
            continue;
        }
        let parse = |s: &str| s.parse::<f64>().map_err(|e| RunError::Usage(format!("bad number `{s}`: {e}")));
        ts.push(parse(t)?);
        vs.push(parse(v)?);
    }
    Ok((ts, vs))
}
