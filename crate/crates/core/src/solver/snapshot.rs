//! Flat binary snapshot records.
//!
//! Layout, all little-endian:
//!
//! | offset | type     | content                                          |
//! |--------|----------|--------------------------------------------------|
//! | 0      | [u8; 8]  | magic `MSNAPv01`                                 |
//! | 8      | u64      | dim                                              |
//! | 16     | u64      | points per dimension `N`                         |
//! | 24     | f64      | half width `L`                                   |
//! | 32     | f64      | time                                             |
//! | 40     | u64      | frame: 0 direct, 1 pseudoconformal               |
//! | 48     | u64      | nonlinearity: 0 linear, 1 power, 2 saturated     |
//! | 56     | u64      | nonlinearity exponent `n` (0 when linear)        |
//! | 64     | f64      | time step                                        |
//! | 72     | u64      | space: 0 physical, 1 frequency                   |
//! | 80     | f64 × 2M | `M = N^dim` samples as interleaved (re, im), row-major |

use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use num_complex::Complex;

use super::{Frame, NonlinearityKind, SolverState};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::{make_grid, ComplexField, Space};

pub const SNAPSHOT_MAGIC: &[u8; 8] = b"MSNAPv01";

pub fn write_snapshot<T: Real, W: Write>(mut w: W, state: &SolverState<T>) -> Result<()> {
    let grid = state.field.grid();
    w.write_all(SNAPSHOT_MAGIC)?;
    w.write_u64::<LittleEndian>(grid.dim() as u64)?;
    w.write_u64::<LittleEndian>(grid.points_per_dim() as u64)?;
    w.write_f64::<LittleEndian>(grid.half_width().to_f64_lossy())?;
    w.write_f64::<LittleEndian>(state.time.to_f64_lossy())?;
    w.write_u64::<LittleEndian>(match state.frame {
        Frame::Direct => 0,
        Frame::Pseudoconformal => 1,
    })?;
    let (kind, n) = match state.nonlinearity {
        NonlinearityKind::Linear => (0, 0),
        NonlinearityKind::Power { n } => (1, n),
        NonlinearityKind::Saturated { n } => (2, n),
    };
    w.write_u64::<LittleEndian>(kind)?;
    w.write_u64::<LittleEndian>(u64::from(n))?;
    w.write_f64::<LittleEndian>(state.dt.to_f64_lossy())?;
    w.write_u64::<LittleEndian>(match state.field.space() {
        Space::Physical => 0,
        Space::Frequency => 1,
    })?;
    for z in state.field.values() {
        w.write_f64::<LittleEndian>(z.re.to_f64_lossy())?;
        w.write_f64::<LittleEndian>(z.im.to_f64_lossy())?;
    }
    w.flush()?;
    Ok(())
}

fn bad(msg: &str) -> Error {
    Error::Io(format!("malformed snapshot: {msg}"))
}

pub fn read_snapshot<T: Real, R: Read>(mut r: R) -> Result<SolverState<T>> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != SNAPSHOT_MAGIC {
        return Err(bad("bad magic"));
    }
    let dim = r.read_u64::<LittleEndian>()? as usize;
    let n = r.read_u64::<LittleEndian>()? as usize;
    let half_width = r.read_f64::<LittleEndian>()?;
    let time = r.read_f64::<LittleEndian>()?;
    let frame = match r.read_u64::<LittleEndian>()? {
        0 => Frame::Direct,
        1 => Frame::Pseudoconformal,
        _ => return Err(bad("frame code")),
    };
    let kind = r.read_u64::<LittleEndian>()?;
    let exponent = u32::try_from(r.read_u64::<LittleEndian>()?).map_err(|_| bad("exponent"))?;
    let nonlinearity = match kind {
        0 => NonlinearityKind::Linear,
        1 => NonlinearityKind::Power { n: exponent },
        2 => NonlinearityKind::Saturated { n: exponent },
        _ => return Err(bad("nonlinearity code")),
    };
    let dt = r.read_f64::<LittleEndian>()?;
    let space = match r.read_u64::<LittleEndian>()? {
        0 => Space::Physical,
        1 => Space::Frequency,
        _ => return Err(bad("space code")),
    };
    let grid = make_grid(dim, n, T::lit(half_width))?;
    let mut values = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        let re = r.read_f64::<LittleEndian>()?;
        let im = r.read_f64::<LittleEndian>()?;
        values.push(Complex::new(T::lit(re), T::lit(im)));
    }
    let field = ComplexField::from_values(&grid, values, space)?;
    SolverState::new(field, T::lit(time), frame, nonlinearity, T::lit(dt))
}
