//! Lattices, the unitary lattice Fourier transform, norms and band-limited
//! resampling.
//!
//! The periodic box `[-L, L)^dim` stands in for the whole space. Results are
//! meaningful only while the fields stay well inside the box; the evolution
//! layer monitors the mass near the boundary for that reason.

mod field;
mod fourier;
mod grid;
mod norms;
mod resample;

pub use field::{ComplexField, Space};
pub use fourier::{forward_fourier, inverse_fourier};
pub(crate) use fourier::{apply_radial_multiplier, dft_in_place, Direction};
pub use grid::{make_grid, Grid};
pub(crate) use norms::frequency_weighted_l2_sqr;
pub use norms::{
    grad_l2, lp_norm, lp_power, norms, spatial_weighted_l2, weighted_sobolev_norm, NormReport,
};
pub(crate) use resample::half_range;
pub use resample::{evaluate_at_points, evaluate_on_tensor};
