use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniform periodic lattice on `[-L, L)^dim` together with its dual
/// frequency lattice.
///
/// Physical nodes are `x_j = -L + j dx` with `dx = 2L/N`; frequency nodes are
/// `xi_k = (k - N/2) dxi` with `dxi = pi/L`, so that `dx * dxi * N = 2 pi`
/// in every direction. Fields are stored row-major with the first axis
/// slowest.
///
/// Cloning is cheap: the lattice tables and FFT plans are shared. The plans
/// are immutable and allocate their scratch per call, so a grid can be used
/// from many threads at once.
#[derive(Clone)]
pub struct Grid<T: Real> {
    inner: Arc<GridInner<T>>,
}

struct GridInner<T: Real> {
    dim: usize,
    n: usize,
    half_width: T,
    dx: T,
    dxi: T,
    x_axis: Vec<T>,
    xi_axis: Vec<T>,
    /// |x|^2 at every flat index.
    x_sq: Vec<T>,
    /// |xi|^2 at every flat index, centred ordering.
    xi_sq: Vec<T>,
    /// |xi|^2 at every flat index in raw DFT ordering (zero frequency first).
    xi_sq_dft: Vec<T>,
    fft: Arc<dyn Fft<T>>,
    ifft: Arc<dyn Fft<T>>,
}

impl<T: Real> Grid<T> {
    /// Builds a grid. `points_per_dim` must be a power of two no smaller
    /// than 16 and `dim` must be 1 or 2.
    pub fn new(dim: usize, points_per_dim: usize, half_width: T) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGrid(format!(
                "dimension must be 1 or 2, got {dim}"
            )));
        }
        if points_per_dim < 16 || !points_per_dim.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per dimension must be a power of two >= 16, got {points_per_dim}"
            )));
        }
        if !(half_width > T::zero()) || !half_width.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "half width must be positive and finite, got {half_width}"
            )));
        }

        let n = points_per_dim;
        let nt = T::from_usize_lossy(n);
        let dx = (half_width + half_width) / nt;
        let dxi = T::PI() / half_width;
        let half = n / 2;
        let x_axis: Vec<T> = (0..n)
            .map(|j| -half_width + T::from_usize_lossy(j) * dx)
            .collect();
        let xi_axis: Vec<T> = (0..n)
            .map(|k| (T::from_usize_lossy(k) - T::from_usize_lossy(half)) * dxi)
            .collect();

        let (x_sq, xi_sq) = match dim {
            1 => (
                x_axis.iter().map(|&x| x * x).collect(),
                xi_axis.iter().map(|&k| k * k).collect(),
            ),
            _ => {
                let mut xs = Vec::with_capacity(n * n);
                let mut ks = Vec::with_capacity(n * n);
                for i in 0..n {
                    for j in 0..n {
                        xs.push(x_axis[i] * x_axis[i] + x_axis[j] * x_axis[j]);
                        ks.push(xi_axis[i] * xi_axis[i] + xi_axis[j] * xi_axis[j]);
                    }
                }
                (xs, ks)
            }
        };

        let dft_axis: Vec<T> = (0..n)
            .map(|k| {
                let m = if k < half { k as f64 } else { k as f64 - n as f64 };
                T::lit(m) * dxi
            })
            .collect();
        let xi_sq_dft: Vec<T> = match dim {
            1 => dft_axis.iter().map(|&k| k * k).collect(),
            _ => (0..n * n)
                .map(|idx| {
                    let (a, b) = (dft_axis[idx / n], dft_axis[idx % n]);
                    a * a + b * b
                })
                .collect(),
        };

        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(n);
        let ifft = planner.plan_fft_inverse(n);

        Ok(Self {
            inner: Arc::new(GridInner {
                dim,
                n,
                half_width,
                dx,
                dxi,
                x_axis,
                xi_axis,
                x_sq,
                xi_sq,
                xi_sq_dft,
                fft,
                ifft,
            }),
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    #[inline]
    pub fn points_per_dim(&self) -> usize {
        self.inner.n
    }

    /// Total number of lattice points, `N^dim`.
    #[inline]
    pub fn len(&self) -> usize {
        self.inner.n.pow(self.inner.dim as u32)
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn half_width(&self) -> T {
        self.inner.half_width
    }

    #[inline]
    pub fn dx(&self) -> T {
        self.inner.dx
    }

    #[inline]
    pub fn dxi(&self) -> T {
        self.inner.dxi
    }

    /// Largest representable frequency magnitude, `pi N / (2L)`.
    #[inline]
    pub fn xi_max(&self) -> T {
        T::from_usize_lossy(self.inner.n / 2) * self.inner.dxi
    }

    /// Physical coordinates along one axis.
    #[inline]
    pub fn x_axis(&self) -> &[T] {
        &self.inner.x_axis
    }

    /// Frequency coordinates along one axis (centred ordering).
    #[inline]
    pub fn xi_axis(&self) -> &[T] {
        &self.inner.xi_axis
    }

    #[inline]
    pub fn x_sq(&self) -> &[T] {
        &self.inner.x_sq
    }

    #[inline]
    pub fn xi_sq(&self) -> &[T] {
        &self.inner.xi_sq
    }

    /// |xi|^2 in raw DFT ordering, for multipliers applied between an
    /// unshifted forward and inverse DFT.
    #[inline]
    pub fn xi_sq_dft(&self) -> &[T] {
        &self.inner.xi_sq_dft
    }

    /// Quadrature weight of one physical cell, `dx^dim`.
    #[inline]
    pub fn cell_volume(&self) -> T {
        self.inner.dx.powi(self.inner.dim as i32)
    }

    /// Quadrature weight of one frequency cell, `dxi^dim`.
    #[inline]
    pub fn dual_cell_volume(&self) -> T {
        self.inner.dxi.powi(self.inner.dim as i32)
    }

    /// Splits a flat index into per-axis indices (unused trailing entries are 0).
    #[inline]
    pub fn unflatten(&self, idx: usize) -> [usize; 2] {
        match self.inner.dim {
            1 => [idx, 0],
            _ => [idx / self.inner.n, idx % self.inner.n],
        }
    }

    /// Physical coordinates of a flat index.
    #[inline]
    pub fn position(&self, idx: usize) -> [T; 2] {
        let [i, j] = self.unflatten(idx);
        match self.inner.dim {
            1 => [self.inner.x_axis[i], T::zero()],
            _ => [self.inner.x_axis[i], self.inner.x_axis[j]],
        }
    }

    /// Frequency coordinates of a flat index.
    #[inline]
    pub fn frequency(&self, idx: usize) -> [T; 2] {
        let [i, j] = self.unflatten(idx);
        match self.inner.dim {
            1 => [self.inner.xi_axis[i], T::zero()],
            _ => [self.inner.xi_axis[i], self.inner.xi_axis[j]],
        }
    }

    pub(crate) fn fft(&self) -> &Arc<dyn Fft<T>> {
        &self.inner.fft
    }

    pub(crate) fn ifft(&self) -> &Arc<dyn Fft<T>> {
        &self.inner.ifft
    }

    /// Structural equality (dimension, size and width).
    pub fn same_as(&self, other: &Grid<T>) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.dim == other.inner.dim
                && self.inner.n == other.inner.n
                && self.inner.half_width == other.inner.half_width)
    }
}

impl<T: Real> PartialEq for Grid<T> {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl<T: Real> fmt::Debug for Grid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("dim", &self.inner.dim)
            .field("points_per_dim", &self.inner.n)
            .field("half_width", &self.inner.half_width)
            .field("dx", &self.inner.dx)
            .field("dxi", &self.inner.dxi)
            .finish()
    }
}

/// Convenience constructor mirroring [`Grid::new`].
pub fn make_grid<T: Real>(dim: usize, points_per_dim: usize, half_width: T) -> Result<Grid<T>> {
    Grid::new(dim, points_per_dim, half_width)
}
