use num_complex::Complex;

use super::grid::Grid;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Which variable a field's samples are indexed by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Space {
    /// Samples at the physical nodes `x_j`.
    Physical,
    /// Samples at the centred frequency nodes `xi_k`.
    Frequency,
}

/// Complex samples of a function on a [`Grid`], tagged with the space they
/// live in.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField<T: Real> {
    grid: Grid<T>,
    values: Vec<Complex<T>>,
    space: Space,
}

impl<T: Real> ComplexField<T> {
    pub fn zeros(grid: &Grid<T>, space: Space) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![Complex::new(T::zero(), T::zero()); grid.len()],
            space,
        }
    }

    /// Wraps existing samples. The length must be `N^dim`.
    pub fn from_values(grid: &Grid<T>, values: Vec<Complex<T>>, space: Space) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            values,
            space,
        })
    }

    /// Samples `f` at every physical node. In 1D the second coordinate is 0.
    pub fn from_fn(grid: &Grid<T>, f: impl Fn([T; 2]) -> Complex<T>) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.position(i))).collect();
        Self {
            grid: grid.clone(),
            values,
            space: Space::Physical,
        }
    }

    /// Samples `f` at every frequency node.
    pub fn from_fn_frequency(grid: &Grid<T>, f: impl Fn([T; 2]) -> Complex<T>) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.frequency(i))).collect();
        Self {
            grid: grid.clone(),
            values,
            space: Space::Frequency,
        }
    }

    #[inline]
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.values
    }

    #[inline]
    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    #[inline]
    pub fn space(&self) -> Space {
        self.space
    }

    /// Re-tags the samples without touching them.
    pub(crate) fn with_space(mut self, space: Space) -> Self {
        self.space = space;
        self
    }

    pub fn expect_space(&self, expected: Space) -> Result<()> {
        if self.space == expected {
            Ok(())
        } else {
            Err(Error::WrongSpace {
                expected,
                found: self.space,
            })
        }
    }

    pub fn expect_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid.same_as(&other.grid) && self.space == other.space {
            Ok(())
        } else if !self.grid.same_as(&other.grid) {
            Err(Error::GridMismatch)
        } else {
            Err(Error::WrongSpace {
                expected: self.space,
                found: other.space,
            })
        }
    }

    /// Fails with [`Error::NonFinite`] if any sample is NaN or infinite.
    pub fn check_finite(&self, context: &'static str) -> Result<()> {
        if self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite(context))
        }
    }

    /// Quadrature weight matching the space tag.
    #[inline]
    pub fn cell_volume(&self) -> T {
        match self.space {
            Space::Physical => self.grid.cell_volume(),
            Space::Frequency => self.grid.dual_cell_volume(),
        }
    }

    /// `int |f|^2`, by Riemann sum in the field's own variable.
    pub fn norm_sqr(&self) -> T {
        self.values.iter().map(|z| z.norm_sqr()).sum::<T>() * self.cell_volume()
    }

    /// L^2 norm in the field's own variable.
    pub fn l2(&self) -> T {
        self.norm_sqr().sqrt()
    }

    /// Maximum modulus over the lattice.
    pub fn max_abs(&self) -> T {
        self.values
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// `(f | g) = int f conj(g)`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        self.expect_same_grid(other)?;
        let s: Complex<T> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z);
        Ok(s * self.cell_volume())
    }

    /// `f - g`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.expect_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            grid: self.grid.clone(),
            values,
            space: self.space,
        })
    }

    /// Multiplies every sample by `c`.
    pub fn scaled(&self, c: Complex<T>) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|z| z * c).collect(),
            space: self.space,
        }
    }

    /// Pointwise map preserving grid and tag.
    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&z| f(z)).collect(),
            space: self.space,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|z| z.re == T::zero() && z.im == T::zero())
    }
}
