//! Band-limited (trigonometric) interpolation of lattice fields at arbitrary
//! points.
//!
//! A physical field is identified with `(2 pi)^{-dim/2} sum_k e^{i x.xi_k} F f_k dxi^dim`,
//! the inverse transform read as a function of continuous `x`. Points outside
//! `[-L, L]^dim` evaluate to zero, so the result models a function on the
//! whole space rather than its periodisation.

use num_complex::Complex;
use rayon::prelude::*;

use super::field::{ComplexField, Space};
use super::fourier::{forward_fourier, inverse_fourier};
use super::grid::Grid;
use crate::error::Result;
use crate::scalar::Real;

/// Expansion of a lattice field as a finite exponential sum in its own
/// variable: `g(y) = scale^dim sum_k c_k e^{i sign y.(start + k step)}`.
struct Expansion<T: Real> {
    coeffs: Vec<Complex<T>>,
    n: usize,
    dim: usize,
    start: T,
    step: T,
    sign: T,
    scale: T,
    /// Half-extent of the field's own lattice; points beyond it evaluate to 0.
    half_range: T,
}

impl<T: Real> Expansion<T> {
    fn new(field: &ComplexField<T>) -> Result<Self> {
        let grid = field.grid();
        let tau_root = T::TAU().sqrt();
        Ok(match field.space() {
            Space::Physical => Self {
                coeffs: forward_fourier(field)?.into_values(),
                n: grid.points_per_dim(),
                dim: grid.dim(),
                start: grid.xi_axis()[0],
                step: grid.dxi(),
                sign: T::one(),
                scale: grid.dxi() / tau_root,
                half_range: grid.half_width(),
            },
            // g = F(F^{-1} g), so the frequency variable pairs with e^{-i x.xi}.
            Space::Frequency => Self {
                coeffs: inverse_fourier(field)?.into_values(),
                n: grid.points_per_dim(),
                dim: grid.dim(),
                start: grid.x_axis()[0],
                step: grid.dx(),
                sign: -T::one(),
                scale: grid.dx() / tau_root,
                half_range: grid.xi_max(),
            },
        })
    }

    #[inline]
    fn inside(&self, y: T) -> bool {
        y.abs() <= self.half_range
    }

    /// `sum_k c_k e^{i sign y (start + k step)}` by Horner's rule.
    fn axis_sum(&self, coeffs: &[Complex<T>], y: T) -> Complex<T> {
        let y = y * self.sign;
        let w = Complex::from_polar(T::one(), y * self.step);
        let mut acc = Complex::new(T::zero(), T::zero());
        for &c in coeffs.iter().rev() {
            acc = acc * w + c;
        }
        acc * Complex::from_polar(T::one(), y * self.start)
    }

    fn tensor(&self, targets: &[T]) -> Vec<Complex<T>> {
        let zero = Complex::new(T::zero(), T::zero());
        let m = targets.len();
        let c = self.scale;
        match self.dim {
            1 => targets
                .par_iter()
                .map(|&y| if self.inside(y) { self.axis_sum(&self.coeffs, y) * c } else { zero })
                .collect(),
            _ => {
                // Contract the second axis row by row, then the first axis column by column.
                let partial: Vec<Vec<Complex<T>>> = self
                    .coeffs
                    .par_chunks(self.n)
                    .map(|row| {
                        targets
                            .iter()
                            .map(|&y| if self.inside(y) { self.axis_sum(row, y) } else { zero })
                            .collect()
                    })
                    .collect();
                let columns: Vec<Vec<Complex<T>>> = (0..m)
                    .into_par_iter()
                    .map(|j| {
                        let col: Vec<Complex<T>> = partial.iter().map(|r| r[j]).collect();
                        targets
                            .iter()
                            .map(|&y| {
                                if self.inside(y) {
                                    self.axis_sum(&col, y) * (c * c)
                                } else {
                                    zero
                                }
                            })
                            .collect()
                    })
                    .collect();
                let mut out = vec![zero; m * m];
                for (j, col) in columns.iter().enumerate() {
                    for (i, &v) in col.iter().enumerate() {
                        out[i * m + j] = v;
                    }
                }
                out
            }
        }
    }

    fn point(&self, [a, b]: [T; 2]) -> Complex<T> {
        let zero = Complex::new(T::zero(), T::zero());
        let c = self.scale;
        match self.dim {
            1 if self.inside(a) => self.axis_sum(&self.coeffs, a) * c,
            1 => zero,
            _ if self.inside(a) && self.inside(b) => {
                let col: Vec<Complex<T>> = self
                    .coeffs
                    .chunks(self.n)
                    .map(|row| self.axis_sum(row, b))
                    .collect();
                self.axis_sum(&col, a) * (c * c)
            }
            _ => zero,
        }
    }
}

/// Evaluates the band-limited interpolant of a field, in its own variable,
/// on the tensor grid `targets^dim` (row-major, first axis slowest).
pub fn evaluate_on_tensor<T: Real>(
    field: &ComplexField<T>,
    targets: &[T],
) -> Result<Vec<Complex<T>>> {
    Ok(Expansion::new(field)?.tensor(targets))
}

/// Evaluates the interpolant at scattered points (the second coordinate is
/// ignored in 1D).
pub fn evaluate_at_points<T: Real>(
    field: &ComplexField<T>,
    points: &[[T; 2]],
) -> Result<Vec<Complex<T>>> {
    let e = Expansion::new(field)?;
    Ok(points.par_iter().map(|&p| e.point(p)).collect())
}

/// Per-axis half-extent of the lattice a field of the given space lives on.
pub(crate) fn half_range<T: Real>(grid: &Grid<T>, space: Space) -> T {
    match space {
        Space::Physical => grid.half_width(),
        Space::Frequency => grid.xi_max(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid::make_grid;

    fn bump(g: &Grid<f64>) -> ComplexField<f64> {
        ComplexField::from_fn(g, |[x, y]| {
            Complex::new((-(x * x + y * y) / 2.0).exp(), 0.3 * x * (-(x * x + y * y)).exp())
        })
    }

    #[test]
    fn reproduces_lattice_values() {
        let g = make_grid(1, 128, 10.0).unwrap();
        let f = bump(&g);
        let vals = evaluate_on_tensor(&f, g.x_axis()).unwrap();
        for (a, b) in vals.iter().zip(f.values()) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn matches_analytic_off_lattice() {
        let g = make_grid(2, 128, 10.0).unwrap();
        let f = bump(&g);
        let targets = [-3.3, -0.71, 0.0, 0.123, 2.5, 11.0];
        let vals = evaluate_on_tensor(&f, &targets).unwrap();
        for (i, &a) in targets.iter().enumerate() {
            for (j, &b) in targets.iter().enumerate() {
                let r2: f64 = a * a + b * b;
                let exact = if a.abs() > 10.0 || b.abs() > 10.0 {
                    Complex::new(0.0, 0.0)
                } else {
                    Complex::new((-r2 / 2.0).exp(), 0.3 * a * (-r2).exp())
                };
                assert!((vals[i * targets.len() + j] - exact).norm() < 1e-12);
            }
        }
        let pts = evaluate_at_points(&f, &[[0.123, -0.71], [20.0, 0.0]]).unwrap();
        assert!((pts[0] - vals[3 * targets.len() + 1]).norm() < 1e-13);
        assert_eq!(pts[1], Complex::new(0.0, 0.0));
    }

    #[test]
    fn frequency_fields_interpolate_in_frequency() {
        let g = make_grid(1, 256, 16.0).unwrap();
        let f = ComplexField::from_fn_frequency(&g, |[k, _]: [f64; 2]| {
            Complex::new((-(k - 0.4).powi(2)).exp(), 0.0)
        });
        let targets = [-1.234, 0.0, 0.4, 2.71];
        let vals = evaluate_on_tensor(&f, &targets).unwrap();
        for (&k, v) in targets.iter().zip(&vals) {
            let exact: f64 = (-(k - 0.4f64).powi(2)).exp();
            assert!((v - exact).norm() < 1e-12, "{k}: {v} vs {exact}");
        }
    }
}
