//! Unitary continuum Fourier transform on the lattice.
//!
//! The transform approximates `F f(xi) = (2 pi)^{-dim/2} int e^{-i x.xi} f(x) dx`
//! by the Riemann sum over the physical nodes. With `x_j = -L + j dx` and
//! `xi_k = (k - N/2) dxi` this is, per axis,
//! `F f_k = dx / sqrt(2 pi) * (-1)^k * DFT((-1)^j f_j)_k`, which needs `N/2`
//! even (guaranteed by `N >= 16`). The discrete map is exactly unitary between
//! the `dx`- and `dxi`-weighted L^2 norms.

use num_complex::Complex;

use super::field::{ComplexField, Space};
use super::grid::Grid;
use crate::error::Result;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Direction {
    Forward,
    Inverse,
}

/// Unnormalised multi-dimensional DFT in place (row-major storage).
pub(crate) fn dft_in_place<T: Real>(grid: &Grid<T>, buf: &mut [Complex<T>], dir: Direction) {
    let plan = match dir {
        Direction::Forward => grid.fft(),
        Direction::Inverse => grid.ifft(),
    };
    let n = grid.points_per_dim();
    match grid.dim() {
        1 => plan.process(buf),
        _ => {
            plan.process(buf);
            let mut scratch = vec![Complex::new(T::zero(), T::zero()); buf.len()];
            transpose(buf, &mut scratch, n);
            plan.process(&mut scratch);
            transpose(&scratch, buf, n);
        }
    }
}

fn transpose<T: Copy>(src: &[T], dst: &mut [T], n: usize) {
    const BLOCK: usize = 32;
    for ib in (0..n).step_by(BLOCK) {
        for jb in (0..n).step_by(BLOCK) {
            for i in ib..(ib + BLOCK).min(n) {
                for j in jb..(jb + BLOCK).min(n) {
                    dst[j * n + i] = src[i * n + j];
                }
            }
        }
    }
}

/// `(-1)^(sum of axis indices)` for a flat index; `N` is even so the pattern
/// is the same in physical and frequency indexing.
#[inline]
fn parity<T: Real>(grid: &Grid<T>, idx: usize) -> bool {
    let [i, j] = grid.unflatten(idx);
    (i + j) % 2 == 1
}

fn flip_signs<T: Real>(grid: &Grid<T>, buf: &mut [Complex<T>]) {
    for (idx, z) in buf.iter_mut().enumerate() {
        if parity(grid, idx) {
            *z = -*z;
        }
    }
}

fn transform<T: Real>(grid: &Grid<T>, buf: &mut [Complex<T>], dir: Direction) {
    let spacing = match dir {
        Direction::Forward => grid.dx(),
        Direction::Inverse => grid.dxi(),
    };
    let per_axis = spacing / (T::TAU()).sqrt();
    let scale = per_axis.powi(grid.dim() as i32);
    flip_signs(grid, buf);
    dft_in_place(grid, buf, dir);
    for (idx, z) in buf.iter_mut().enumerate() {
        let s = if parity(grid, idx) { -scale } else { scale };
        *z = *z * s;
    }
}

/// Physical samples to centred frequency samples.
pub fn forward_fourier<T: Real>(field: &ComplexField<T>) -> Result<ComplexField<T>> {
    field.expect_space(Space::Physical)?;
    let mut out = field.clone();
    transform(field.grid(), out.values_mut(), Direction::Forward);
    Ok(out.with_space(Space::Frequency))
}

/// Centred frequency samples to physical samples.
pub fn inverse_fourier<T: Real>(field: &ComplexField<T>) -> Result<ComplexField<T>> {
    field.expect_space(Space::Frequency)?;
    let mut out = field.clone();
    transform(field.grid(), out.values_mut(), Direction::Inverse);
    Ok(out.with_space(Space::Physical))
}

/// Applies a Fourier multiplier `m(|xi|^2)` to physical samples in place.
///
/// The sign flips of the continuum convention cancel between the forward and
/// inverse transforms, so only a raw DFT pair and the DFT-ordered table are
/// needed.
pub(crate) fn apply_radial_multiplier<T: Real>(
    grid: &Grid<T>,
    buf: &mut [Complex<T>],
    m: impl Fn(T) -> Complex<T>,
) {
    dft_in_place(grid, buf, Direction::Forward);
    let inv_len = T::one() / T::from_usize_lossy(grid.len());
    for (z, &k2) in buf.iter_mut().zip(grid.xi_sq_dft()) {
        *z = *z * m(k2) * inv_len;
    }
    dft_in_place(grid, buf, Direction::Inverse);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid::make_grid;
    use std::f64::consts::PI;

    fn gaussian(g: &Grid<f64>) -> ComplexField<f64> {
        ComplexField::from_fn(g, |[x, y]| Complex::new((-(x * x + y * y) / 2.0).exp(), 0.0))
    }

    /// Direct quadrature of the continuum integral at one frequency.
    fn direct_quadrature(g: &Grid<f64>, f: &ComplexField<f64>, xi: f64) -> Complex<f64> {
        let s: Complex<f64> = g
            .x_axis()
            .iter()
            .zip(f.values())
            .map(|(&x, &v)| Complex::from_polar(1.0, -x * xi) * v)
            .sum();
        s * g.dx() / (2.0 * PI).sqrt()
    }

    #[test]
    fn zero_maps_to_zero() {
        let g = make_grid(2, 16, 3.0).unwrap();
        let z = ComplexField::zeros(&g, Space::Physical);
        assert!(forward_fourier(&z).unwrap().is_zero());
    }

    #[test]
    fn gaussian_is_self_dual() {
        let g = make_grid(1, 1024, 20.0).unwrap();
        let f = gaussian(&g);
        let hat = forward_fourier(&f).unwrap();
        for (k, (&xi, v)) in g.xi_axis().iter().zip(hat.values()).enumerate() {
            let exact = (-xi * xi / 2.0).exp();
            assert!((v - exact).norm() <= 1e-10 * exact.max(1e-300) + 1e-14, "k={k}");
            if k % 97 == 0 {
                let q = direct_quadrature(&g, &f, xi);
                assert!((q - v).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn gaussian_is_self_dual_in_2d() {
        let g = make_grid(2, 64, 10.0).unwrap();
        let hat = forward_fourier(&gaussian(&g)).unwrap();
        for idx in (0..g.len()).step_by(37) {
            let [a, b] = g.frequency(idx);
            let exact = (-(a * a + b * b) / 2.0).exp();
            assert!((hat.values()[idx] - exact).norm() < 1e-12);
        }
    }

    #[test]
    fn wrong_space_rejected() {
        let g = make_grid(1, 16, 1.0).unwrap();
        let f = ComplexField::zeros(&g, Space::Frequency);
        assert!(forward_fourier(&f).is_err());
        assert!(inverse_fourier(&f.clone().with_space(Space::Physical)).is_err());
    }

    #[test]
    fn multiplier_matches_full_transform() {
        let g = make_grid(2, 32, 6.0).unwrap();
        let f = ComplexField::from_fn(&g, |[x, y]: [f64; 2]| {
            Complex::new((-(x - 1.0).powi(2) - y * y).exp(), (-(x * x) - (y + 0.5).powi(2)).exp())
        });
        let m = |k2: f64| Complex::from_polar(1.0, -0.3 * k2);
        let mut fast = f.values().to_vec();
        apply_radial_multiplier(&g, &mut fast, m);
        let mut hat = forward_fourier(&f).unwrap();
        for (z, &k2) in hat.values_mut().iter_mut().zip(g.xi_sq()) {
            *z *= m(k2);
        }
        let slow = inverse_fourier(&hat).unwrap();
        for (a, b) in fast.iter().zip(slow.values()) {
            assert!((a - b).norm() < 1e-13);
        }
    }
}
