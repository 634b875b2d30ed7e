//! Free propagator `U(t) = e^{i t Δ/2}`, modulation `M(t) = e^{i|x|^2/(2t)}`,
//! dilation `D(t) f(x) = (it)^{-n/2} f(x/t)`, the Galilean vector field
//! `J(t) = x + i t ∇`, and the frequency-space profile
//! `W(t) = F M(t) U(-t) u(t)`.
//!
//! Everything except the dilation acts on fixed lattices. Dilations evaluate
//! the band-limited interpolant at rescaled points; they are meant for
//! identity checks and frame changes, not for time stepping.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::{
    apply_radial_multiplier, evaluate_on_tensor, forward_fourier, frequency_weighted_l2_sqr,
    half_range, inverse_fourier, ComplexField, Grid, Space,
};

/// Names one of the operators together with its time parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorTag<T: Real> {
    FreePropagator(T),
    Modulation(T),
    Dilation(T),
    JField(T),
    Profile(T),
}

impl<T: Real> OperatorTag<T> {
    pub fn time(&self) -> T {
        match *self {
            Self::FreePropagator(t)
            | Self::Modulation(t)
            | Self::Dilation(t)
            | Self::JField(t)
            | Self::Profile(t) => t,
        }
    }

    /// Rejects `t = 0` for the operators that are singular there.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Modulation(t) | Self::Dilation(t) | Self::Profile(t) if *t == T::zero() => {
                Err(Error::SingularTime)
            }
            _ if !self.time().is_finite() => Err(Error::NonFinite("operator time")),
            _ => Ok(()),
        }
    }
}

/// Relative mass below which a field counts as vanishing outside a box.
///
/// Interpolation errors scale like the square root of this, so the default
/// keeps them near `1e-9` in double precision.
pub fn support_tolerance<T: Real>() -> T {
    T::lit(1e-18).max(T::lit(100.0) * T::epsilon() * T::epsilon())
}

/// `(i t)^a` on the principal branch.
pub fn principal_power<T: Real>(t: T, a: T) -> Complex<T> {
    let arg = a * t.signum() * T::FRAC_PI_2();
    Complex::from_polar(t.abs().powf(a), arg)
}

fn half_dim<T: Real>(grid: &Grid<T>) -> T {
    T::from_usize_lossy(grid.dim()) / T::lit(2.0)
}

/// `U(t)` applied in place to physical samples.
pub(crate) fn free_propagate_in_place<T: Real>(grid: &Grid<T>, buf: &mut [Complex<T>], t: T) {
    if t == T::zero() {
        return;
    }
    let h = t / T::lit(2.0);
    apply_radial_multiplier(grid, buf, |k2| Complex::from_polar(T::one(), -h * k2));
}

/// Free Schrödinger evolution over time `t` (any sign).
pub fn free_propagate<T: Real>(field: &ComplexField<T>, t: T) -> Result<ComplexField<T>> {
    field.expect_space(Space::Physical)?;
    OperatorTag::FreePropagator(t).validate()?;
    let mut out = field.clone();
    free_propagate_in_place(field.grid(), out.values_mut(), t);
    Ok(out)
}

pub(crate) fn modulate_in_place<T: Real>(grid: &Grid<T>, buf: &mut [Complex<T>], t: T) {
    let c = (t + t).recip();
    for (z, &x2) in buf.iter_mut().zip(grid.x_sq()) {
        *z = *z * Complex::from_polar(T::one(), x2 * c);
    }
}

/// Multiplication by `e^{i|x|^2/(2t)}`.
pub fn modulate<T: Real>(field: &ComplexField<T>, t: T) -> Result<ComplexField<T>> {
    field.expect_space(Space::Physical)?;
    OperatorTag::Modulation(t).validate()?;
    let mut out = field.clone();
    modulate_in_place(field.grid(), out.values_mut(), t);
    Ok(out)
}

/// Fraction of `int |g|^2` carried by lattice points with some coordinate
/// beyond `bound` in absolute value.
fn mass_fraction_beyond<T: Real>(g: &ComplexField<T>, bound: T) -> T {
    let grid = g.grid();
    let mut total = T::zero();
    let mut outside = T::zero();
    for (idx, z) in g.values().iter().enumerate() {
        let p = match g.space() {
            Space::Physical => grid.position(idx),
            Space::Frequency => grid.frequency(idx),
        };
        let m = z.norm_sqr();
        total += m;
        if p[0].abs() > bound || p[1].abs() > bound {
            outside += m;
        }
    }
    if total == T::zero() {
        T::zero()
    } else {
        outside / total
    }
}

/// Samples `y -> g(s y)` on the lattice of `out`, where `g` is the
/// band-limited interpolant of `field` in its own variable.
///
/// Fails with [`Error::SupportOverflow`] when `g` has non-negligible mass
/// outside the rescaled output box, or when its conjugate-variable content
/// would be compressed beyond what the output lattice resolves.
pub fn rescale<T: Real>(field: &ComplexField<T>, s: T, out: Space) -> Result<ComplexField<T>> {
    if s == T::zero() || !s.is_finite() {
        return Err(Error::InvalidArgument(format!("rescaling factor {s}")));
    }
    let grid = field.grid();
    if s == T::one() && out == field.space() {
        return Ok(field.clone());
    }
    let tol = support_tolerance::<T>();

    let covered = s.abs() * half_range(grid, out);
    let spill = mass_fraction_beyond(field, covered);
    if spill > tol {
        return Err(Error::SupportOverflow(format!(
            "relative mass {spill:e} beyond |y| = {covered} (factor {s})"
        )));
    }

    let dual_space = match out {
        Space::Physical => Space::Frequency,
        Space::Frequency => Space::Physical,
    };
    let resolvable = half_range(grid, dual_space) / s.abs();
    let input_dual_range = match field.space() {
        Space::Physical => grid.xi_max(),
        Space::Frequency => grid.half_width(),
    };
    if resolvable < input_dual_range {
        let dual = match field.space() {
            Space::Physical => forward_fourier(field)?,
            Space::Frequency => inverse_fourier(field)?,
        };
        let spill = mass_fraction_beyond(&dual, resolvable);
        if spill > tol {
            return Err(Error::SupportOverflow(format!(
                "relative conjugate mass {spill:e} beyond {resolvable} (factor {s})"
            )));
        }
    }

    let axis = match out {
        Space::Physical => grid.x_axis(),
        Space::Frequency => grid.xi_axis(),
    };
    let targets: Vec<T> = axis.iter().map(|&z| z * s).collect();
    let values = evaluate_on_tensor(field, &targets)?;
    let result = ComplexField::from_values(grid, values, out)?;
    result.check_finite("rescale")?;
    Ok(result)
}

/// `D(t) g (y) = (it)^{-n/2} g(y/t)`, sampled on the lattice of `out`.
pub fn dilate<T: Real>(field: &ComplexField<T>, t: T, out: Space) -> Result<ComplexField<T>> {
    OperatorTag::Dilation(t).validate()?;
    let r = rescale(field, t.recip(), out)?;
    Ok(r.scaled(principal_power(t, -half_dim(field.grid()))))
}

/// `D(t)^{-1} g (y) = (it)^{n/2} g(t y)`, sampled on the lattice of `out`.
pub fn dilate_inverse<T: Real>(
    field: &ComplexField<T>,
    t: T,
    out: Space,
) -> Result<ComplexField<T>> {
    OperatorTag::Dilation(t).validate()?;
    let r = rescale(field, t, out)?;
    Ok(r.scaled(principal_power(t, half_dim(field.grid()))))
}

/// `|| U(t) f - M(t) D(t) F M(t) f || / || f ||`; zero for the zero field.
pub fn dollard_residual<T: Real>(field: &ComplexField<T>, t: T) -> Result<T> {
    field.expect_space(Space::Physical)?;
    OperatorTag::Dilation(t).validate()?;
    let norm = field.l2();
    if norm == T::zero() {
        return Ok(T::zero());
    }
    let lhs = free_propagate(field, t)?;
    let g = forward_fourier(&modulate(field, t)?)?;
    let rhs = modulate(&dilate(&g, t, Space::Physical)?, t)?;
    Ok(lhs.sub(&rhs)?.l2() / norm)
}

/// Spectral derivative along `axis` of a centred spectrum, returned in
/// physical space: `F^{-1}(i xi_axis g)`.
fn spectral_partial<T: Real>(hat: &ComplexField<T>, axis: usize) -> Result<ComplexField<T>> {
    let grid = hat.grid();
    let mut d = hat.clone();
    for (idx, z) in d.values_mut().iter_mut().enumerate() {
        let xi = grid.frequency(idx)[axis];
        *z = Complex::new(-z.im * xi, z.re * xi);
    }
    inverse_fourier(&d)
}

/// `J(t) f = M(t) (i t ∇) M(-t) f`, one component per axis. At `t = 0` this
/// is multiplication by `x`.
pub fn apply_j<T: Real>(field: &ComplexField<T>, t: T) -> Result<Vec<ComplexField<T>>> {
    field.expect_space(Space::Physical)?;
    if t == T::zero() {
        return position_times(field);
    }
    let grid = field.grid();
    let hat = forward_fourier(&modulate(field, -t)?)?;
    let it = Complex::new(T::zero(), t);
    (0..grid.dim())
        .map(|axis| {
            let mut c = spectral_partial(&hat, axis)?.scaled(it);
            modulate_in_place(grid, c.values_mut(), t);
            Ok(c)
        })
        .collect()
}

fn position_times<T: Real>(field: &ComplexField<T>) -> Result<Vec<ComplexField<T>>> {
    let grid = field.grid();
    Ok((0..grid.dim())
        .map(|axis| {
            let mut c = field.clone();
            for (idx, z) in c.values_mut().iter_mut().enumerate() {
                *z = *z * grid.position(idx)[axis];
            }
            c
        })
        .collect())
}

/// `J(t) f = x f + i t ∇ f` evaluated term by term (reference route).
pub fn apply_j_direct<T: Real>(field: &ComplexField<T>, t: T) -> Result<Vec<ComplexField<T>>> {
    field.expect_space(Space::Physical)?;
    let hat = forward_fourier(field)?;
    let xf = position_times(field)?;
    let it = Complex::new(T::zero(), t);
    xf.into_iter()
        .enumerate()
        .map(|(axis, mut c)| {
            let d = spectral_partial(&hat, axis)?;
            for (a, b) in c.values_mut().iter_mut().zip(d.values()) {
                *a = *a + it * b;
            }
            Ok(c)
        })
        .collect()
}

/// `|| J(t) f ||_{L^2} = |t| || |xi| F M(-t) f ||`, one transform.
pub fn j_norm<T: Real>(field: &ComplexField<T>, t: T) -> Result<T> {
    field.expect_space(Space::Physical)?;
    if t == T::zero() {
        let s = field
            .values()
            .iter()
            .zip(field.grid().x_sq())
            .map(|(z, &x2)| x2 * z.norm_sqr())
            .sum::<T>()
            * field.cell_volume();
        return Ok(s.sqrt());
    }
    let hat = forward_fourier(&modulate(field, -t)?)?;
    Ok(t.abs() * frequency_weighted_l2_sqr(&hat, |k2| k2).sqrt())
}

/// `W(t) = F M(t) U(-t) u(t)` on the fixed frequency lattice. Requires
/// `t >= 1`.
pub fn profile_w<T: Real>(u: &ComplexField<T>, t: T) -> Result<ComplexField<T>> {
    if !(t >= T::one()) {
        return Err(Error::InvalidArgument(format!(
            "profile requested at t = {t}; diagnostics start at t = 1"
        )));
    }
    u.expect_space(Space::Physical)?;
    let mut buf = u.clone();
    free_propagate_in_place(u.grid(), buf.values_mut(), -t);
    modulate_in_place(u.grid(), buf.values_mut(), t);
    let w = forward_fourier(&buf)?;
    w.check_finite("profile_w")?;
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;
    use std::f64::consts::PI;

    fn gaussian(g: &Grid<f64>) -> ComplexField<f64> {
        ComplexField::from_fn(g, |[x, y]| Complex::new((-(x * x + y * y) / 2.0).exp(), 0.0))
    }

    fn rel(a: &ComplexField<f64>, b: &ComplexField<f64>) -> f64 {
        a.sub(b).unwrap().l2() / b.l2()
    }

    /// Closed-form free evolution of `e^{-x^2/2}` in 1D.
    fn free_gaussian(g: &Grid<f64>, t: f64) -> ComplexField<f64> {
        let a = Complex::new(1.0, t);
        ComplexField::from_fn(g, |[x, _]| a.powf(-0.5) * (-(x * x) / (a * 2.0)).exp())
    }

    #[test]
    fn free_gaussian_closed_form() {
        let g = make_grid(1, 1024, 20.0).unwrap();
        let u0 = gaussian(&g);
        for &t in &[0.5, 1.0, 2.0] {
            let u = free_propagate(&u0, t).unwrap();
            assert!(rel(&u, &free_gaussian(&g, t)) < 1e-8, "t={t}");
        }
        let u1 = free_propagate(&u0, 1.0).unwrap();
        assert!((u1.values()[512].norm() - 2f64.powf(-0.25)).abs() < 1e-8 * 0.8409);
    }

    #[test]
    fn free_kernel_quadrature_oracle() {
        // Direct quadrature of the kernel (2 pi i t)^{-1/2} e^{i (x-y)^2/(2t)}
        // at a handful of points.
        let g = make_grid(1, 1024, 20.0).unwrap();
        let u0 = gaussian(&g);
        let t = 1.0;
        let u = free_propagate(&u0, t).unwrap();
        let pref = Complex::new(0.0, 2.0 * PI * t).powf(-0.5);
        for j in [400usize, 480, 512, 530, 600] {
            let x = g.x_axis()[j];
            let s: Complex<f64> = g
                .x_axis()
                .iter()
                .map(|&y| Complex::from_polar(1.0, (x - y).powi(2) / (2.0 * t)) * (-y * y / 2.0).exp())
                .sum();
            let direct = pref * s * g.dx();
            assert!((direct - u.values()[j]).norm() < 1e-8);
        }
    }

    #[test]
    fn identity_and_group_law() {
        let g = make_grid(1, 512, 30.0).unwrap();
        let u0 = gaussian(&g);
        assert_eq!(free_propagate(&u0, 0.0).unwrap(), u0);
        let back = free_propagate(&free_propagate(&u0, 1.7).unwrap(), -1.7).unwrap();
        assert!(rel(&back, &u0) < 1e-12);
    }

    #[test]
    fn modulation_is_unimodular_and_singular_at_zero() {
        let g = make_grid(1, 256, 10.0).unwrap();
        let f = gaussian(&g);
        let m = modulate(&f, 0.7).unwrap();
        for (a, b) in m.values().iter().zip(f.values()) {
            assert!((a.norm() - b.norm()).abs() < 1e-15);
        }
        assert!(rel(&modulate(&m, -0.7).unwrap(), &f) < 1e-15);
        assert_eq!(modulate(&f, 0.0), Err(Error::SingularTime));
        assert_eq!(dilate(&f, 0.0, Space::Physical), Err(Error::SingularTime));
    }

    #[test]
    fn unit_dilation_is_a_phase() {
        let g = make_grid(2, 32, 6.0).unwrap();
        let f = gaussian(&g);
        let d = dilate(&f, 1.0, Space::Physical).unwrap();
        let expected = f.scaled(Complex::new(0.0, 1.0).powf(-1.0));
        assert!(rel(&d, &expected) < 1e-15);
    }

    #[test]
    fn dilation_round_trip_and_norm() {
        let g = make_grid(1, 1024, 20.0).unwrap();
        let f = gaussian(&g).map(|z| z * Complex::new(1.0, 0.2));
        let d = dilate(&f, 2.0, Space::Physical).unwrap();
        assert!((d.l2() - f.l2()).abs() < 1e-8 * f.l2());
        // Change of variables: ||D(2) f||^2 = int e^{-x^2/4}/2 |1+0.2i|^2 = sqrt(pi) 1.04.
        assert!((d.norm_sqr() - PI.sqrt() * 1.04).abs() < 1e-8);
        let back = dilate_inverse(&d, 2.0, Space::Physical).unwrap();
        assert!(rel(&back, &f) < 1e-8);
        let shrink = dilate(&f, 0.5, Space::Physical).unwrap();
        assert!(rel(&dilate_inverse(&shrink, 0.5, Space::Physical).unwrap(), &f) < 1e-8);
    }

    #[test]
    fn dilation_overflow_detected() {
        let g = make_grid(1, 256, 10.0).unwrap();
        let wide = ComplexField::from_fn(&g, |[x, _]: [f64; 2]| Complex::new((-(x * x) / 20.0).exp(), 0.0));
        assert!(matches!(
            dilate(&wide, 4.0, Space::Physical),
            Err(Error::SupportOverflow(_))
        ));
    }

    #[test]
    fn dollard_suite() {
        let g = make_grid(1, 1024, 64.0).unwrap();
        let f = gaussian(&g);
        for &t in &[1.0, 2.0, 4.0, 8.0] {
            let r = dollard_residual(&f, t).unwrap();
            assert!(r < 1e-6, "t={t}: {r:e}");
        }
        assert_eq!(dollard_residual(&ComplexField::zeros(&g, Space::Physical), 2.0).unwrap(), 0.0);
    }

    #[test]
    fn dollard_in_2d() {
        let g = make_grid(2, 128, 16.0).unwrap();
        let f = gaussian(&g);
        assert!(dollard_residual(&f, 2.0).unwrap() < 1e-6);
    }

    #[test]
    fn j_factorizations_agree() {
        let g = make_grid(1, 1024, 20.0).unwrap();
        let f = gaussian(&g).map(|z| z * Complex::new(1.0, -0.5));
        let a = apply_j(&f, 1.0).unwrap();
        let b = apply_j_direct(&f, 1.0).unwrap();
        assert!(rel(&a[0], &b[0]) < 1e-8);
        assert!((j_norm(&f, 1.0).unwrap() - b[0].l2()).abs() < 1e-8 * b[0].l2());
        let x = apply_j(&f, 0.0).unwrap();
        assert!(rel(&x[0], &apply_j_direct(&f, 0.0).unwrap()[0]) < 1e-15);
        assert!((j_norm(&f, 0.0).unwrap() - x[0].l2()).abs() < 1e-14);
        let z = ComplexField::zeros(&g, Space::Physical);
        assert!(apply_j(&z, 1.0).unwrap()[0].is_zero());
    }

    #[test]
    fn j_conjugates_position() {
        // J(t) U(t) f = U(t) (x f).
        let g = make_grid(1, 1024, 40.0).unwrap();
        let f = gaussian(&g);
        for &t in &[0.5, 1.0, 3.0] {
            let lhs = apply_j(&free_propagate(&f, t).unwrap(), t).unwrap();
            let xf = apply_j(&f, 0.0).unwrap();
            let rhs = free_propagate(&xf[0], t).unwrap();
            assert!(lhs[0].sub(&rhs).unwrap().l2() < 1e-8 * xf[0].l2());
        }
    }

    #[test]
    fn profile_preserves_norm_and_scales_sup() {
        let g = make_grid(1, 2048, 64.0).unwrap();
        let u0 = gaussian(&g);
        for &t in &[1.0, 2.0, 4.0] {
            let u = free_propagate(&u0, t).unwrap();
            let w = profile_w(&u, t).unwrap();
            assert!((w.l2() - u.l2()).abs() < 1e-10 * u.l2());
            // |u(t, t y)| = t^{-1/2} |W(t)(y)|, checked against dilation.
            let oracle = dilate_inverse(&modulate(&u, -t).unwrap(), t, Space::Frequency).unwrap();
            assert!(rel(&w, &oracle) < 1e-8, "t={t}");
            assert!((w.max_abs() - t.sqrt() * u.max_abs()).abs() < 1e-8);
        }
        assert!(profile_w(&u0, 0.5).is_err());
        assert!(profile_w(&ComplexField::zeros(&g, Space::Physical), 2.0).unwrap().is_zero());
    }
}
