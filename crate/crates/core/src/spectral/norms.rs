use super::field::{ComplexField, Space};
use super::fourier::forward_fourier;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Quadrature norms of a physical-space field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormReport<T: Real> {
    pub l2: T,
    pub l_inf: T,
    /// Exponent used for `lp`.
    pub p: T,
    pub lp: T,
    /// `|| grad f ||_{L^2}`, computed with the multiplier `|xi|`.
    pub grad_l2: T,
    /// Weight exponent used for `weighted`.
    pub sigma: T,
    /// `|| <x>^sigma f ||_{L^2}`.
    pub weighted: T,
}

impl<T: Real> NormReport<T> {
    /// Evaluates every norm. `p` is the Lebesgue exponent (`>= 1`) and
    /// `sigma >= 0` the spatial weight exponent.
    pub fn compute(field: &ComplexField<T>, p: T, sigma: T) -> Result<Self> {
        field.expect_space(Space::Physical)?;
        field.check_finite("norms")?;
        Ok(Self {
            l2: field.l2(),
            l_inf: field.max_abs(),
            p,
            lp: lp_norm(field, p)?,
            grad_l2: grad_l2(field)?,
            sigma,
            weighted: spatial_weighted_l2(field, sigma)?,
        })
    }
}

/// Shorthand for [`NormReport::compute`] with the energy exponent
/// `p = 2 + 2/dim` and unit weight.
pub fn norms<T: Real>(field: &ComplexField<T>) -> Result<NormReport<T>> {
    let p = T::lit(2.0) + T::lit(2.0) / T::from_usize_lossy(field.grid().dim());
    NormReport::compute(field, p, T::one())
}

/// `( int |f|^p )^{1/p}` by Riemann sum; `p = inf` gives the maximum modulus.
pub fn lp_norm<T: Real>(field: &ComplexField<T>, p: T) -> Result<T> {
    if !(p >= T::one()) {
        return Err(Error::InvalidArgument(format!("Lebesgue exponent {p} < 1")));
    }
    if p.is_infinite() {
        return Ok(field.max_abs());
    }
    Ok(lp_power(field, p).powf(p.recip()))
}

/// `int |f|^p` without the final root.
pub fn lp_power<T: Real>(field: &ComplexField<T>, p: T) -> T {
    let h = p / T::lit(2.0);
    field
        .values()
        .iter()
        .map(|z| z.norm_sqr().powf(h))
        .sum::<T>()
        * field.cell_volume()
}

/// `|| grad f ||_{L^2} = || |xi| F f ||_{L^2}` for a physical field.
pub fn grad_l2<T: Real>(field: &ComplexField<T>) -> Result<T> {
    let hat = forward_fourier(field)?;
    Ok(frequency_weighted_l2_sqr(&hat, |k2| k2).sqrt())
}

/// `sum w(|xi|^2) |g|^2 dxi^dim` for a frequency-space field.
pub(crate) fn frequency_weighted_l2_sqr<T: Real>(hat: &ComplexField<T>, w: impl Fn(T) -> T) -> T {
    hat.values()
        .iter()
        .zip(hat.grid().xi_sq())
        .map(|(z, &k2)| w(k2) * z.norm_sqr())
        .sum::<T>()
        * hat.cell_volume()
}

/// `|| <x>^sigma f ||_{L^2}` with `<x> = (1 + |x|^2)^{1/2}`.
pub fn spatial_weighted_l2<T: Real>(field: &ComplexField<T>, sigma: T) -> Result<T> {
    field.expect_space(Space::Physical)?;
    let s = field
        .values()
        .iter()
        .zip(field.grid().x_sq())
        .map(|(z, &x2)| (T::one() + x2).powf(sigma) * z.norm_sqr())
        .sum::<T>()
        * field.cell_volume();
    Ok(s.sqrt())
}

/// Norm of the intersection space `H^s ∩ F(H^sigma)`, taken as the sum
/// `|| <xi>^s F f ||_{L^2} + || <x>^sigma f ||_{L^2}`.
///
/// At `s = sigma = 0` this is `2 || f ||_{L^2}`: the two halves are kept
/// separate rather than combined in quadrature.
pub fn weighted_sobolev_norm<T: Real>(field: &ComplexField<T>, s: T, sigma: T) -> Result<T> {
    if s < T::zero() || sigma < T::zero() {
        return Err(Error::InvalidArgument(format!(
            "weight exponents must be nonnegative, got s = {s}, sigma = {sigma}"
        )));
    }
    field.expect_space(Space::Physical)?;
    let hat = forward_fourier(field)?;
    let freq = frequency_weighted_l2_sqr(&hat, |k2| (T::one() + k2).powf(s)).sqrt();
    Ok(freq + spatial_weighted_l2(field, sigma)?)
}
