//! Initial data families. None is prescribed by the theory beyond membership
//! in the weighted Sobolev space; these are chosen test families.

use modscat_core::spectral::{inverse_fourier, weighted_sobolev_norm, ComplexField, Space};
use modscat_core::Grid64;
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::config::InitialSpec;
use crate::error::RunError;

pub type Field = ComplexField<f64>;

/// Builds the initial datum on a physical grid.
pub fn initial_data(spec: &InitialSpec, grid: &Grid64) -> Result<Field, RunError> {
    match *spec {
        InitialSpec::Gaussian { amplitude, width, center, momentum } => {
            let w2 = width * width;
            Ok(ComplexField::from_fn(grid, |[x, y]| {
                let (dx, dy) = (x - center[0], y - center[1]);
                let (dx2, dy2) = if grid.dim() == 1 { (dx * dx, 0.0) } else { (dx * dx, dy * dy) };
                let phase = momentum[0] * x + if grid.dim() == 1 { 0.0 } else { momentum[1] * y };
                Complex::from_polar(amplitude * (-(dx2 + dy2) / (2.0 * w2)).exp(), phase)
            }))
        }
        InitialSpec::RadialGaussian2d { amplitude, width } => {
            if grid.dim() != 2 {
                return Err(RunError::Config("radial_gaussian_2d needs a 2D grid".into()));
            }
            let w2 = width * width;
            Ok(ComplexField::from_fn(grid, |[x, y]| {
                Complex::new(amplitude * (-(x * x + y * y) / (2.0 * w2)).exp(), 0.0)
            }))
        }
        InitialSpec::RandomH11 { seed, amplitude, correlation_length, envelope_width } => {
            random_h11(grid, seed, amplitude, correlation_length, envelope_width)
        }
    }
}

/// Band-limited complex Gaussian noise (spectral density
/// `exp(-|ξ|^2 ℓ^2 / 2)`) under a Gaussian envelope, scaled to peak modulus
/// `amplitude`.
fn random_h11(
    grid: &Grid64,
    seed: u64,
    amplitude: f64,
    correlation_length: f64,
    envelope_width: f64,
) -> Result<Field, RunError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l2 = correlation_length * correlation_length;
    let values: Vec<Complex<f64>> = grid
        .xi_sq()
        .iter()
        .map(|&k2| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex::new(re, im) * (-k2 * l2 / 4.0).exp()
        })
        .collect();
    let hat = ComplexField::from_values(grid, values, Space::Frequency)?;
    let mut u = inverse_fourier(&hat)?;
    let w2 = envelope_width * envelope_width;
    for (z, &r2) in u.values_mut().iter_mut().zip(grid.x_sq()) {
        *z *= (-r2 / (2.0 * w2)).exp();
    }
    let peak = u.max_abs();
    if peak == 0.0 || amplitude == 0.0 {
        return Ok(ComplexField::zeros(grid, Space::Physical));
    }
    Ok(u.scaled(Complex::new(amplitude / peak, 0.0)))
}

/// `||u||_{H^{1,1}}`-type size: `||<ξ> F u|| + ||<x> u||`.
pub fn h11_norm(field: &Field) -> Result<f64, RunError> {
    Ok(weighted_sobolev_norm(field, 1.0, 1.0)?)
}
