use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::{forward_fourier, ComplexField, Space};

/// Dyadic block norms of a field in its own variable: index 0 is the unit
/// ball `|z| < 1`, index `j + 1` the shell `2^j <= |z| < 2^{j+1}`.
pub fn dyadic_block_norms<T: Real>(field: &ComplexField<T>) -> Vec<T> {
    let grid = field.grid();
    let mut blocks: Vec<T> = Vec::new();
    for (idx, z) in field.values().iter().enumerate() {
        let c = match field.space() {
            Space::Physical => grid.position(idx),
            Space::Frequency => grid.frequency(idx),
        };
        let r = (c[0] * c[0] + c[1] * c[1]).sqrt();
        let b = if r < T::one() {
            0
        } else {
            // floor(log2 r) is exact for powers of two through the exponent.
            let j = r.log2().floor().to_f64_lossy() as usize;
            // Guard rounding right below a power of two.
            let lo = T::lit(2.0).powi(j as i32);
            if r < lo {
                j
            } else if r >= lo + lo {
                j + 2
            } else {
                j + 1
            }
        };
        if blocks.len() <= b {
            blocks.resize(b + 1, T::zero());
        }
        blocks[b] += z.norm_sqr();
    }
    let cell = field.cell_volume();
    blocks.into_iter().map(|m| (m * cell).sqrt()).collect()
}

/// `sup_j 2^{s j} ||1_{2^j <= |z| < 2^{j+1}} g||` together with the unit-ball
/// block at weight one, `z` being the variable of the field's own space.
pub fn besov_weak_norm<T: Real>(field: &ComplexField<T>, s_index: T) -> T {
    let two = T::lit(2.0);
    dyadic_block_norms(field)
        .into_iter()
        .enumerate()
        .map(|(b, m)| if b == 0 { m } else { two.powf(s_index * T::from_usize_lossy(b - 1)) * m })
        .fold(T::zero(), T::max)
}

/// `(∇(f - g) | ∇φ) = ∫ |ξ|^2 F(f - g) conj(Fφ) dξ` for physical fields.
pub fn weak_h1_pairing<T: Real>(
    f: &ComplexField<T>,
    g: &ComplexField<T>,
    test: &ComplexField<T>,
) -> Result<Complex<T>> {
    for h in [f, g, test] {
        h.expect_space(Space::Physical)?;
    }
    if !f.grid().same_as(test.grid()) {
        return Err(Error::GridMismatch);
    }
    let d = forward_fourier(&f.sub(g)?)?;
    let p = forward_fourier(test)?;
    let grid = d.grid().clone();
    let sum = d
        .values()
        .iter()
        .zip(p.values())
        .zip(grid.xi_sq())
        .fold(Complex::new(T::zero(), T::zero()), |acc, ((a, b), &k2)| {
            acc + a * b.conj() * k2
        });
    Ok(sum * d.cell_volume())
}
