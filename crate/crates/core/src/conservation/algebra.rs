//! Saturated nonlinearity `f(z) = ((1+|z|^2)^{1/n} - 1) z`, its potential
//! `V` and the virial combination `W = (n+2) V - n z̄ f`.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `(1+r)^{a} - 1` without cancellation at small `r`.
#[inline]
fn pow1p_m1<T: Real>(r: T, a: T) -> T {
    (a * r.ln_1p()).exp_m1()
}

/// `(1+r)^a - 1 - a r`, by binomial series when `r` is small.
fn pow1p_m1_linear<T: Real>(r: T, a: T) -> T {
    if r > T::lit(0.05) {
        return pow1p_m1(r, a) - a * r;
    }
    let mut coeff = a;
    let mut power = r;
    let mut sum = T::zero();
    for k in 2..80 {
        let kf = T::from_usize_lossy(k);
        coeff = coeff * (a - kf + T::one()) / kf;
        power *= r;
        let term = coeff * power;
        sum += term;
        if term.abs() <= T::epsilon() * sum.abs() {
            break;
        }
    }
    sum
}

fn exponent<T: Real>(n: u32) -> T {
    T::from_usize_lossy(n as usize)
}

/// `f(z) = (<z>^{2/n} - 1) z`.
pub fn f_sat<T: Real>(z: Complex<T>, n: u32) -> Complex<T> {
    let n = exponent::<T>(n);
    z * pow1p_m1(z.norm_sqr(), n.recip())
}

/// `V(z) = n/(n+1) (<z>^{2(n+1)/n} - 1) - |z|^2`.
pub fn v_sat<T: Real>(z: Complex<T>, n: u32) -> T {
    let n = exponent::<T>(n);
    let a = (n + T::one()) / n;
    a.recip() * pow1p_m1_linear(z.norm_sqr(), a)
}

/// `W(z) = (n+2) V(z) - n z̄ f(z)` (real for every `z`).
pub fn w_sat<T: Real>(z: Complex<T>, n: u32) -> T {
    let nf = exponent::<T>(n);
    let two = T::lit(2.0);
    (nf + two) * v_sat(z, n) - nf * (z.conj() * f_sat(z, n)).re
}

/// Equivalent form `W(z) = V(z) + n((1+|z|^2)^{1/n} - 1) - |z|^2`.
pub fn w_sat_alt<T: Real>(z: Complex<T>, n: u32) -> T {
    let nf = exponent::<T>(n);
    v_sat(z, n) + nf * pow1p_m1_linear(z.norm_sqr(), nf.recip())
}

/// Outcome of one sampled inequality.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct InequalityReport {
    pub name: String,
    pub samples: u64,
    pub violations: u64,
    /// Smallest `(rhs - lhs) / max(1, |rhs|)` seen; a sample violates when
    /// this drops below minus the slack.
    pub worst_margin: f64,
    pub seed: u64,
    /// First violating sample `(re, im)`, if any.
    pub witness: Option<[f64; 2]>,
}

impl InequalityReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Slack on pointwise inequalities, absolute for values of order one and
/// relative beyond.
pub fn algebra_slack<T: Real>() -> T {
    T::lit(1e-12).max(T::epsilon() * T::lit(64.0))
}

const CHUNK: u64 = 4096;

#[derive(Clone)]
struct Tally {
    violations: u64,
    worst: f64,
    witness: Option<[f64; 2]>,
}

impl Tally {
    fn new() -> Self {
        Self { violations: 0, worst: f64::INFINITY, witness: None }
    }

    fn record(&mut self, lhs: f64, rhs: f64, slack: f64, z: [f64; 2]) {
        let margin = (rhs - lhs) / rhs.abs().max(1.0);
        self.worst = self.worst.min(margin);
        if margin < -slack || !margin.is_finite() {
            self.violations += 1;
            self.witness.get_or_insert(z);
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.violations += other.violations;
        self.worst = self.worst.min(other.worst);
        if self.witness.is_none() {
            self.witness = other.witness;
        }
        self
    }
}

const NAMES: [&str; 5] = ["f_growth", "v_nonnegative", "v_growth", "w_below_v", "w_forms_agree"];

fn check_point<T: Real>(z: Complex<T>, n: u32, tallies: &mut [Tally; 5]) {
    let slack = algebra_slack::<T>().to_f64_lossy();
    let nf = exponent::<T>(n);
    let m = z.norm();
    let zz = [z.re.to_f64_lossy(), z.im.to_f64_lossy()];
    let f = f_sat(z, n).norm();
    let v = v_sat(z, n);
    let w = w_sat(z, n);
    let w2 = w_sat_alt(z, n);
    let two = T::lit(2.0);
    let g = |x: T| x.to_f64_lossy();
    tallies[0].record(g(f), g(two * m.powf(T::one() + two / nf)), slack, zz);
    tallies[1].record(g(-v), 0.0, slack, zz);
    tallies[2].record(g(v), g(T::lit(3.0) * m.powf(two + two / nf)), slack, zz);
    tallies[3].record(g(w), g(v), slack, zz);
    // Agreement is relative to the size of the terms being combined.
    let scale = (v.abs() + z.norm_sqr()).max(T::one());
    tallies[4].record(g((w - w2).abs() / scale), 0.0, slack, zz);
}

/// Samples `z` with log-uniform modulus in `[1e-6, 1e6]` and uniform phase,
/// plus `z = 0`, and checks `|f| <= 2|z|^{1+2/n}`, `0 <= V <= 3|z|^{2+2/n}`,
/// `W <= V` and agreement of the two `W` forms. Chunks draw from independent
/// streams of one seeded generator, so results do not depend on the thread
/// count.
pub fn check_fvw_inequalities<T: Real>(n: u32, samples: u64, seed: u64) -> Result<Vec<InequalityReport>> {
    if n == 0 || samples == 0 {
        return Err(Error::InvalidArgument(format!(
            "need n >= 1 and at least one sample, got n = {n}, samples = {samples}"
        )));
    }
    let chunks = samples.div_ceil(CHUNK);
    let tallies = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let mut t: [Tally; 5] = std::array::from_fn(|_| Tally::new());
            let count = CHUNK.min(samples - c * CHUNK);
            if c == 0 {
                check_point(Complex::new(T::zero(), T::zero()), n, &mut t);
            }
            for _ in 0..count {
                let lm: f64 = rng.random_range(-6.0..=6.0);
                let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                let z = Complex::from_polar(T::lit(10f64.powf(lm)), T::lit(phase));
                check_point(z, n, &mut t);
            }
            t
        })
        .collect::<Vec<_>>()
        .into_iter()
        .reduce(|a, b| {
            let mut out = a;
            for (x, y) in out.iter_mut().zip(b) {
                *x = x.clone().merge(y);
            }
            out
        })
        .expect("at least one chunk");
    Ok(NAMES
        .iter()
        .zip(tallies)
        .map(|(name, t)| InequalityReport {
            name: (*name).to_string(),
            samples: samples + 1,
            violations: t.violations,
            worst_margin: t.worst,
            seed,
            witness: t.witness,
        })
        .collect())
}
