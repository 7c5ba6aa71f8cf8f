//! Exact-in-law increment samplers.

use crate::error::{LevyError, Result};
use crate::spec::{JumpLaw, OuterSpec, ProcessSpec, SubSpec};
use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal};
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

/// Positive stable variate with `E exp(-s S) = exp(-s^alpha)` (Chambers-Mallows-Stuck
/// in Kanter's form).
pub fn positive_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    if alpha == 0.5 {
        // Levy distribution: 1 / (2 Z^2).
        let z: f64 = StandardNormal.sample(rng);
        return (0.5 / (z * z)).min(f64::MAX);
    }
    let u: f64 = PI * rng.random::<f64>();
    let w: f64 = Exp1.sample(rng);
    let u = if u == 0.0 { f64::MIN_POSITIVE } else { u };
    let ln_s = (alpha * u).sin().ln() - u.sin().ln() / alpha
        + (1.0 - alpha) / alpha * (((1.0 - alpha) * u).sin().ln() - w.ln());
    ln_s.exp().max(f64::MIN_POSITIVE)
}

/// One draw of `D_t` for the standard stable subordinator.
pub fn sample_stable_subordinator<R: Rng + ?Sized>(alpha: f64, t: f64, rng: &mut R) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(LevyError::Domain(format!("alpha must be in (0,1), got {alpha}")));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(LevyError::Domain(format!("t must be > 0, got {t}")));
    }
    Ok(t.powf(1.0 / alpha) * positive_stable(alpha, rng))
}

/// Symmetric stable variate with `E exp(i k X) = exp(-|k|^beta)`.
pub fn symmetric_stable<R: Rng + ?Sized>(beta: f64, rng: &mut R) -> f64 {
    let v = PI * (rng.random::<f64>() - 0.5);
    if beta == 2.0 {
        let z: f64 = StandardNormal.sample(rng);
        return std::f64::consts::SQRT_2 * z;
    }
    if beta == 1.0 {
        return v.tan();
    }
    let w: f64 = Exp1.sample(rng);
    (beta * v).sin() / v.cos().powf(1.0 / beta)
        * (((1.0 - beta) * v).cos() / w).powf((1.0 - beta) / beta)
}

impl JumpLaw {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            JumpLaw::Normal { mean, sd } => {
                let z: f64 = StandardNormal.sample(rng);
                mean + sd * z
            }
            JumpLaw::Fixed { size } => size,
        }
    }

    /// Sum of `n` independent jumps, drawn exactly in law.
    pub fn sample_sum<R: Rng + ?Sized>(&self, n: u64, rng: &mut R) -> f64 {
        if n == 0 {
            return 0.0;
        }
        match *self {
            JumpLaw::Normal { mean, sd } => {
                let z: f64 = StandardNormal.sample(rng);
                n as f64 * mean + sd * (n as f64).sqrt() * z
            }
            JumpLaw::Fixed { size } => n as f64 * size,
        }
    }
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    match Poisson::new(mean) {
        Ok(p) => {
            let v: f64 = p.sample(rng);
            v as u64
        }
        Err(_) => 0,
    }
}

impl SubSpec {
    /// Increment `D_{u+du} - D_u`.
    pub fn increment<R: Rng + ?Sized>(&self, du: f64, rng: &mut R) -> f64 {
        match *self {
            SubSpec::StandardStable { alpha } => du.powf(1.0 / alpha) * positive_stable(alpha, rng),
            SubSpec::TruncatedStable { alpha, cutoff } => {
                let rate = cutoff.powf(-alpha) / gamma(1.0 - alpha);
                let n = poisson_count(rate * du, rng);
                (0..n)
                    .map(|_| {
                        let u: f64 = 1.0 - rng.random::<f64>();
                        cutoff * u.powf(-1.0 / alpha)
                    })
                    .sum()
            }
        }
    }
}

impl OuterSpec {
    /// Increment `A_{u+du} - A_u`.
    pub fn increment<R: Rng + ?Sized>(&self, du: f64, rng: &mut R) -> f64 {
        if du <= 0.0 {
            return 0.0;
        }
        match *self {
            OuterSpec::Brownian { drift, diffusivity } => {
                let z: f64 = StandardNormal.sample(rng);
                drift * du + (diffusivity * du).sqrt() * z
            }
            OuterSpec::StableSymmetric { index, scale } => {
                scale * du.powf(1.0 / index) * symmetric_stable(index, rng)
            }
            OuterSpec::CompoundPoisson { rate, jumps } => {
                let n = poisson_count(rate * du, rng);
                jumps.sample_sum(n, rng)
            }
        }
    }
}

impl ProcessSpec {
    /// Joint increment `(dA, dD)` over an operational cell of length `du`.
    pub fn increment<R: Rng + ?Sized>(&self, du: f64, rng: &mut R) -> (f64, f64) {
        let dd = self.subordinator.increment(du, rng);
        let da = self.outer.increment(du, rng) + self.coupling_scale() * dd;
        (da, dd)
    }
}
