//! Distribution function of the outer process at a fixed operational time.

use crate::error::{Result, SemiMarkovError};
use levy_core::quad::gl16;
use levy_core::{JumpLaw, OuterSpec};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-z / std::f64::consts::SQRT_2)
}

/// `P(A_u <= x)`, right-continuous.
pub fn outer_cdf(outer: &OuterSpec, u: f64, x: f64) -> Result<f64> {
    if !(u >= 0.0) {
        return Err(SemiMarkovError::Domain(format!("operational time must be >= 0, got {u}")));
    }
    if x == f64::INFINITY {
        return Ok(1.0);
    }
    if x == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    if u == 0.0 {
        return Ok(if x >= 0.0 { 1.0 } else { 0.0 });
    }
    Ok(match *outer {
        OuterSpec::Brownian { drift, diffusivity } => {
            let m = drift * u;
            let sd = (diffusivity * u).sqrt();
            if sd == 0.0 {
                if x >= m { 1.0 } else { 0.0 }
            } else {
                std_normal_cdf((x - m) / sd)
            }
        }
        OuterSpec::StableSymmetric { index, scale } => {
            symmetric_stable_cdf(index, x / (scale * u.powf(1.0 / index)))
        }
        OuterSpec::CompoundPoisson { rate, jumps } => poisson_mixture_cdf(rate * u, &jumps, x),
    })
}

/// CDF of the standard symmetric stable law with characteristic function `exp(-|k|^beta)`.
pub fn symmetric_stable_cdf(beta: f64, x: f64) -> f64 {
    if beta == 2.0 {
        return std_normal_cdf(x / std::f64::consts::SQRT_2);
    }
    if beta == 1.0 {
        return 0.5 + x.atan() / PI;
    }
    if x == 0.0 {
        return 0.5;
    }
    let ax = x.abs();
    // large-|x| tail: P(S > x) ~ Gamma(beta) sin(pi beta / 2) / (pi x^beta)
    if ax > 1e4 {
        let tail = gamma(beta) * (PI * beta / 2.0).sin() / PI * ax.powf(-beta);
        return if x > 0.0 { 1.0 - tail } else { tail };
    }
    // Gil-Pelaez: F(x) = 1/2 + pi^{-1} int_0^inf sin(k x) exp(-k^beta) / k dk
    let k_max = 40f64.powf(1.0 / beta);
    let panels = ((ax * k_max / PI).ceil() as usize * 2).max(64);
    let h = k_max / panels as f64;
    let rule = gl16();
    let mut acc = 0.0;
    for p in 0..panels {
        let lo = p as f64 * h;
        acc += rule.integrate(lo, lo + h, |k| (k * ax).sin() * (-k.powf(beta)).exp() / k);
    }
    let half = acc / PI;
    if x > 0.0 { 0.5 + half } else { 0.5 - half }
}

fn poisson_mixture_cdf(mean: f64, jumps: &JumpLaw, x: f64) -> f64 {
    let mut p = (-mean).exp();
    let mut acc = 0.0;
    let mut seen = 0.0;
    let mut n = 0u64;
    loop {
        let cdf_n = if n == 0 {
            if x >= 0.0 { 1.0 } else { 0.0 }
        } else {
            match *jumps {
                JumpLaw::Normal { mean: m, sd } => {
                    let nf = n as f64;
                    if sd == 0.0 {
                        if x >= nf * m { 1.0 } else { 0.0 }
                    } else {
                        Normal::new(nf * m, sd * nf.sqrt()).map(|d| d.cdf(x)).unwrap_or(0.0)
                    }
                }
                JumpLaw::Fixed { size } => {
                    if x >= n as f64 * size { 1.0 } else { 0.0 }
                }
            }
        };
        acc += p * cdf_n;
        seen += p;
        n += 1;
        if 1.0 - seen < 1e-15 && n as f64 > mean {
            break;
        }
        p *= mean / n as f64;
        if n > 100_000 {
            break;
        }
    }
    acc
}

/// `P(A_u in (a, b])`.
pub fn outer_mass(outer: &OuterSpec, u: f64, a: f64, b: f64) -> Result<f64> {
    Ok((outer_cdf(outer, u, b)? - outer_cdf(outer, u, a)?).max(0.0))
}
