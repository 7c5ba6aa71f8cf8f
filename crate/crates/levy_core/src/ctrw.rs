//! Discrete continuous-time random walks and their scaling.
//!
//! With scale `c`, waits are divided by `c^{1/alpha}` (by `c` for fixed waits) and
//! jumps by `c^{gamma}` with `gamma = JumpLaw::scale_exponent`, so that
//! `X^c_t -> A_{E_t}` as `c -> inf`.

use crate::error::{LevyError, Result};
use crate::spec::JumpLaw;
use rand::Rng;
use statrs::function::gamma::gamma;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WaitingLaw {
    /// `P(W > w) = (w / scale)^{-alpha}` for `w >= scale`.
    Pareto { alpha: f64, scale: f64 },
    Fixed { value: f64 },
}

impl WaitingLaw {
    /// Pareto waits in the normal domain of attraction of the standard
    /// stable subordinator: tail `w^{-alpha} / Gamma(1 - alpha)`.
    pub fn standard_pareto(alpha: f64) -> Self {
        WaitingLaw::Pareto {
            alpha,
            scale: gamma(1.0 - alpha).powf(-1.0 / alpha),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            WaitingLaw::Pareto { alpha, scale } if alpha > 0.0 && alpha < 1.0 && scale > 0.0 => {
                Ok(())
            }
            WaitingLaw::Fixed { value } if value > 0.0 && value.is_finite() => Ok(()),
            _ => Err(LevyError::InvalidSpec(format!("bad waiting law {self:?}"))),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            WaitingLaw::Pareto { alpha, scale } => {
                let u: f64 = 1.0 - rng.random::<f64>();
                let inv = 1.0 / alpha;
                if inv.fract() == 0.0 && inv <= 8.0 {
                    scale / u.powi(inv as i32)
                } else {
                    scale * u.powf(-inv)
                }
            }
            WaitingLaw::Fixed { value } => value,
        }
    }

    /// Exponent `delta` such that waits are rescaled by `c^{-delta}`.
    pub fn scale_exponent(&self) -> f64 {
        match *self {
            WaitingLaw::Pareto { alpha, .. } => 1.0 / alpha,
            WaitingLaw::Fixed { .. } => 1.0,
        }
    }
}

/// One draw of the rescaled CTRW position `X^c_t = c^{-gamma} sum_{k <= N_t} J_k`,
/// where `N_t` counts completed rescaled waits up to `t`.
pub fn sample_ctrw<R: Rng + ?Sized>(
    c: f64,
    jumps: &JumpLaw,
    waits: &WaitingLaw,
    t: f64,
    rng: &mut R,
) -> Result<f64> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(LevyError::Argument(format!("scale c must be > 0, got {c}")));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(LevyError::Argument(format!("t must be >= 0, got {t}")));
    }
    jumps.validate()?;
    waits.validate()?;
    // Compare unscaled waits against the unscaled horizon.
    let horizon = t * c.powf(waits.scale_exponent());
    let mut clock = 0.0;
    let mut n = 0u64;
    loop {
        clock += waits.sample(rng);
        if clock > horizon {
            break;
        }
        n += 1;
    }
    Ok(jumps.sample_sum(n, rng) * c.powf(-jumps.scale_exponent()))
}
