//! Declarative process specifications and their Levy symbols.
//!
//! The outer process `A` has characteristic exponent `psi`, the subordinator `D`
//! has Laplace exponent `phi` (so `E exp(-s D_t) = exp(t phi(s))`), and the pair
//! `(A, D)` has joint exponent `xi(k, s)` with `E exp(i k A_t - s D_t) = exp(t xi)`.

use crate::error::{LevyError, Result};
use crate::quad;
use num_complex::Complex64;
use statrs::function::gamma::gamma;

/// Law of a single CTRW or compound Poisson jump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JumpLaw {
    Normal { mean: f64, sd: f64 },
    Fixed { size: f64 },
}

impl JumpLaw {
    /// `E exp(i k J)`.
    pub fn char_fn(&self, k: f64) -> Complex64 {
        match *self {
            JumpLaw::Normal { mean, sd } => {
                Complex64::from_polar((-0.5 * sd * sd * k * k).exp(), k * mean)
            }
            JumpLaw::Fixed { size } => Complex64::from_polar(1.0, k * size),
        }
    }

    /// Exponent `gamma` such that `c^{-gamma}` is the CTRW jump rescaling.
    pub fn scale_exponent(&self) -> f64 {
        match *self {
            JumpLaw::Normal { mean, .. } if mean == 0.0 => 0.5,
            _ => 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            JumpLaw::Normal { mean, sd } if mean.is_finite() && sd.is_finite() && sd >= 0.0 => {
                Ok(())
            }
            JumpLaw::Fixed { size } if size.is_finite() => Ok(()),
            _ => Err(LevyError::InvalidSpec(format!("bad jump law {self:?}"))),
        }
    }
}

/// Outer (spatial) Levy process `A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OuterSpec {
    Brownian { drift: f64, diffusivity: f64 },
    StableSymmetric { index: f64, scale: f64 },
    CompoundPoisson { rate: f64, jumps: JumpLaw },
}

/// Strictly increasing driftless subordinator `D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SubSpec {
    StandardStable { alpha: f64 },
    /// Stable Levy measure restricted to `[cutoff, inf)`.
    TruncatedStable { alpha: f64, cutoff: f64 },
}

/// Joint Levy measure families for coupled pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JointMeasure {
    /// Every subordinator jump `w` carries the spatial jump `scale * w`:
    /// `K(dy, dw) = K2(dw) delta_{scale w}(dy)`. The outer spec supplies an
    /// independent continuous part.
    Diagonal { scale: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    Independent,
    Coupled(JointMeasure),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcessSpec {
    pub outer: OuterSpec,
    pub subordinator: SubSpec,
    pub coupling: Coupling,
}

impl ProcessSpec {
    pub fn uncoupled(outer: OuterSpec, subordinator: SubSpec) -> Self {
        ProcessSpec {
            outer,
            subordinator,
            coupling: Coupling::Independent,
        }
    }

    pub fn diagonal(outer: OuterSpec, subordinator: SubSpec, scale: f64) -> Self {
        ProcessSpec {
            outer,
            subordinator,
            coupling: Coupling::Coupled(JointMeasure::Diagonal { scale }),
        }
    }

    /// Brownian outer process with unit diffusivity, standard stable subordinator.
    pub fn brownian_stable(alpha: f64) -> Self {
        Self::uncoupled(
            OuterSpec::Brownian {
                drift: 0.0,
                diffusivity: 1.0,
            },
            SubSpec::StandardStable { alpha },
        )
    }

    pub fn is_coupled(&self) -> bool {
        matches!(self.coupling, Coupling::Coupled(_))
    }

    /// Spatial scale carried by subordinator jumps (0 when uncoupled).
    pub fn coupling_scale(&self) -> f64 {
        match self.coupling {
            Coupling::Independent => 0.0,
            Coupling::Coupled(JointMeasure::Diagonal { scale }) => scale,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.outer.validate()?;
        self.subordinator.validate()?;
        match self.coupling {
            Coupling::Coupled(JointMeasure::Diagonal { scale }) if !scale.is_finite() => Err(
                LevyError::InvalidSpec(format!("coupling scale must be finite, got {scale}")),
            ),
            _ => Ok(()),
        }
    }
}

impl OuterSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            OuterSpec::Brownian { drift, diffusivity } => {
                if !drift.is_finite() || !(diffusivity >= 0.0) || !diffusivity.is_finite() {
                    return Err(LevyError::InvalidSpec(format!(
                        "Brownian needs finite drift and diffusivity >= 0, got b={drift}, a={diffusivity}"
                    )));
                }
                Ok(())
            }
            OuterSpec::StableSymmetric { index, scale } => {
                if !(index > 0.0 && index <= 2.0) || !(scale > 0.0) || !scale.is_finite() {
                    return Err(LevyError::InvalidSpec(format!(
                        "symmetric stable needs index in (0,2] and scale > 0, got {index}, {scale}"
                    )));
                }
                Ok(())
            }
            OuterSpec::CompoundPoisson { rate, jumps } => {
                if !(rate > 0.0) || !rate.is_finite() {
                    return Err(LevyError::InvalidSpec(format!(
                        "compound Poisson rate must be > 0, got {rate}"
                    )));
                }
                jumps.validate()
            }
        }
    }

    /// True when `A_u` is symmetric about zero for every `u`.
    pub fn is_symmetric(&self) -> bool {
        match *self {
            OuterSpec::Brownian { drift, .. } => drift == 0.0,
            OuterSpec::StableSymmetric { .. } => true,
            OuterSpec::CompoundPoisson { jumps, .. } => {
                matches!(jumps, JumpLaw::Normal { mean, .. } if mean == 0.0)
            }
        }
    }
}

impl SubSpec {
    pub fn alpha(&self) -> f64 {
        match *self {
            SubSpec::StandardStable { alpha } | SubSpec::TruncatedStable { alpha, .. } => alpha,
        }
    }

    pub fn cutoff(&self) -> f64 {
        match *self {
            SubSpec::StandardStable { .. } => 0.0,
            SubSpec::TruncatedStable { cutoff, .. } => cutoff,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let alpha = self.alpha();
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(LevyError::InvalidSpec(format!(
                "subordinator index must lie in (0,1), got {alpha}"
            )));
        }
        if let SubSpec::TruncatedStable { cutoff, .. } = *self {
            if !(cutoff > 0.0) || !cutoff.is_finite() {
                return Err(LevyError::InvalidSpec(format!(
                    "truncation cutoff must be > 0, got {cutoff}"
                )));
            }
        }
        Ok(())
    }

    fn norm(&self) -> f64 {
        let a = self.alpha();
        a / gamma(1.0 - a)
    }

    /// Density of K2 at `y`.
    pub fn k2_density(&self, y: f64) -> f64 {
        if y <= 0.0 || y < self.cutoff() {
            return 0.0;
        }
        self.norm() * y.powf(-1.0 - self.alpha())
    }

    /// Tail mass `K2([z, inf))`; infinite at `z <= 0` for the untruncated measure.
    pub fn k2_tail(&self, z: f64) -> f64 {
        let a = self.alpha();
        let z = z.max(self.cutoff());
        if z <= 0.0 {
            return f64::INFINITY;
        }
        if z.is_infinite() {
            return 0.0;
        }
        z.powf(-a) / gamma(1.0 - a)
    }

    /// `int (exp(-z w) - 1) K2(dw)` for `Re z > 0`, by quadrature in `v = ln w`.
    pub fn k2_exponent(&self, z: Complex64) -> Result<Complex64> {
        if !(z.re > 0.0) {
            return Err(LevyError::Domain(format!(
                "Laplace exponent needs Re z > 0, got {z}"
            )));
        }
        let a = self.alpha();
        let c = self.norm();
        let mag = z.norm();
        let v_hi = (40.0 / z.re).ln();
        let v_lo = match *self {
            SubSpec::TruncatedStable { cutoff, .. } => cutoff.ln(),
            SubSpec::StandardStable { .. } => ((1e-18f64).ln() - mag.ln()) / (1.0 - a),
        };
        let integrand = |v: f64| {
            let w = v.exp();
            cexpm1(-z * w) * (-a * v).exp()
        };
        let mut acc = Complex64::new(0.0, 0.0);
        if v_lo < v_hi {
            let rule = quad::gl16();
            let mut lo = v_lo;
            while lo < v_hi {
                let width = (0.5f64).min(1.0 / (mag * lo.exp()).max(1e-300)).max(1e-3);
                let hi = (lo + width).min(v_hi);
                for (v, w) in rule.mapped(lo, hi) {
                    acc += integrand(v) * w;
                }
                lo = hi;
            }
        }
        // Beyond v_hi the exponential has decayed below e^{-40}.
        let v_tail = v_hi.max(v_lo);
        acc -= Complex64::new((-a * v_tail).exp() / a, 0.0);
        Ok(acc * c)
    }
}

/// `exp(z) - 1` without cancellation for small `|z|`.
pub fn cexpm1(z: Complex64) -> Complex64 {
    let half = (0.5 * z.im).sin();
    Complex64::new(
        z.re.exp_m1() * z.im.cos() - 2.0 * half * half,
        z.re.exp() * z.im.sin(),
    )
}

/// `phi(s)` with `E exp(-s D_t) = exp(t phi(s))`.
pub fn phi_eval(sub: &SubSpec, s: f64) -> Result<f64> {
    sub.validate()?;
    if !(s > 0.0) || !s.is_finite() {
        return Err(LevyError::Domain(format!("phi needs s > 0, got {s}")));
    }
    match *sub {
        SubSpec::StandardStable { alpha } => Ok(-s.powf(alpha)),
        SubSpec::TruncatedStable { .. } => Ok(sub.k2_exponent(Complex64::new(s, 0.0))?.re),
    }
}

/// `psi(k)` with `E exp(i k A_t) = exp(t psi(k))`.
pub fn psi_eval(outer: &OuterSpec, k: f64) -> Complex64 {
    match *outer {
        OuterSpec::Brownian { drift, diffusivity } => {
            Complex64::new(-0.5 * diffusivity * k * k, drift * k)
        }
        OuterSpec::StableSymmetric { index, scale } => {
            Complex64::new(-(scale * k.abs()).powf(index), 0.0)
        }
        OuterSpec::CompoundPoisson { rate, jumps } => (jumps.char_fn(k) - 1.0) * rate,
    }
}

/// Joint exponent `xi(k, s)` of the pair `(A, D)`.
pub fn xi_eval(spec: &ProcessSpec, k: f64, s: f64) -> Result<Complex64> {
    spec.validate()?;
    if !(s > 0.0) || !s.is_finite() {
        return Err(LevyError::Domain(format!("xi needs s > 0, got {s}")));
    }
    let psi = psi_eval(&spec.outer, k);
    match spec.coupling {
        Coupling::Independent => Ok(psi + phi_eval(&spec.subordinator, s)?),
        Coupling::Coupled(JointMeasure::Diagonal { scale }) => {
            // int (e^{i k scale w - s w} - 1) K2(dw)
            let z = Complex64::new(s, -k * scale);
            Ok(psi + spec.subordinator.k2_exponent(z)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stable_phi_at_one() {
        let v = phi_eval(&SubSpec::StandardStable { alpha: 0.5 }, 1.0).unwrap();
        assert_eq!(v, -1.0);
    }

    #[test]
    fn phi_rejects_nonpositive_s() {
        let sub = SubSpec::StandardStable { alpha: 0.5 };
        assert!(matches!(phi_eval(&sub, 0.0), Err(LevyError::Domain(_))));
        assert!(matches!(phi_eval(&sub, -1.0), Err(LevyError::Domain(_))));
    }

    #[test]
    fn phi_vanishes_near_zero() {
        let sub = SubSpec::StandardStable { alpha: 0.5 };
        assert!(phi_eval(&sub, 1e-14).unwrap().abs() < 1e-6);
    }

    #[test]
    fn psi_examples() {
        let bm = OuterSpec::Brownian {
            drift: 0.0,
            diffusivity: 1.0,
        };
        assert_eq!(psi_eval(&bm, 2.0), Complex64::new(-2.0, 0.0));
        let drift = OuterSpec::Brownian {
            drift: 1.0,
            diffusivity: 0.0,
        };
        assert_eq!(psi_eval(&drift, 3.0), Complex64::new(0.0, 3.0));
        let cauchy = OuterSpec::StableSymmetric {
            index: 1.0,
            scale: 1.0,
        };
        assert_eq!(psi_eval(&cauchy, -4.0), Complex64::new(-4.0, 0.0));
    }

    #[test]
    fn xi_independent_sum() {
        let spec = ProcessSpec::brownian_stable(0.5);
        let v = xi_eval(&spec, 1.0, 1.0).unwrap();
        assert!((v - Complex64::new(-1.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn untruncated_quadrature_matches_closed_form() {
        let sub = SubSpec::StandardStable { alpha: 0.5 };
        for z in [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.25, 2.0),
            Complex64::new(4.0, -1.0),
        ] {
            let q = sub.k2_exponent(z).unwrap();
            let exact = -z.powf(0.5);
            assert!((q - exact).norm() < 1e-9, "{z}: {q} vs {exact}");
        }
    }

    #[test]
    fn tail_and_density_agree() {
        let sub = SubSpec::StandardStable { alpha: 0.5 };
        let t = quad::composite(1.0, 2.0, 8, |y| sub.k2_density(y));
        assert!((t - (sub.k2_tail(1.0) - sub.k2_tail(2.0))).abs() < 1e-13);
    }

    #[test]
    fn validation() {
        assert!(SubSpec::StandardStable { alpha: 1.0 }.validate().is_err());
        assert!(SubSpec::TruncatedStable {
            alpha: 0.5,
            cutoff: 0.0
        }
        .validate()
        .is_err());
        assert!(OuterSpec::Brownian {
            drift: 0.0,
            diffusivity: -1.0
        }
        .validate()
        .is_err());
        assert!(OuterSpec::StableSymmetric {
            index: 2.5,
            scale: 1.0
        }
        .validate()
        .is_err());
        assert!(OuterSpec::CompoundPoisson {
            rate: 0.0,
            jumps: JumpLaw::Fixed { size: 1.0 }
        }
        .validate()
        .is_err());
    }
}
