//! The remainder measure `K((-inf, x], [t, inf))` and its Fourier-Laplace transform.

use crate::error::{Result, SemiMarkovError};
use levy_core::quad::gl16;
use levy_core::spec::cexpm1;
use levy_core::{Coupling, JointMeasure, ProcessSpec, SubSpec};
use num_complex::Complex64;

/// `K((-inf, x], [t, inf))`: mass of joint jumps with spatial part at most `x`
/// and waiting part at least `t`.
pub fn remainder_measure(spec: &ProcessSpec, x: f64, t: f64) -> Result<f64> {
    spec.validate()?;
    if !(t > 0.0) {
        return Err(SemiMarkovError::Domain(format!("remainder needs t > 0, got {t}")));
    }
    let sub = &spec.subordinator;
    match spec.coupling {
        Coupling::Independent => Ok(if x >= 0.0 { sub.k2_tail(t) } else { 0.0 }),
        Coupling::Coupled(JointMeasure::Diagonal { scale: c }) => {
            if c == 0.0 {
                return Ok(if x >= 0.0 { sub.k2_tail(t) } else { 0.0 });
            }
            // jumps (c w, w) with w >= t and c w <= x
            let bound = x / c;
            if c > 0.0 {
                Ok(if bound > t { sub.k2_tail(t) - sub.k2_tail(bound) } else { 0.0 })
            } else {
                Ok(sub.k2_tail(t.max(bound)))
            }
        }
    }
}

/// `kappa(z) = int (exp(-z w) - 1) K2(dw)` on the closed half-plane `Re z >= 0`.
pub fn k2_laplace(sub: &SubSpec, z: Complex64) -> Result<Complex64> {
    sub.validate()?;
    if z.re < 0.0 || !z.re.is_finite() || !z.im.is_finite() {
        return Err(SemiMarkovError::Domain(format!("kappa needs Re z >= 0, got {z}")));
    }
    let a = sub.alpha();
    let stable = if z == Complex64::new(0.0, 0.0) { z } else { -z.powf(a) };
    match *sub {
        SubSpec::StandardStable { .. } => Ok(stable),
        SubSpec::TruncatedStable { cutoff, .. } => {
            // remove int_0^cutoff; with q = w^{1-alpha} the integrand
            // (exp(-z w) - 1) / w stays bounded
            let norm = a / statrs::function::gamma::gamma(1.0 - a);
            let q_hi = cutoff.powf(1.0 - a);
            let panels = 16usize.max((4.0 * z.norm() * cutoff).ceil() as usize);
            let h = q_hi / panels as f64;
            let rule = gl16();
            let mut acc = Complex64::new(0.0, 0.0);
            for p in 0..panels {
                for (q, wq) in rule.mapped(p as f64 * h, (p + 1) as f64 * h) {
                    let w = q.powf(1.0 / (1.0 - a));
                    acc += cexpm1(-z * w) / w * wq;
                }
            }
            Ok(stable - acc * norm / (1.0 - a))
        }
    }
}

/// Fourier-Laplace transform `int int exp(-i k x - s t) K(dx, [t, inf)) dt`
/// of the remainder measure, `(kappa(i k c) - kappa(s + i k c)) / s` for the
/// diagonal family (`c = 0` when uncoupled).
pub fn remainder_flt(spec: &ProcessSpec, k: f64, s: f64) -> Result<Complex64> {
    spec.validate()?;
    if !(s > 0.0) || !s.is_finite() {
        return Err(SemiMarkovError::Domain(format!("remainder transform needs s > 0, got {s}")));
    }
    let c = spec.coupling_scale();
    let shift = Complex64::new(0.0, k * c);
    let sub = &spec.subordinator;
    Ok((k2_laplace(sub, shift)? - k2_laplace(sub, shift + s)?) / s)
}
