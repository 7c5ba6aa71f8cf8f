//! Fixed-Talbot numerical inversion of Laplace transforms (Abate and Valko).

use crate::error::{Result, TransformError};
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TalbotOptions {
    /// Number of contour nodes.
    pub nodes: usize,
    /// Abscissa `c` such that `F` is analytic for `Re s > c`; the contour is
    /// shifted by `c` and the result rescaled by `exp(c t)`.
    pub shift: f64,
}

impl Default for TalbotOptions {
    fn default() -> Self {
        TalbotOptions { nodes: 32, shift: 0.0 }
    }
}

/// `f(t)` from its Laplace transform `F`, with default options.
pub fn talbot_invert<F: Fn(Complex64) -> Complex64>(f: F, t: f64) -> Result<f64> {
    talbot_invert_with(f, t, &TalbotOptions::default())
}

pub fn talbot_invert_with<F: Fn(Complex64) -> Complex64>(
    f: F,
    t: f64,
    opts: &TalbotOptions,
) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(TransformError::Domain(format!("Talbot inversion needs t > 0, got {t}")));
    }
    if opts.nodes < 2 {
        return Err(TransformError::Domain("Talbot inversion needs at least 2 nodes".into()));
    }
    let m = opts.nodes as f64;
    let r = 2.0 * m / (5.0 * t);
    let c = Complex64::new(opts.shift, 0.0);
    let mut acc = 0.5 * (f(c + r) * (r * t).exp()).re;
    for k in 1..opts.nodes {
        let theta = k as f64 * PI / m;
        let cot = theta.cos() / theta.sin();
        let s = Complex64::new(r * theta * cot, r * theta);
        let sigma = theta + (theta * cot - 1.0) * cot;
        let term = (s * t).exp() * f(c + s) * Complex64::new(1.0, sigma);
        acc += term.re;
    }
    let v = r / m * acc * (opts.shift * t).exp();
    if !v.is_finite() {
        return Err(TransformError::Inversion(format!(
            "contour sum is not finite at t = {t}; reduce the node count or shift"
        )));
    }
    Ok(v)
}
