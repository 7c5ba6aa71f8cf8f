//! Laplace transforms of lattice functions.
//!
//! Each axis is integrated against `exp(-s t)` exactly for the piecewise
//! linear interpolant of the samples. Beyond the last node the function is
//! continued by an exponential fitted to the last two nodes (a constant when
//! the samples do not decay). A non-finite value at the origin of a 1D
//! lattice marks an integrable power singularity `C t^{-beta}`, fitted on the
//! first two interior nodes and integrated in closed form over the first cell.

use crate::error::{Result, TransformError};
use crate::probe::check_s;
use fracops::LatticeFunction;
use statrs::function::gamma::{gamma, gamma_lr};

/// Weight of the left node of a cell, `int_0^h (1 - t/h) exp(-s t) dt / h` with `x = s h`.
fn falling(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        0.5 - x / 6.0 + x * x / 24.0 - x * x * x / 120.0
    } else {
        ((-x).exp_m1() + x) / (x * x)
    }
}

/// Weight of the right node, `int_0^h (t/h) exp(-s t) dt / h`.
fn left_ramp(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        0.5 - x / 3.0 + x * x / 8.0 - x * x * x / 30.0
    } else {
        (1.0 - (1.0 + x) * (-x).exp()) / (x * x)
    }
}

/// Laplace transform of samples `f` at `origin + j h`.
pub fn laplace_line(f: &[f64], origin: f64, h: f64, s: f64) -> Result<f64> {
    check_s(&[s])?;
    if !(origin >= 0.0) || !(h > 0.0) {
        return Err(TransformError::Domain(format!(
            "Laplace transform needs origin >= 0 and h > 0, got {origin}, {h}"
        )));
    }
    let m = f.len();
    if m == 0 {
        return Ok(0.0);
    }
    let singular = !f[0].is_finite();
    if f.iter().skip(1).any(|v| !v.is_finite()) {
        return Err(TransformError::Domain("non-finite sample away from the origin".into()));
    }
    if m == 1 {
        return Ok(if singular { 0.0 } else { f[0] * (-s * origin).exp() / s });
    }
    let x = s * h;
    let (wl, wr) = (falling(x), left_ramp(x));
    let mut acc = 0.0;
    let mut decay = (-s * origin).exp();
    for j in 0..m - 1 {
        // cell [t_j, t_{j+1}]: weights of its left and right nodes
        let next = decay * (-x).exp();
        if !(singular && j == 0) {
            acc += h * decay * (f[j] * wl + f[j + 1] * wr);
        }
        decay = next;
    }
    if singular {
        if m < 3 || !(f[1] > 0.0 && f[2] > 0.0) {
            return Err(TransformError::Domain(
                "a singular origin needs two positive samples after it".into(),
            ));
        }
        let beta = (f[1] / f[2]).ln() / std::f64::consts::LN_2;
        if !(beta < 1.0) {
            return Err(TransformError::Domain(format!(
                "origin singularity t^-{beta} is not integrable"
            )));
        }
        if origin != 0.0 {
            return Err(TransformError::Domain("a singular origin must sit at t = 0".into()));
        }
        let c = f[1] * h.powf(beta);
        let a = 1.0 - beta;
        acc += c * s.powf(-a) * gamma(a) * gamma_lr(a, x);
    }
    // exponential continuation past the last node
    let (last, prev) = (f[m - 1], f[m - 2]);
    let kappa = if last != 0.0 && prev / last > 1.0 { (prev / last).ln() / h } else { 0.0 };
    acc += last * (-s * (origin + (m - 1) as f64 * h)).exp() / (s + kappa);
    Ok(acc)
}

/// Laplace transform of a lattice function, `int exp(-<s, t>) f(t) dt`, reduced
/// axis by axis from the last.
pub fn laplace_grid(f: &LatticeFunction, s: &[f64]) -> Result<f64> {
    check_s(s)?;
    let g = &f.grid;
    let n = g.dims();
    if s.len() != n {
        return Err(TransformError::Domain(format!(
            "{} Laplace variables for a {n}-dimensional lattice",
            s.len()
        )));
    }
    if n > 1 && f.values.iter().any(|v| !v.is_finite()) {
        return Err(TransformError::Domain(
            "singular samples are only supported on 1D lattices".into(),
        ));
    }
    let mut values = f.values.clone();
    for axis in (0..n).rev() {
        let len = g.shape[axis];
        let outer = values.len() / len;
        let mut reduced = Vec::with_capacity(outer);
        for o in 0..outer {
            let line = &values[o * len..(o + 1) * len];
            reduced.push(laplace_line(line, g.origin[axis], g.step[axis], s[axis])?);
        }
        values = reduced;
    }
    Ok(values[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_weights_match_direct_quadrature() {
        for &x in &[1e-4, 5e-3, 0.3, 2.0] {
            let n = 20000;
            let (mut l, mut r) = (0.0, 0.0);
            for i in 0..n {
                let t = (i as f64 + 0.5) / n as f64;
                let e = (-x * t).exp() / n as f64;
                l += (1.0 - t) * e;
                r += t * e;
            }
            assert!((falling(x) - l).abs() < 1e-8);
            assert!((left_ramp(x) - r).abs() < 1e-8);
        }
    }

    #[test]
    fn linear_function_is_exact() {
        let h = 0.1;
        let f: Vec<f64> = (0..=2000).map(|j| j as f64 * h).collect();
        // tail continues the last value as a constant; the truncation is e^{-200}
        let v = laplace_line(&f, 0.0, h, 1.0).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_nonpositive_s() {
        assert!(matches!(laplace_line(&[1.0, 1.0], 0.0, 0.1, 0.0), Err(TransformError::Domain(_))));
    }
}
