//! Causal one-dimensional kernels and their directional (diagonal) lifts.
//!
//! Every operator treats the function as zero to the left of the grid origin.
//! Directional versions act along lines parallel to `(1, ..., 1)` and need the
//! same step on every axis.

use crate::error::{FracError, Result};
use crate::lattice::{FkDistribution, LatticeFunction};
use levy_core::SubSpec;
use statrs::function::gamma::gamma;

/// Grunwald-Letnikov weights `w_k = (-1)^k binom(alpha, k)`.
pub fn gl_weights(alpha: f64, n: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(n);
    if n == 0 {
        return w;
    }
    w.push(1.0);
    for k in 1..n {
        let prev = w[k - 1];
        w.push(prev * (1.0 - (alpha + 1.0) / k as f64));
    }
    w
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(FracError::Domain(format!("alpha must lie in (0,1), got {alpha}")))
    }
}

/// One-dimensional operator applied along a single grid line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Op1d {
    Identity,
    /// Classical first derivative (second-order differences).
    Derivative,
    RiemannLiouville(f64),
    Caputo(f64),
    /// `int (f(t - y) - f(t)) K2(dy)` for the subordinator's Levy measure.
    Levy(SubSpec),
}

impl Op1d {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Op1d::RiemannLiouville(a) | Op1d::Caputo(a) => check_alpha(a),
            Op1d::Levy(sub) => sub.validate().map_err(|e| FracError::Domain(e.to_string())),
            _ => Ok(()),
        }
    }

    /// Applies the operator to `line` sampled with step `h`. A `NaN` marks the
    /// end of the known values; outputs from there on are `NaN`.
    pub fn apply_line(&self, line: &[f64], h: f64) -> Vec<f64> {
        let known = line.iter().position(|v| v.is_nan()).unwrap_or(line.len());
        let f = &line[..known];
        let mut out = match *self {
            Op1d::Identity => f.to_vec(),
            Op1d::Derivative => derivative(f, h),
            Op1d::RiemannLiouville(a) => grunwald(f, a, h),
            Op1d::Caputo(a) => {
                let f0 = f.first().copied().unwrap_or(0.0);
                let shifted: Vec<f64> = f.iter().map(|v| v - f0).collect();
                grunwald(&shifted, a, h)
            }
            Op1d::Levy(sub) => levy_line(f, &sub, h),
        };
        out.resize(line.len(), f64::NAN);
        out
    }
}

fn derivative(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    match n {
        0 => vec![],
        1 => vec![0.0],
        2 => vec![(f[1] - f[0]) / h; 2],
        _ => (0..n)
            .map(|j| {
                if j == 0 {
                    (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)
                } else if j == n - 1 {
                    (3.0 * f[j] - 4.0 * f[j - 1] + f[j - 2]) / (2.0 * h)
                } else {
                    (f[j + 1] - f[j - 1]) / (2.0 * h)
                }
            })
            .collect(),
    }
}

fn grunwald(f: &[f64], alpha: f64, h: f64) -> Vec<f64> {
    let w = gl_weights(alpha, f.len());
    let scale = h.powf(-alpha);
    (0..f.len())
        .map(|j| scale * (0..=j).map(|m| w[m] * f[j - m]).sum::<f64>())
        .collect()
}

/// Product integration of `int (f(t - y) - f(t)) K2(dy)` with `f` linear
/// between nodes and `f(-h) = 0`.
fn levy_line(f: &[f64], sub: &SubSpec, h: f64) -> Vec<f64> {
    let n = f.len();
    let a = sub.alpha();
    let eps = sub.cutoff();
    let c1 = a / (gamma(1.0 - a) * (1.0 - a));
    let pw = |y: f64| y.max(eps).powf(1.0 - a);
    // m0[m] = K2([mh, (m+1)h)), m1[m] = int_{mh}^{(m+1)h} y K2(dy)
    let m0: Vec<f64> = (0..=n)
        .map(|m| {
            if m == 0 {
                f64::NAN
            } else {
                sub.k2_tail(m as f64 * h) - sub.k2_tail((m + 1) as f64 * h)
            }
        })
        .collect();
    let m1: Vec<f64> = (0..=n)
        .map(|m| c1 * (pw((m + 1) as f64 * h) - pw(m as f64 * h)))
        .collect();
    let at = |i: isize| if i < 0 { 0.0 } else { f[i as usize] };
    (0..n)
        .map(|j| {
            let fj = f[j];
            let mut acc = (at(j as isize - 1) - fj) * m1[0] / h;
            for m in 1..=j {
                let hi = f[j - m];
                let lo = at(j as isize - m as isize - 1);
                acc += (hi - fj) * m0[m] + (lo - hi) * (m1[m] - m as f64 * h * m0[m]) / h;
            }
            acc - fj * sub.k2_tail((j + 1) as f64 * h)
        })
        .collect()
}

fn require_1d(f: &LatticeFunction) -> Result<f64> {
    if f.dims() != 1 {
        return Err(FracError::Shape(format!("expected a 1D lattice, got {} axes", f.dims())));
    }
    Ok(f.grid.step[0])
}

/// Applies `op` along every line of `lines`.
pub fn apply_on_lines(op: &Op1d, f: &LatticeFunction, lines: &[Vec<usize>], h: f64) -> LatticeFunction {
    let mut out = vec![f64::NAN; f.values.len()];
    for line in lines {
        let vals: Vec<f64> = line.iter().map(|&i| f.values[i]).collect();
        for (&i, v) in line.iter().zip(op.apply_line(&vals, h)) {
            out[i] = v;
        }
    }
    LatticeFunction {
        grid: f.grid.clone(),
        values: out,
    }
}

/// Applies `op` along the diagonal direction of an n-dimensional lattice.
pub fn directional_apply(op: &Op1d, f: &LatticeFunction) -> Result<LatticeFunction> {
    op.validate()?;
    let h = f.grid.uniform_step()?;
    Ok(apply_on_lines(op, f, &f.grid.diagonal_lines(), h))
}

/// Riemann-Liouville derivative by Grunwald-Letnikov sums.
pub fn rl_deriv(f: &LatticeFunction, alpha: f64) -> Result<LatticeFunction> {
    check_alpha(alpha)?;
    let h = require_1d(f)?;
    Ok(LatticeFunction {
        grid: f.grid.clone(),
        values: grunwald(&f.values, alpha, h),
    })
}

/// Caputo derivative, `rl_deriv(f - f(0))`.
pub fn caputo_deriv(f: &LatticeFunction, alpha: f64) -> Result<LatticeFunction> {
    check_alpha(alpha)?;
    let h = require_1d(f)?;
    Ok(LatticeFunction {
        grid: f.grid.clone(),
        values: Op1d::Caputo(alpha).apply_line(&f.values, h),
    })
}

/// `sum_i d/dx_i` from per-axis second-order differences.
fn partial_sum(f: &LatticeFunction) -> Vec<f64> {
    let mut out = vec![0.0; f.values.len()];
    for axis in 0..f.dims() {
        let h = f.grid.step[axis];
        for line in f.grid.axis_lines(axis) {
            let vals: Vec<f64> = line.iter().map(|&i| f.values[i]).collect();
            for (&i, d) in line.iter().zip(derivative(&vals, h)) {
                out[i] += d;
            }
        }
    }
    out
}

/// `sum_{i in k} d/dx_{k_i}` on the density, i.e. the derivative along `(1, ..., 1)`.
/// Differences are taken along the diagonal, so they never straddle the
/// faces `x_i = x_{i+1}` of the ordered simplex; diagonals with fewer than
/// three nodes fall back to per-axis differences.
pub fn directional_deriv(f: &FkDistribution) -> Result<FkDistribution> {
    let d = &f.density;
    let h = d.grid.uniform_step()?;
    let lines = d.grid.diagonal_lines();
    let mut out = apply_on_lines(&Op1d::Derivative, d, &lines, h);
    let short: Vec<&Vec<usize>> = lines.iter().filter(|l| l.len() < 3).collect();
    if !short.is_empty() {
        let axial = partial_sum(d);
        for line in short {
            for &i in line {
                out.values[i] = axial[i];
            }
        }
    }
    Ok(f.with_density(out))
}

/// Directional Riemann-Liouville derivative on the mobilized coordinates.
pub fn directional_frac_deriv(f: &FkDistribution, alpha: f64) -> Result<FkDistribution> {
    check_alpha(alpha)?;
    Ok(f.with_density(directional_apply(&Op1d::RiemannLiouville(alpha), &f.density)?))
}

/// `Phi f(t) = int (f(t - y 1) - f(t)) K2(dy)` with symbol `phi(sum s_i)`.
pub fn pdo_from_measure(sub: &SubSpec, f: &LatticeFunction) -> Result<LatticeFunction> {
    directional_apply(&Op1d::Levy(*sub), f)
}
