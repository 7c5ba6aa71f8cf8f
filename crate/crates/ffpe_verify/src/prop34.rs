//! Small-`u` limit `(1/u) P(X_t <= x, E_t <= u) -> K((-inf, x], [t, inf))`.
//!
//! Only operational times up to `u_max` matter, so each path of `(A, D)` is
//! advanced on a grid of step `du` that divides every `u` of the sequence,
//! and stops when `D` crosses `t` or the grid reaches `u_max`. On the grid
//! `E_t <= u` is exactly `D_u >= t`; `X_t` is read as `A` at the end of the
//! crossing cell, which carries the crossing jump.

use crate::error::{Result, VerifyError};
use crate::report::{Budget, Extrapolation, IdentityId, ProbeResidual, ResidualReport, Status};
use levy_core::parallel::map_chunks;
use levy_core::ProcessSpec;
use num_complex::Complex64;
use semimarkov::remainder_measure;
use transforms::{Spatial, TransformProbe};

/// Grid cells per smallest `u`.
pub const CELLS_PER_U: usize = 32;

/// Default `u`-sequence, halving from `0.08`.
pub fn default_u_sequence() -> Vec<f64> {
    vec![0.08, 0.04, 0.02, 0.01]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UEstimate {
    pub u: f64,
    pub value: f64,
    pub std_error: f64,
}

/// Weighted least-squares line through `(u, value)`; returns the intercept
/// and its standard error.
pub fn extrapolate_to_zero(points: &[UEstimate]) -> (f64, f64) {
    let (mut sw, mut su, mut suu, mut sv, mut suv) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for p in points {
        let w = if p.std_error > 0.0 { 1.0 / (p.std_error * p.std_error) } else { 1e30 };
        sw += w;
        su += w * p.u;
        suu += w * p.u * p.u;
        sv += w * p.value;
        suv += w * p.u * p.value;
    }
    let det = sw * suu - su * su;
    if points.len() < 2 || det <= 0.0 {
        return (sv / sw, (1.0 / sw).sqrt());
    }
    let intercept = (suu * sv - su * suv) / det;
    (intercept, (suu / det).sqrt())
}

/// Per-path indicators of `{X_t <= x, E_t <= u_i}` for every `u_i`, as a bit mask.
fn simulate(spec: &ProcessSpec, x: f64, t: f64, cells: &[usize], du: f64, budget: &Budget) -> Vec<u32> {
    let max_cells = cells[0];
    map_chunks(budget.n_paths, budget.seed, |range, rng| {
        range
            .map(|_| {
                let (mut a, mut d) = (0.0, 0.0);
                for j in 1..=max_cells {
                    let (da, dd) = spec.increment(du, rng);
                    a += da;
                    d += dd;
                    if d >= t {
                        if a > x {
                            return 0;
                        }
                        return cells
                            .iter()
                            .enumerate()
                            .filter(|(_, &c)| j <= c)
                            .fold(0u32, |m, (i, _)| m | (1 << i));
                    }
                }
                0
            })
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

fn point_probe(x: f64, u: f64, value: f64, std_error: f64, n: usize, seed: u64) -> TransformProbe {
    TransformProbe {
        spatial: Spatial::Laplace,
        k: vec![x],
        s: vec![u],
        value: Complex64::new(value, 0.0),
        std_error,
        n_samples: n,
        seed: Some(seed),
    }
}

/// Estimates `(1/u) P(X_t <= x, E_t <= u)` along a decreasing `u`-sequence,
/// extrapolates linearly to `u = 0` and compares with the remainder measure.
///
/// Probes compare consecutive halvings `u` and `u/2` (limit existence); the
/// extrapolated value is judged with relative tolerance `budget.tolerance`.
/// Probes carry `k = [x]` and `s = [u]`.
pub fn verify_prop34(spec: &ProcessSpec, x: f64, t: f64, u_seq: &[f64], budget: &Budget) -> Result<ResidualReport> {
    spec.validate()?;
    if u_seq.len() < 2 || u_seq.len() > 32 {
        return Err(VerifyError::Domain("need between 2 and 32 values of u".into()));
    }
    if u_seq.iter().any(|u| !(*u > 0.0) || !u.is_finite()) || u_seq.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(VerifyError::Domain(format!("u-sequence must decrease towards 0, got {u_seq:?}")));
    }
    if !(t > 0.0) || x.is_nan() {
        return Err(VerifyError::Domain(format!("need t > 0 and a real x, got t = {t}, x = {x}")));
    }
    let u_min = u_seq[u_seq.len() - 1];
    let du = u_min / CELLS_PER_U as f64;
    let mut cells = Vec::with_capacity(u_seq.len());
    for &u in u_seq {
        let c = u / du;
        if (c - c.round()).abs() > 1e-6 {
            return Err(VerifyError::Domain(format!("u = {u} is not a multiple of u_min / {CELLS_PER_U}")));
        }
        cells.push(c.round() as usize);
    }
    let target = remainder_measure(spec, x, t)?;
    let masks = simulate(spec, x, t, &cells, du, budget);
    let n = masks.len() as f64;
    let hit = |m: u32, i: usize| if m & (1 << i) != 0 { 1.0 } else { 0.0 };
    let estimates: Vec<UEstimate> = u_seq
        .iter()
        .enumerate()
        .map(|(i, &u)| {
            let p = masks.iter().map(|&m| hit(m, i)).sum::<f64>() / n;
            UEstimate {
                u,
                value: p / u,
                std_error: (p * (1.0 - p) / (n - 1.0)).sqrt() / u,
            }
        })
        .collect();
    let mut probes = Vec::with_capacity(u_seq.len() - 1);
    for i in 0..u_seq.len() - 1 {
        let (a, b) = (estimates[i], estimates[i + 1]);
        // paired differences of the two indicators scaled by 1/u
        let diffs: f64 = masks
            .iter()
            .map(|&m| {
                let d = hit(m, i) / a.u - hit(m, i + 1) / b.u - (a.value - b.value);
                d * d
            })
            .sum();
        let se = (diffs / (n - 1.0) / n).sqrt();
        probes.push(ProbeResidual::judge(
            format!("u={} vs u={}", a.u, b.u),
            point_probe(x, a.u, a.value, a.std_error, masks.len(), budget.seed),
            point_probe(x, b.u, b.value, b.std_error, masks.len(), budget.seed),
            se.max(f64::MIN_POSITIVE),
            budget.tolerance,
            budget.noise_cap,
        ));
    }
    let (value, std_error) = extrapolate_to_zero(&estimates);
    let scale = target.abs().max(value.abs());
    let err = (value - target).abs();
    let status = if scale == 0.0 {
        Status::Pass
    } else if 4.0 * std_error > budget.noise_cap * scale {
        Status::Inconclusive
    } else if err <= (budget.tolerance * target.abs()).max(4.0 * std_error) {
        Status::Pass
    } else {
        Status::Fail
    };
    Ok(ResidualReport {
        identity: IdentityId::Prop34,
        probes,
        extrapolation: Some(Extrapolation { value, std_error, target, status }),
        mc_budget: budget.n_paths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_fit_recovers_intercept() {
        let pts: Vec<UEstimate> = [0.1, 0.05, 0.025]
            .iter()
            .map(|&u| UEstimate { u, value: 2.0 - 3.0 * u, std_error: 0.01 })
            .collect();
        let (v, se) = extrapolate_to_zero(&pts);
        assert!((v - 2.0).abs() < 1e-12);
        assert!(se > 0.01);
    }

    #[test]
    fn empty_event_gives_zero() {
        let spec = ProcessSpec::brownian_stable(0.5);
        let b = Budget::default().with_paths(2000);
        let r = verify_prop34(&spec, -1e6, 1.0, &default_u_sequence(), &b).unwrap();
        let e = r.extrapolation.unwrap();
        assert_eq!(e.value, 0.0);
        assert_eq!(e.target, 0.0);
        assert_eq!(e.status, Status::Pass);
    }

    #[test]
    fn rejects_increasing_sequence() {
        let spec = ProcessSpec::brownian_stable(0.5);
        let b = Budget::default().with_paths(100);
        assert!(verify_prop34(&spec, 1.0, 1.0, &[0.01, 0.02], &b).is_err());
        assert!(verify_prop34(&spec, 1.0, 1.0, &[0.05, 0.03], &b).is_err());
    }
}
