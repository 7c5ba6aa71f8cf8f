//! Distance between the scaled CTRW `X^c_1` and its limit `A_{E_1}`.
//!
//! With centred normal jumps of standard deviation `sd`, given the jump count
//! `N` the walk is exactly `Normal(0, N sd^2 / c)`, and the limit given `E_1`
//! is `Normal(0, sd^2 E_1)`. Both laws are therefore estimated by averaging
//! normal CDFs over sampled counts (resp. sampled `E_1 = D_1^{-alpha}`),
//! which removes the jump noise from the Kolmogorov distance.

use crate::error::{Result, VerifyError};
use levy_core::parallel::map_chunks;
use levy_core::sampling::positive_stable;
use levy_core::WaitingLaw;
use statrs::function::erf::erfc;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CtrwKsOptions {
    pub alpha: f64,
    pub jump_sd: f64,
    pub n_paths: usize,
    pub n_reference: usize,
    /// Evaluation grid `[-x_max, x_max]` with this many points.
    pub x_max: f64,
    pub n_grid: usize,
    pub seed: u64,
}

impl Default for CtrwKsOptions {
    fn default() -> Self {
        CtrwKsOptions {
            alpha: 0.5,
            jump_sd: 1.0,
            n_paths: 100_000,
            n_reference: 100_000,
            x_max: 4.0,
            n_grid: 161,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CtrwKs {
    pub c: f64,
    pub distance: f64,
    /// Grid point where the distance is attained.
    pub at: f64,
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Mixture CDF `sum_v w_v P(sqrt(v) Z <= x)` over variances `v >= 0`.
fn mixture_cdf(variances: &BTreeMap<u64, (f64, f64)>, x: f64) -> f64 {
    let mut acc = 0.0;
    let mut total = 0.0;
    for &(v, w) in variances.values() {
        total += w;
        acc += w * if v == 0.0 {
            if x >= 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            normal_cdf(x / v.sqrt())
        };
    }
    acc / total
}

fn grid(opts: &CtrwKsOptions) -> Vec<f64> {
    let n = opts.n_grid.max(2);
    (0..n)
        .map(|i| -opts.x_max + 2.0 * opts.x_max * i as f64 / (n - 1) as f64)
        .collect()
}

fn check(opts: &CtrwKsOptions) -> Result<()> {
    if !(opts.alpha > 0.0 && opts.alpha < 1.0) || !(opts.jump_sd > 0.0) || opts.n_paths < 2 || opts.n_reference < 2 {
        return Err(VerifyError::Domain(format!("bad CTRW options {opts:?}")));
    }
    Ok(())
}

/// Reference CDF of `A_{E_1}` on the grid from sampled `E_1`.
pub fn limit_cdf(opts: &CtrwKsOptions) -> Result<(Vec<f64>, Vec<f64>)> {
    check(opts)?;
    let (a, var) = (opts.alpha, opts.jump_sd * opts.jump_sd);
    let draws: Vec<f64> = map_chunks(opts.n_reference, opts.seed ^ 0x5eed_0001, |range, rng| {
        range.map(|_| positive_stable(a, rng).powf(-a) * var).collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect();
    let table: BTreeMap<u64, (f64, f64)> = draws.iter().enumerate().map(|(i, &v)| (i as u64, (v, 1.0))).collect();
    let xs = grid(opts);
    let f = xs.iter().map(|&x| mixture_cdf(&table, x)).collect();
    Ok((xs, f))
}

/// CDF of `X^c_1` on the grid from sampled jump counts.
pub fn ctrw_cdf(c: f64, opts: &CtrwKsOptions) -> Result<(Vec<f64>, Vec<f64>)> {
    check(opts)?;
    if !(c > 0.0) || !c.is_finite() {
        return Err(VerifyError::Domain(format!("scale c must be > 0, got {c}")));
    }
    let waits = WaitingLaw::standard_pareto(opts.alpha);
    let horizon = c.powf(waits.scale_exponent());
    let counts: Vec<u64> = map_chunks(opts.n_paths, opts.seed, |range, rng| {
        range
            .map(|_| {
                let (mut clock, mut n) = (0.0, 0u64);
                loop {
                    clock += waits.sample(rng);
                    if clock > horizon {
                        break n;
                    }
                    n += 1;
                }
            })
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect();
    let var = opts.jump_sd * opts.jump_sd / c;
    let mut table: BTreeMap<u64, (f64, f64)> = BTreeMap::new();
    for n in counts {
        table.entry(n).or_insert((n as f64 * var, 0.0)).1 += 1.0;
    }
    let xs = grid(opts);
    let f = xs.iter().map(|&x| mixture_cdf(&table, x)).collect();
    Ok((xs, f))
}

/// Kolmogorov distance on the grid between `X^c_1` and `A_{E_1}` for each
/// scale in `cs`, sharing one reference sample.
pub fn ctrw_ks_distances(cs: &[f64], opts: &CtrwKsOptions) -> Result<Vec<CtrwKs>> {
    let (xs, reference) = limit_cdf(opts)?;
    cs.iter()
        .map(|&c| {
            let (_, f) = ctrw_cdf(c, opts)?;
            let (i, d) = f
                .iter()
                .zip(&reference)
                .map(|(a, b)| (a - b).abs())
                .enumerate()
                .fold((0, 0.0), |best, (i, d)| if d > best.1 { (i, d) } else { best });
            Ok(CtrwKs { c, distance: d, at: xs[i] })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdfs_are_monotone_and_symmetric() {
        let opts = CtrwKsOptions { n_paths: 2000, n_reference: 2000, n_grid: 41, ..Default::default() };
        let (xs, f) = ctrw_cdf(10.0, &opts).unwrap();
        assert!(f.windows(2).all(|w| w[1] >= w[0]));
        // symmetric law with an atom at 0 counted on the right
        for (x, v) in xs.iter().zip(&f) {
            if *x > 0.0 {
                let mirror = f[xs.iter().position(|y| (y + x).abs() < 1e-12).unwrap()];
                assert!((v + mirror - 1.0).abs() < 1e-12);
            }
        }
        let (_, r) = limit_cdf(&opts).unwrap();
        assert!(r.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn rejects_bad_scale() {
        assert!(ctrw_cdf(0.0, &CtrwKsOptions::default()).is_err());
        let opts = CtrwKsOptions { alpha: 1.0, ..Default::default() };
        assert!(limit_cdf(&opts).is_err());
    }
}
