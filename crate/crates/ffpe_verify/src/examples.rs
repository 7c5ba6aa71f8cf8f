//! One-dimensional checks for the standard stable subordinator: the Levy
//! operator of `K2` against the Riemann-Liouville derivative on the grid, the
//! uncoupled identity with remainder `s^{alpha - 1}`, and the coupled
//! identity for the diagonal family.

use crate::error::{Result, VerifyError};
use crate::identities::{residual_cor32, residual_cor32_analytic, residual_cor33, ProbePoint};
use crate::report::{Budget, IdentityId, ProbeResidual, ResidualReport, Status};
use fracops::{pdo_from_measure, rl_deriv, LatticeFunction, Op1d};
use levy_core::{OuterSpec, ProcessSpec, SubSpec};
use num_complex::Complex64;
use transforms::{Spatial, TransformProbe};

/// Growing exponential rate and evaluation window of the grid check.
const RATE: f64 = 2.0;
const EXTENT: f64 = 6.0;
const WINDOW: (f64, f64) = (4.0, 6.0);
/// Grid step of the coarse check; the fine check halves it.
pub const EX1_STEP: f64 = 0.01;
/// Relative tolerance of the grid check at the coarse step.
pub const EX1_TOL: f64 = 0.02;
/// Largest admissible error ratio under step halving.
pub const EX1_RATIO: f64 = 0.6;

fn window_worst<F: FnMut(usize) -> f64>(h: f64, m: usize, err: F) -> f64 {
    (0..m)
        .filter(|&i| {
            let t = i as f64 * h;
            t >= WINDOW.0 - 1e-12 && t <= WINDOW.1 + 1e-12
        })
        .map(err)
        .fold(0.0, f64::max)
}

fn exponential(h: f64) -> Result<(LatticeFunction, usize)> {
    let m = (EXTENT / h).round() as usize + 1;
    Ok((LatticeFunction::line(h, m, |t| (RATE * t).exp())?, m))
}

/// Values of the Levy operator and of the Riemann-Liouville derivative at the
/// worst point of the window, together with the relative mismatch
/// `|Phi f + D^alpha f| / (|Phi f| + |D^alpha f|)`.
pub fn example1_grid(alpha: f64, h: f64) -> Result<(f64, f64, f64)> {
    let (f, m) = exponential(h)?;
    let sub = SubSpec::StandardStable { alpha };
    let levy = pdo_from_measure(&sub, &f)?;
    let rl = rl_deriv(&f, alpha)?;
    let mut worst = (0.0, 0.0, -1.0);
    window_worst(h, m, |i| {
        let (a, b) = (levy.values[i], rl.values[i]);
        let r = (a + b).abs() / (a.abs() + b.abs());
        if r > worst.2 {
            worst = (a / f.values[i], b / f.values[i], r);
        }
        r
    });
    Ok(worst)
}

/// Relative distance between the Riemann-Liouville derivative of order `alpha`
/// and the classical derivative on the growing exponential.
pub fn example1_classical_gap(alpha: f64, h: f64) -> Result<f64> {
    let (f, m) = exponential(h)?;
    let rl = rl_deriv(&f, alpha)?;
    let d1 = Op1d::Derivative.apply_line(&f.values, h);
    Ok(window_worst(h, m, |i| (rl.values[i] - d1[i]).abs() / d1[i].abs()))
}

fn grid_probe(alpha: f64, h: f64, residual: f64, lhs: f64, rhs: f64, ok: bool) -> ProbeResidual {
    let probe = |v: f64| TransformProbe {
        spatial: Spatial::Laplace,
        k: vec![h],
        s: vec![RATE],
        value: Complex64::new(v, 0.0),
        std_error: 0.0,
        n_samples: 0,
        seed: None,
    };
    ProbeResidual {
        label: format!("ex1 alpha={alpha} h={h}"),
        lhs: probe(lhs),
        rhs: probe(rhs),
        residual,
        sigma: 0.0,
        tolerance: EX1_TOL,
        status: if ok { Status::Pass } else { Status::Fail },
    }
}

/// Runs the three one-dimensional checks for every `alpha` and aggregates
/// them into one report.
///
/// Example 1 compares `Phi f` with `-D^alpha f` on `exp(2 t)` at steps `h`
/// and `h/2`: the coarse mismatch must stay below `EX1_TOL` and the fine
/// one must shrink by at least `EX1_RATIO`. Examples 2 and 3 run the
/// uncoupled (closed form and Monte Carlo) and the diagonal coupled identity
/// at `k = 1, s = 1`.
pub fn verify_examples_1d(alphas: &[f64], budget: &Budget) -> Result<ResidualReport> {
    if alphas.is_empty() || alphas.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
        return Err(VerifyError::Domain(format!("alpha grid must lie in (0,1), got {alphas:?}")));
    }
    let mut probes = Vec::new();
    let unit = [ProbePoint::new(&[1.0], &[1.0])];
    let brownian = OuterSpec::Brownian { drift: 0.0, diffusivity: 1.0 };
    for &alpha in alphas {
        let (l1, r1, e1) = example1_grid(alpha, EX1_STEP)?;
        let (l2, r2, e2) = example1_grid(alpha, EX1_STEP / 2.0)?;
        probes.push(grid_probe(alpha, EX1_STEP, e1, l1, r1, e1 < EX1_TOL));
        probes.push(grid_probe(alpha, EX1_STEP / 2.0, e2, l2, r2, e2 <= EX1_RATIO * e1));

        let uncoupled = ProcessSpec::brownian_stable(alpha);
        let tag = |mut r: ResidualReport, what: &str| {
            for p in &mut r.probes {
                p.label = format!("{what} alpha={alpha} {}", p.label);
            }
            r.probes
        };
        probes.extend(tag(residual_cor32_analytic(&uncoupled, &unit)?, "ex2 closed"));
        probes.extend(tag(residual_cor32(&uncoupled, &unit, budget)?, "ex2 mc"));
        let coupled = ProcessSpec::diagonal(brownian, SubSpec::StandardStable { alpha }, 1.0);
        probes.extend(tag(residual_cor33(&coupled, &unit, budget)?, "ex3 mc"));
    }
    Ok(ResidualReport {
        identity: IdentityId::Ex1d,
        probes,
        extrapolation: None,
        mc_budget: budget.n_paths,
    })
}
