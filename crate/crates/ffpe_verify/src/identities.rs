//! Transform-space residuals of the governing equations of `E_t` and `X_t`.
//!
//! Each probe compares `lhs` and `rhs` estimated from one shared set of
//! subordinator paths, so the error bar of `lhs - rhs` accounts for their
//! correlation. Boundary terms `h(0+, ...)` are windowed estimators over
//! `E_{t_1} <= delta` combined as `2 W(delta/2) - W(delta)`, which removes the
//! first-order window bias.

use crate::error::{Result, VerifyError};
use crate::report::{Budget, IdentityId, ProbeResidual, ResidualReport};
use levy_core::{phi_eval, psi_eval, xi_eval, ProcessSpec, SubSpec};
use num_complex::Complex64;
use semimarkov::{k2_laplace, remainder_flt};
use transforms::{estimate, Combination, Functional, Spatial, TransformProbe};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Probe point: spatial variables (`lambda` or `k`) and Laplace variables `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbePoint {
    pub k: Vec<f64>,
    pub s: Vec<f64>,
}

impl ProbePoint {
    pub fn new(k: &[f64], s: &[f64]) -> Self {
        ProbePoint { k: k.to_vec(), s: s.to_vec() }
    }

    fn label(&self) -> String {
        format!("k={:?} s={:?}", self.k, self.s)
    }

    fn check(&self, laplace: bool) -> Result<()> {
        let n = self.s.len();
        if n == 0 || n > 3 || self.k.len() != n {
            return Err(VerifyError::Domain(format!("need 1..=3 coordinates in k and s, got {self:?}")));
        }
        if self.s.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(VerifyError::Domain(format!("s must be positive, got {:?}", self.s)));
        }
        if laplace && self.k.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(VerifyError::Domain(format!("lambda must be >= 0, got {:?}", self.k)));
        }
        if !laplace && self.k.iter().any(|v| !v.is_finite()) {
            return Err(VerifyError::Domain(format!("k must be finite, got {:?}", self.k)));
        }
        Ok(())
    }
}

/// Fixed probe sets used by the acceptance suite and the `verify` command.
pub mod probe_sets {
    use super::ProbePoint;

    /// `(lambda, s)` in `{0.25, 1, 4}^2`.
    pub fn thm31_n1() -> Vec<ProbePoint> {
        let v = [0.25, 1.0, 4.0];
        v.iter()
            .flat_map(|&l| v.iter().map(move |&s| ProbePoint::new(&[l], &[s])))
            .collect()
    }

    pub fn thm31_n2() -> Vec<ProbePoint> {
        let s = [[1.0, 1.0], [0.5, 2.0]];
        let l = [[1.0, 1.0], [0.0, 1.0], [1.0, 0.0], [0.5, 2.0]];
        s.iter()
            .flat_map(|s| l.iter().map(move |l| ProbePoint::new(l, s)))
            .collect()
    }

    pub fn cor32_n1() -> Vec<ProbePoint> {
        let v = [0.25, 1.0, 4.0];
        v.iter()
            .flat_map(|&k| v.iter().map(move |&s| ProbePoint::new(&[k], &[s])))
            .collect()
    }

    pub fn cor32_n2() -> Vec<ProbePoint> {
        let s = [[1.0, 1.0], [0.5, 2.0]];
        let k = [[1.0, 1.0], [0.0, 1.0], [1.5, -0.5], [2.0, 0.5]];
        s.iter()
            .flat_map(|s| k.iter().map(move |k| ProbePoint::new(k, s)))
            .collect()
    }

    pub fn cor33_n1() -> Vec<ProbePoint> {
        [([1.0], [1.0]), ([0.5], [1.0]), ([1.0], [2.0]), ([-2.0], [0.5])]
            .iter()
            .map(|(k, s)| ProbePoint::new(k, s))
            .collect()
    }
}

/// `h(lambda; s)` for `n = 1` in closed form, `(-phi(s) / s) / (lambda - phi(s))`.
pub fn h1_closed_form(sub: &SubSpec, lambda: f64, s: f64) -> Result<f64> {
    let phi = phi_eval(sub, s)?;
    Ok(-phi / s / (lambda - phi))
}

fn analytic(spatial: Spatial, p: &ProbePoint, v: Complex64) -> Result<TransformProbe> {
    Ok(TransformProbe::analytic(spatial, p.k.clone(), p.s.clone(), v)?)
}

fn analytic_report(identity: IdentityId, probes: Vec<ProbeResidual>) -> ResidualReport {
    ResidualReport {
        identity,
        probes,
        extrapolation: None,
        mc_budget: 0,
    }
}

/// Theorem check for `n = 1` in closed form: `-phi(s) h = -lambda h + h(0+; s)`
/// with `h(0+; s) = -phi(s) / s`.
pub fn residual_theorem31_analytic(sub: &SubSpec, points: &[ProbePoint]) -> Result<ResidualReport> {
    let mut probes = Vec::with_capacity(points.len());
    for p in points {
        p.check(true)?;
        if p.s.len() != 1 {
            return Err(VerifyError::Unsupported("the closed form covers n = 1 only".into()));
        }
        let (l, s) = (p.k[0], p.s[0]);
        let phi = phi_eval(sub, s)?;
        let h = h1_closed_form(sub, l, s)?;
        let lhs = analytic(Spatial::Laplace, p, (-phi * h).into())?;
        let rhs = analytic(Spatial::Laplace, p, (-l * h - phi / s).into())?;
        probes.push(ProbeResidual::judge(p.label(), lhs, rhs, 0.0, 0.0, 0.0));
    }
    Ok(analytic_report(IdentityId::Thm31, probes))
}

/// Corollary check for `n = 1` with an uncoupled spec in closed form:
/// `(-psi(-k) - phi(s)) p = -phi(s) / s`.
pub fn residual_cor32_analytic(spec: &ProcessSpec, points: &[ProbePoint]) -> Result<ResidualReport> {
    require_uncoupled(spec)?;
    let mut probes = Vec::with_capacity(points.len());
    for p in points {
        p.check(false)?;
        if p.s.len() != 1 {
            return Err(VerifyError::Unsupported("the closed form covers n = 1 only".into()));
        }
        let (k, s) = (p.k[0], p.s[0]);
        let phi = phi_eval(&spec.subordinator, s)?;
        let sym = -psi_eval(&spec.outer, -k) - phi;
        let pbar = Complex64::from(-phi / s) / sym;
        let lhs = analytic(Spatial::Fourier, p, pbar * sym)?;
        let rhs = analytic(Spatial::Fourier, p, (-phi / s).into())?;
        probes.push(ProbeResidual::judge(p.label(), lhs, rhs, 0.0, 0.0, 0.0));
    }
    Ok(analytic_report(IdentityId::Cor32, probes))
}

/// One Monte Carlo probe: `lhs` and `rhs` as combinations of functionals, plus
/// an analytic constant added to `rhs`.
struct McProbe {
    point: ProbePoint,
    spatial: Spatial,
    lhs: Vec<(usize, Complex64)>,
    rhs: Vec<(usize, Complex64)>,
    rhs_const: Complex64,
}

fn run_mc(
    identity: IdentityId,
    spec: &ProcessSpec,
    functionals: Vec<Functional>,
    probes: Vec<McProbe>,
    budget: &Budget,
) -> Result<ResidualReport> {
    let mut combos = Vec::with_capacity(3 * probes.len());
    for p in &probes {
        let mut diff = p.lhs.clone();
        diff.extend(p.rhs.iter().map(|&(i, c)| (i, -c)));
        combos.push(Combination { terms: p.lhs.clone() });
        combos.push(Combination { terms: p.rhs.clone() });
        combos.push(Combination { terms: diff });
    }
    let est = estimate(spec, &functionals, &combos, &budget.mc, budget.n_paths, budget.seed)?;
    let mut out = Vec::with_capacity(probes.len());
    for (p, e) in probes.iter().zip(est.chunks(3)) {
        let lhs = transforms::mc::probe(p.spatial, &p.point.k, &p.point.s, e[0], budget.seed);
        let rhs = if p.rhs.is_empty() {
            analytic(p.spatial, &p.point, p.rhs_const)?
        } else {
            let mut r = transforms::mc::probe(p.spatial, &p.point.k, &p.point.s, e[1], budget.seed);
            r.value += p.rhs_const;
            r
        };
        out.push(ProbeResidual::judge(
            p.point.label(),
            lhs,
            rhs,
            e[2].error_bar(),
            budget.tolerance,
            budget.noise_cap,
        ));
    }
    Ok(ResidualReport {
        identity,
        probes: out,
        extrapolation: None,
        mc_budget: budget.n_paths,
    })
}

fn check_window(budget: &Budget) -> Result<()> {
    let cells = budget.window / 2.0 / budget.mc.du;
    if !(budget.window > 0.0) || (cells - cells.round()).abs() > 1e-9 || cells.round() < 1.0 {
        return Err(VerifyError::Domain(format!(
            "window/2 = {} must be a positive multiple of du = {}",
            budget.window / 2.0,
            budget.mc.du
        )));
    }
    Ok(())
}

/// Pushes `W(delta)` and `W(delta/2)` and returns the Richardson terms.
fn richardson<F: Fn(f64) -> Functional>(
    functionals: &mut Vec<Functional>,
    window: f64,
    make: F,
    scale: Complex64,
) -> Vec<(usize, Complex64)> {
    let i = functionals.len();
    functionals.push(make(window));
    functionals.push(make(window / 2.0));
    vec![(i, -scale), (i + 1, 2.0 * scale)]
}

/// Monte Carlo check of `-phi(S) h(lambda; s) = -Lambda h(lambda; s) + h(0+, lambda_2.. ; s)`
/// with `S = sum s_i`, `Lambda = sum lambda_i`.
pub fn residual_theorem31(spec: &ProcessSpec, points: &[ProbePoint], budget: &Budget) -> Result<ResidualReport> {
    check_window(budget)?;
    let mut functionals = Vec::new();
    let mut probes = Vec::new();
    for p in points {
        p.check(true)?;
        let total_s: f64 = p.s.iter().sum();
        let total_l: f64 = p.k.iter().sum();
        let phi = phi_eval(&spec.subordinator, total_s)?;
        let h = functionals.len();
        functionals.push(Functional::laplace_e(&p.k, &p.s));
        let mut rhs = vec![(h, Complex64::from(-total_l))];
        rhs.extend(richardson(&mut functionals, budget.window, |d| Functional::window_e(&p.k[1..], &p.s, d), ONE));
        probes.push(McProbe {
            point: p.clone(),
            spatial: Spatial::Laplace,
            lhs: vec![(h, Complex64::from(-phi))],
            rhs,
            rhs_const: Complex64::new(0.0, 0.0),
        });
    }
    run_mc(IdentityId::Thm31, spec, functionals, probes, budget)
}

fn require_uncoupled(spec: &ProcessSpec) -> Result<()> {
    if spec.is_coupled() {
        return Err(VerifyError::Domain("this check needs an uncoupled spec".into()));
    }
    Ok(())
}

/// Monte Carlo check of `p(k; s) (-psi(-K) - phi(S)) = int z~(k_2..; u_2..) h(0+, du_2..; s)`
/// for an uncoupled spec, `K = sum k_i`. The right side pairs the windowed
/// boundary term with the outer transform integrated out in closed form.
pub fn residual_cor32(spec: &ProcessSpec, points: &[ProbePoint], budget: &Budget) -> Result<ResidualReport> {
    require_uncoupled(spec)?;
    check_window(budget)?;
    let mut functionals = Vec::new();
    let mut probes = Vec::new();
    for p in points {
        p.check(false)?;
        let total_s: f64 = p.s.iter().sum();
        let total_k: f64 = p.k.iter().sum();
        let sym = -psi_eval(&spec.outer, -total_k) - phi_eval(&spec.subordinator, total_s)?;
        let x = functionals.len();
        functionals.push(Functional::flt_x(spec, &p.k, &p.s));
        let rhs = richardson(
            &mut functionals,
            budget.window,
            |d| Functional::window_z(spec, &p.k[1..], &p.s, d),
            ONE,
        );
        probes.push(McProbe {
            point: p.clone(),
            spatial: Spatial::Fourier,
            lhs: vec![(x, sym)],
            rhs,
            rhs_const: Complex64::new(0.0, 0.0),
        });
    }
    run_mc(IdentityId::Cor32, spec, functionals, probes, budget)
}

/// Right side of the coupled identity in closed form for the diagonal family
/// (`c = 0` covers the uncoupled case).
///
/// For `n = 1` it is the transform of the remainder measure. For `n = 2` the
/// first regeneration at `w` either lies past `t_2` or is followed by a fresh
/// start from `(c w, w)`; integrating the time simplex against `K2(dw)` leaves
/// `kappa(z) = int (exp(-z w) - 1) K2(dw)` at shifted arguments with
/// `z = i (k_1 + k_2) c`.
pub fn cor33_rhs(spec: &ProcessSpec, k: &[f64], s: &[f64]) -> Result<Complex64> {
    match (k, s) {
        ([k1], [s1]) => Ok(remainder_flt(spec, *k1, *s1)?),
        ([k1, k2], [s1, s2]) => {
            let sub = &spec.subordinator;
            let c = spec.coupling_scale();
            let z = Complex64::new(0.0, (k1 + k2) * c);
            let kappa = |v: f64| k2_laplace(sub, z + v);
            let total = s1 + s2;
            let (k0, k_s2, k_tot) = (kappa(0.0)?, kappa(*s2)?, kappa(total)?);
            let tail = remainder_flt(spec, *k2, *s2)? / -xi_eval(spec, -k2, *s2)?;
            let stay = ((k0 - k_tot) / total - (k_s2 - k_tot) / *s1) / *s2;
            Ok(stay + tail * (k_s2 - k_tot) / *s1)
        }
        _ => Err(VerifyError::Unsupported(format!(
            "closed-form right side is implemented for n <= 2, got n = {}",
            s.len()
        ))),
    }
}

/// Monte Carlo check of `p(k; s) (-xi(-K, S)) = FLT of the first-regeneration
/// term` for a coupled (diagonal) spec; the right side is analytic.
pub fn residual_cor33(spec: &ProcessSpec, points: &[ProbePoint], budget: &Budget) -> Result<ResidualReport> {
    let mut functionals = Vec::new();
    let mut probes = Vec::new();
    for p in points {
        p.check(false)?;
        let total_s: f64 = p.s.iter().sum();
        let total_k: f64 = p.k.iter().sum();
        let sym = -xi_eval(spec, -total_k, total_s)?;
        let rhs_const = cor33_rhs(spec, &p.k, &p.s)?;
        let x = functionals.len();
        functionals.push(Functional::flt_x(spec, &p.k, &p.s));
        probes.push(McProbe {
            point: p.clone(),
            spatial: Spatial::Fourier,
            lhs: vec![(x, sym)],
            rhs: vec![],
            rhs_const,
        });
    }
    run_mc(IdentityId::Cor33, spec, functionals, probes, budget)
}
