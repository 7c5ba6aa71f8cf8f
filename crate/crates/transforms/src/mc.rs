//! Monte Carlo estimators of time-Laplace transforms of path functionals.
//!
//! A functional is `int_{0 < t_1 < ... < t_n} exp(-<s, t>) prod_i w_i(t_i) dt`
//! where each weight `w_i` depends on the path only through `E_{t_i}` and
//! `D_{E_{t_i}}`. On an operational grid of step `du`, `E_t` is constant on
//! each cell `(D_{u_{j-1}}, D_{u_j}]`, so the time integral of one path is
//! computed exactly by a pass over the cells: the ordered integrals of
//! exponentials inside a cell have closed forms. Within a cell `E_t` is read
//! at the cell midpoint `u_j - du/2`; window indicators `1{E_t <= delta}`
//! are exact when `delta` is a multiple of `du`.
//!
//! Integration stops at the first cell boundary past `T = -ln(tol) / s_n`.
//! The neglected part is bounded by `tol * prod_i sup|w_i| / prod_i s_i` and
//! is reported separately from the sampling error.

use crate::error::{Result, TransformError};
use crate::probe::{check_s, Spatial, TransformProbe};
use levy_core::parallel::map_chunks;
use levy_core::sampling::positive_stable;
use levy_core::{psi_eval, LevyError, ProcessSpec, SubSpec};
use num_complex::Complex64;

pub const MAX_COORDS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McOptions {
    /// Operational-time step of the subordinator grid.
    pub du: f64,
    /// Relative truncation level of the time integral.
    pub tail_tol: f64,
    /// Cap on grid cells per path.
    pub max_cells: usize,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions {
            du: 0.01,
            tail_tol: 1e-6,
            max_cells: 5_000_000,
        }
    }
}

/// Weight of one time coordinate: `exp(rate * E_t - i d_freq * D_{E_t})`,
/// multiplied by `1{E_t <= width} / width` when a window is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordWeight {
    pub rate: Complex64,
    pub d_freq: f64,
    pub window: Option<f64>,
}

impl CoordWeight {
    pub fn exp(rate: Complex64) -> Self {
        CoordWeight { rate, d_freq: 0.0, window: None }
    }

    pub fn window(width: f64) -> Self {
        CoordWeight {
            rate: Complex64::new(0.0, 0.0),
            d_freq: 0.0,
            window: Some(width),
        }
    }

    fn bound(&self) -> f64 {
        let w = self.window.map_or(1.0, |d| 1.0 / d);
        if self.rate.re > 0.0 {
            f64::INFINITY
        } else {
            w
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Functional {
    pub s: Vec<f64>,
    pub weights: Vec<CoordWeight>,
}

/// Rates `psi(-K_j) - psi(-K_{j+1})` with `K_j = sum_{i >= j} k_i`, so that
/// `prod_j exp(rate_j E_j) = E[exp(-i sum_j k_j A_{E_j}) | E]`.
fn outer_rates(spec: &ProcessSpec, k: &[f64]) -> Vec<Complex64> {
    let n = k.len();
    let mut tail = vec![0.0; n + 1];
    for j in (0..n).rev() {
        tail[j] = tail[j + 1] + k[j];
    }
    (0..n)
        .map(|j| {
            let next = if j + 1 < n { psi_eval(&spec.outer, -tail[j + 1]) } else { Complex64::new(0.0, 0.0) };
            psi_eval(&spec.outer, -tail[j]) - next
        })
        .collect()
}

impl Functional {
    /// `E exp(-<lambda, E_t>)`.
    pub fn laplace_e(lambda: &[f64], s: &[f64]) -> Self {
        Functional {
            s: s.to_vec(),
            weights: lambda.iter().map(|&l| CoordWeight::exp(Complex64::new(-l, 0.0))).collect(),
        }
    }

    /// `E exp(-i <k, X_t>)` for `X_t = A_{E_t}` with `A = B + c D`. The outer
    /// part `B` is integrated out exactly given the subordinator path.
    pub fn flt_x(spec: &ProcessSpec, k: &[f64], s: &[f64]) -> Self {
        let c = spec.coupling_scale();
        Functional {
            s: s.to_vec(),
            weights: outer_rates(spec, k)
                .into_iter()
                .zip(k)
                .map(|(rate, &kj)| CoordWeight {
                    rate,
                    d_freq: c * kj,
                    window: None,
                })
                .collect(),
        }
    }

    /// Windowed estimator of `h(0+, lambda_2, ..., lambda_n; s)`: the first
    /// coordinate carries `1{E_{t_1} <= width} / width`.
    pub fn window_e(lambda_tail: &[f64], s: &[f64], width: f64) -> Self {
        let mut weights = vec![CoordWeight::window(width)];
        weights.extend(lambda_tail.iter().map(|&l| CoordWeight::exp(Complex64::new(-l, 0.0))));
        Functional { s: s.to_vec(), weights }
    }

    /// Windowed boundary term paired with the outer transform
    /// `z~(k_2..k_n; u_2..u_n)` started from zero at `u_1 = 0`.
    pub fn window_z(spec: &ProcessSpec, k_tail: &[f64], s: &[f64], width: f64) -> Self {
        let mut weights = vec![CoordWeight::window(width)];
        weights.extend(outer_rates(spec, k_tail).into_iter().map(CoordWeight::exp));
        Functional { s: s.to_vec(), weights }
    }

    /// Windowed `X` transform: `flt_x` with the first coordinate restricted to
    /// `E_{t_1} <= width` and divided by `width`.
    pub fn window_x(spec: &ProcessSpec, k: &[f64], s: &[f64], width: f64) -> Self {
        let mut f = Functional::flt_x(spec, k, s);
        f.weights[0].window = Some(width);
        f
    }

    fn validate(&self, du: f64) -> Result<()> {
        check_s(&self.s)?;
        let n = self.s.len();
        if self.weights.len() != n {
            return Err(TransformError::Domain("one weight per time coordinate is required".into()));
        }
        if n > MAX_COORDS {
            return Err(TransformError::Domain(format!(
                "at most {MAX_COORDS} time coordinates are supported, got {n}"
            )));
        }
        for w in &self.weights {
            if w.rate.re > 0.0 || !w.rate.re.is_finite() || !w.rate.im.is_finite() {
                return Err(TransformError::Domain(format!("weight rate {} must have Re <= 0", w.rate)));
            }
            if let Some(d) = w.window {
                let cells = d / du;
                if !(d > 0.0) || (cells - cells.round()).abs() > 1e-9 || cells.round() < 1.0 {
                    return Err(TransformError::Domain(format!(
                        "window {d} must be a positive multiple of du = {du}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn horizon(&self, tail_tol: f64) -> f64 {
        -tail_tol.ln() / self.s[self.s.len() - 1]
    }

    fn truncation_bound(&self, tail_tol: f64) -> f64 {
        let sup: f64 = self.weights.iter().map(CoordWeight::bound).product();
        tail_tol * sup / self.s.iter().product::<f64>()
    }
}

/// Linear combination `sum c_i F_i` of functionals, estimated path by path so
/// that its error bar accounts for correlations.
#[derive(Debug, Clone, PartialEq)]
pub struct Combination {
    pub terms: Vec<(usize, Complex64)>,
}

impl Combination {
    pub fn single(i: usize) -> Self {
        Combination {
            terms: vec![(i, Complex64::new(1.0, 0.0))],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: Complex64,
    /// Standard error of the mean, `sqrt(E|X - mean|^2 / n)`.
    pub std_error: f64,
    /// Bound on the time-truncation error.
    pub truncation: f64,
    pub n_samples: usize,
}

impl Estimate {
    /// Sampling error plus the truncation bound.
    pub fn error_bar(&self) -> f64 {
        self.std_error + self.truncation
    }
}

#[derive(Clone, Copy)]
struct Moments {
    n: f64,
    mean: Complex64,
    m2: f64,
}

impl Moments {
    fn new() -> Self {
        Moments { n: 0.0, mean: Complex64::new(0.0, 0.0), m2: 0.0 }
    }

    fn push(&mut self, x: Complex64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += (d.conj() * (x - self.mean)).re;
    }

    fn merge(&mut self, o: &Moments) {
        if o.n == 0.0 {
            return;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        self.mean += d * (o.n / n);
        self.m2 += o.m2 + d.norm_sqr() * self.n * o.n / n;
        self.n = n;
    }
}

/// Functionals grouped by their `s`-vector so that the per-cell exponentials
/// are shared.
struct Group {
    s: Vec<f64>,
    members: Vec<usize>,
}

fn g(c: f64, l: f64) -> f64 {
    -(-c * l).exp_m1() / c
}

/// Ordered integral `int_{0 < tau_1 < ... < tau_m < l} exp(-sum c_i tau_i)`
/// for `c = s[q..=m]`, from `gs[a][b] = g(s_a + ... + s_b, l)`.
fn ordered_from_table(s: &[f64], gs: &[[f64; MAX_COORDS]; MAX_COORDS], q: usize, m: usize) -> f64 {
    match m - q {
        0 => gs[q][q],
        1 => (gs[m][m] - gs[q][m]) / s[q],
        2 => {
            let a = (gs[m][m] - gs[q + 1][m]) / s[q + 1];
            let b = (gs[m][m] - gs[q][m]) / (s[q] + s[q + 1]);
            (a - b) / s[q]
        }
        _ => unreachable!("at most three coordinates"),
    }
}

#[cfg(test)]
fn ordered_integral(c: &[f64], l: f64) -> f64 {
    let mut gs = [[0.0; MAX_COORDS]; MAX_COORDS];
    for a in 0..c.len() {
        for b in a..c.len() {
            gs[a][b] = g(c[a..=b].iter().sum(), l);
        }
    }
    ordered_from_table(c, &gs, 0, c.len() - 1)
}

struct FuncState {
    n: usize,
    f: [Complex64; MAX_COORDS + 1],
    omega: [Complex64; MAX_COORDS],
    step: [Complex64; MAX_COORDS],
    d_freq: [f64; MAX_COORDS],
    window_cells: [usize; MAX_COORDS],
}

impl FuncState {
    fn new(func: &Functional, du: f64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        let mut st = FuncState {
            n: func.s.len(),
            f: [zero; MAX_COORDS + 1],
            omega: [zero; MAX_COORDS],
            step: [zero; MAX_COORDS],
            d_freq: [0.0; MAX_COORDS],
            window_cells: [usize::MAX; MAX_COORDS],
        };
        st.f[0] = Complex64::new(1.0, 0.0);
        for (i, w) in func.weights.iter().enumerate() {
            let scale = w.window.map_or(1.0, |d| 1.0 / d);
            st.omega[i] = (w.rate * (0.5 * du)).exp() * scale;
            st.step[i] = (w.rate * du).exp();
            st.d_freq[i] = w.d_freq;
            if let Some(d) = w.window {
                st.window_cells[i] = (d / du).round() as usize;
            }
        }
        st
    }
}

/// Estimates every combination from one shared set of subordinator paths.
pub fn estimate(
    spec: &ProcessSpec,
    functionals: &[Functional],
    combos: &[Combination],
    opts: &McOptions,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<Estimate>> {
    spec.validate()?;
    if !(opts.du > 0.0) || !(opts.tail_tol > 0.0 && opts.tail_tol < 1.0) {
        return Err(TransformError::Domain(format!("bad Monte Carlo options {opts:?}")));
    }
    if n_samples < 2 {
        return Err(TransformError::Domain("at least 2 samples are needed".into()));
    }
    if functionals.is_empty() {
        return Ok(vec![]);
    }
    for f in functionals {
        f.validate(opts.du)?;
    }
    for c in combos {
        if c.terms.iter().any(|(i, _)| *i >= functionals.len()) {
            return Err(TransformError::Domain("combination refers to a missing functional".into()));
        }
    }
    let mut groups: Vec<Group> = Vec::new();
    for (i, f) in functionals.iter().enumerate() {
        match groups.iter_mut().find(|g| g.s == f.s) {
            Some(g) => g.members.push(i),
            None => groups.push(Group { s: f.s.clone(), members: vec![i] }),
        }
    }
    let t_max = functionals
        .iter()
        .map(|f| f.horizon(opts.tail_tol))
        .fold(0.0, f64::max);

    let parts = map_chunks(n_samples, seed, |range, rng| -> Result<Vec<Moments>> {
        let mut acc = vec![Moments::new(); combos.len()];
        let mut values = vec![Complex64::new(0.0, 0.0); functionals.len()];
        for _ in range {
            one_path(spec, functionals, &groups, opts, t_max, rng, &mut values)?;
            for (m, c) in acc.iter_mut().zip(combos) {
                let v: Complex64 = c.terms.iter().map(|(i, w)| values[*i] * w).sum();
                m.push(v);
            }
        }
        Ok(acc)
    });
    let mut total = vec![Moments::new(); combos.len()];
    for part in parts {
        for (t, p) in total.iter_mut().zip(part?) {
            t.merge(&p);
        }
    }
    Ok(total
        .iter()
        .zip(combos)
        .map(|(m, c)| Estimate {
            mean: m.mean,
            std_error: (m.m2 / (m.n - 1.0) / m.n).sqrt(),
            truncation: c
                .terms
                .iter()
                .map(|(i, w)| w.norm() * functionals[*i].truncation_bound(opts.tail_tol))
                .sum(),
            n_samples,
        })
        .collect())
}

/// Cell increments of `D` with the scale factors computed once.
fn increment_sampler<R: rand::Rng + ?Sized>(sub: &SubSpec, du: f64) -> impl Fn(&mut R) -> f64 {
    let sub = *sub;
    let scale = du.powf(1.0 / sub.alpha());
    move |rng: &mut R| match sub {
        SubSpec::StandardStable { alpha } => scale * positive_stable(alpha, rng),
        _ => sub.increment(du, rng),
    }
}

fn one_path<R: rand::Rng + ?Sized>(
    spec: &ProcessSpec,
    functionals: &[Functional],
    groups: &[Group],
    opts: &McOptions,
    t_max: f64,
    rng: &mut R,
    out: &mut [Complex64],
) -> Result<()> {
    let mut states: Vec<FuncState> = functionals.iter().map(|f| FuncState::new(f, opts.du)).collect();
    // eps[g][i] = exp(-s_i D) at the left end of the current cell
    let mut eps: Vec<[f64; MAX_COORDS]> = groups.iter().map(|_| [1.0; MAX_COORDS]).collect();
    let mut r = [[0.0f64; MAX_COORDS]; MAX_COORDS];
    let mut gs = [[0.0f64; MAX_COORDS]; MAX_COORDS];
    let draw = increment_sampler(&spec.subordinator, opts.du);
    let mut d = 0.0f64;
    let mut j = 0usize;
    while d < t_max {
        if j >= opts.max_cells {
            return Err(LevyError::Horizon { t: t_max, horizon: d }.into());
        }
        let l = draw(rng);
        d += l;
        j += 1;
        for (gi, grp) in groups.iter().enumerate() {
            let n = grp.s.len();
            let e = &mut eps[gi];
            for a in 0..n {
                let mut sum = 0.0;
                for b in a..n {
                    sum += grp.s[b];
                    gs[a][b] = g(sum, l);
                }
            }
            for q in 0..n {
                let mut prefix = 1.0;
                for m in q..n {
                    prefix *= e[m];
                    r[q][m] = prefix * ordered_from_table(&grp.s, &gs, q, m);
                }
            }
            for i in 0..n {
                e[i] *= 1.0 - grp.s[i] * gs[i][i];
            }
            for &fi in &grp.members {
                let st = &mut states[fi];
                let mut w = [Complex64::new(0.0, 0.0); MAX_COORDS];
                for i in 0..n {
                    if j <= st.window_cells[i] {
                        w[i] = st.omega[i];
                        if st.d_freq[i] != 0.0 {
                            w[i] *= Complex64::from_polar(1.0, -st.d_freq[i] * d);
                        }
                    }
                    st.omega[i] *= st.step[i];
                }
                for m in (1..=n).rev() {
                    let mut add = Complex64::new(0.0, 0.0);
                    let mut prod = Complex64::new(1.0, 0.0);
                    for q in (1..=m).rev() {
                        prod *= w[q - 1];
                        add += st.f[q - 1] * prod * r[q - 1][m - 1];
                    }
                    st.f[m] += add;
                }
            }
        }
    }
    for (o, st) in out.iter_mut().zip(&states) {
        *o = st.f[st.n];
    }
    Ok(())
}

/// `h^(lambda; s) = int_{t_1 < ... < t_n} exp(-<s, t>) E exp(-<lambda, E_t>) dt`.
pub fn mc_laplace_e(
    spec: &ProcessSpec,
    lambda: &[f64],
    s: &[f64],
    opts: &McOptions,
    n_samples: usize,
    seed: u64,
) -> Result<TransformProbe> {
    if lambda.len() != s.len() || lambda.iter().any(|l| !(*l >= 0.0)) {
        return Err(TransformError::Domain("lambda must be >= 0 with one entry per time".into()));
    }
    let f = Functional::laplace_e(lambda, s);
    let est = estimate(spec, &[f], &[Combination::single(0)], opts, n_samples, seed)?[0];
    Ok(probe(Spatial::Laplace, lambda, s, est, seed))
}

/// `p-(k; s) = int_{t_1 < ... < t_n} exp(-<s, t>) E exp(-i <k, X_t>) dt`.
pub fn mc_flt_x(
    spec: &ProcessSpec,
    k: &[f64],
    s: &[f64],
    opts: &McOptions,
    n_samples: usize,
    seed: u64,
) -> Result<TransformProbe> {
    if k.len() != s.len() || k.iter().any(|v| !v.is_finite()) {
        return Err(TransformError::Domain("k must be finite with one entry per time".into()));
    }
    let f = Functional::flt_x(spec, k, s);
    let est = estimate(spec, &[f], &[Combination::single(0)], opts, n_samples, seed)?[0];
    Ok(probe(Spatial::Fourier, k, s, est, seed))
}

pub fn probe(spatial: Spatial, k: &[f64], s: &[f64], est: Estimate, seed: u64) -> TransformProbe {
    TransformProbe {
        spatial,
        k: k.to_vec(),
        s: s.to_vec(),
        value: est.mean,
        std_error: est.error_bar(),
        n_samples: est.n_samples,
        seed: Some(seed),
    }
}
