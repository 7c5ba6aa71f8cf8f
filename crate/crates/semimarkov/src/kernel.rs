//! Transition kernels of the Markov pairs `(E_t, R_t)` and `(X_t, R_t)`.
//!
//! Each kernel is an atom (no regeneration before `t`) plus an absolutely
//! continuous part stored as cell masses over a rectangular `(x, r)` partition.
//! For the standard stable subordinator the a.c. part of `H` started at
//! `(x', r')` with `tau = t - r' >= 0` has cell masses
//!
//! `int_0^tau K2bar-increment(tau - w; r-cell) w^{alpha-1} (M(x_b w^{-alpha}) - M(x_a w^{-alpha})) dw`
//!
//! (see [`crate::stable`]), exact in `x` and `r`; the `w`-integral uses
//! power substitutions that absorb both endpoint singularities.

use crate::error::{Result, SemiMarkovError};
use crate::outer::outer_mass;
use crate::stable::OneSidedStable;
use levy_core::quad::gl16;
use levy_core::{OuterSpec, ProcessSpec, SubSpec};
use statrs::function::gamma::gamma;

/// Rectangular partition of `(x, r)` space. Edges may be infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub x_edges: Vec<f64>,
    pub r_edges: Vec<f64>,
}

fn check_edges(name: &str, e: &[f64]) -> Result<()> {
    if e.len() < 2 || e.windows(2).any(|w| !(w[1] > w[0])) || e.iter().any(|v| v.is_nan()) {
        return Err(SemiMarkovError::Domain(format!("{name} edges must be strictly increasing with at least two entries")));
    }
    Ok(())
}

impl Partition {
    pub fn new(x_edges: Vec<f64>, r_edges: Vec<f64>) -> Result<Self> {
        check_edges("x", &x_edges)?;
        check_edges("r", &r_edges)?;
        if r_edges[0] < 0.0 {
            return Err(SemiMarkovError::Domain("r edges must be >= 0".into()));
        }
        Ok(Partition { x_edges, r_edges })
    }

    /// `nx` equal x-cells on `[x_lo, x_hi]`, `nr` equal r-cells on `[0, r_max]`
    /// and an overflow cell `[r_max, inf)`.
    pub fn uniform(x_lo: f64, x_hi: f64, nx: usize, r_max: f64, nr: usize) -> Result<Self> {
        let hx = (x_hi - x_lo) / nx as f64;
        let hr = r_max / nr as f64;
        let mut r: Vec<f64> = (0..=nr).map(|j| j as f64 * hr).collect();
        r.push(f64::INFINITY);
        Self::new((0..=nx).map(|i| x_lo + i as f64 * hx).collect(), r)
    }

    pub fn nx(&self) -> usize {
        self.x_edges.len() - 1
    }

    pub fn nr(&self) -> usize {
        self.r_edges.len() - 1
    }

    fn shifted_x(&self, by: f64) -> Vec<f64> {
        self.x_edges.iter().map(|e| e - by).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelEval {
    pub t: f64,
    pub x_prime: f64,
    pub r_prime: f64,
    /// Mass of the no-regeneration atom.
    pub atom_weight: f64,
    pub atom_location: (f64, f64),
    pub partition: Partition,
    /// Cell masses of the a.c. part, row-major `[x cell][r cell]`.
    pub ac_mass: Vec<f64>,
}

impl KernelEval {
    fn atom(t: f64, x_prime: f64, r_prime: f64, at: (f64, f64), partition: &Partition) -> Self {
        KernelEval {
            t,
            x_prime,
            r_prime,
            atom_weight: 1.0,
            atom_location: at,
            partition: partition.clone(),
            ac_mass: vec![0.0; partition.nx() * partition.nr()],
        }
    }

    pub fn mass(&self, i: usize, j: usize) -> f64 {
        self.ac_mass[i * self.partition.nr() + j]
    }

    /// Cell-averaged density of the a.c. part (0 on cells of infinite area).
    pub fn density(&self, i: usize, j: usize) -> f64 {
        let p = &self.partition;
        let area = (p.x_edges[i + 1] - p.x_edges[i]) * (p.r_edges[j + 1] - p.r_edges[j]);
        if area.is_finite() { self.mass(i, j) / area } else { 0.0 }
    }

    pub fn ac_total(&self) -> f64 {
        self.ac_mass.iter().sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.atom_weight + self.ac_total()
    }

    /// a.c. masses summed over r.
    pub fn x_marginal(&self) -> Vec<f64> {
        self.ac_mass.chunks(self.partition.nr()).map(|row| row.iter().sum()).collect()
    }

    /// a.c. masses summed over x.
    pub fn r_marginal(&self) -> Vec<f64> {
        let nr = self.partition.nr();
        let mut out = vec![0.0; nr];
        for (k, m) in self.ac_mass.iter().enumerate() {
            out[k % nr] += m;
        }
        out
    }
}

fn stable_index(sub: &SubSpec) -> Result<f64> {
    match *sub {
        SubSpec::StandardStable { alpha } => {
            sub.validate()?;
            Ok(alpha)
        }
        SubSpec::TruncatedStable { .. } => Err(SemiMarkovError::Unsupported(
            "kernels are evaluated for the standard stable subordinator only".into(),
        )),
    }
}

fn check_times(t: f64, r_prime: f64) -> Result<()> {
    if !(t >= 0.0) || !(r_prime >= 0.0) || !t.is_finite() {
        return Err(SemiMarkovError::Domain(format!("need t >= 0 and r' >= 0, got t = {t}, r' = {r_prime}")));
    }
    Ok(())
}

/// Quadrature nodes `(w, tau - w, weight)` for `int_0^tau F(w) w^{alpha-1} (tau - w)^{-alpha} dw`-type
/// integrands: the returned weights already contain `w^{alpha-1}`, the caller
/// supplies everything else.
fn w_nodes(alpha: f64, tau: f64) -> Vec<(f64, f64, f64)> {
    let rule = gl16();
    let mut out = Vec::new();
    let geometric = |top: f64| {
        let mut e = vec![0.0];
        let mut v = top * 1e-9;
        while v < top {
            e.push(v);
            v *= 1.6;
        }
        e.push(top);
        e
    };
    // left half, q = w^alpha: w^{alpha-1} dw = dq / alpha
    let q_top = (0.5 * tau).powf(alpha);
    for p in geometric(q_top).windows(2) {
        for (q, wq) in rule.mapped(p[0], p[1]) {
            let w = q.powf(1.0 / alpha);
            out.push((w, tau - w, wq / alpha));
        }
    }
    // right half, p = (tau - w)^{1-alpha}: dw = (tau - w)^alpha dp / (1 - alpha)
    let p_top = (0.5 * tau).powf(1.0 - alpha);
    for p in geometric(p_top).windows(2) {
        for (pp, wp) in rule.mapped(p[0], p[1]) {
            let gap = pp.powf(1.0 / (1.0 - alpha));
            let w = tau - gap;
            out.push((w, gap, wp * gap.powf(alpha) / (1.0 - alpha) * w.powf(alpha - 1.0)));
        }
    }
    out
}

/// Cell masses `P(E in u-cell, R in r-cell)` for the pair `(E, R)` started
/// at `(0, 0)` and run for time `tau > 0`, row-major `[u cell][r cell]`.
pub fn h_masses(alpha: f64, tau: f64, u_edges: &[f64], r_edges: &[f64]) -> Result<Vec<f64>> {
    let table = OneSidedStable::get(alpha)?;
    let (nu, nr) = (u_edges.len() - 1, r_edges.len() - 1);
    let nodes = w_nodes(alpha, tau);
    let g1 = gamma(1.0 - alpha);
    let kbar = |z: f64| if z.is_infinite() { 0.0 } else { z.powf(-alpha) / g1 };
    let n = nodes.len();
    // m[e][i] = M(u_e w_i^{-alpha}), k[j][i] = K2bar(tau - w_i + r_j)
    let mut m = vec![0.0; (nu + 1) * n];
    for (e, &u) in u_edges.iter().enumerate() {
        if u <= 0.0 {
            continue;
        }
        for (i, &(w, _, _)) in nodes.iter().enumerate() {
            m[e * n + i] = if w > 0.0 { table.m(u * w.powf(-alpha)) } else { table.m(f64::INFINITY) };
        }
    }
    let mut k = vec![0.0; (nr + 1) * n];
    for (j, &r) in r_edges.iter().enumerate() {
        for (i, &(_, gap, _)) in nodes.iter().enumerate() {
            k[j * n + i] = kbar(gap + r);
        }
    }
    let mut out = vec![0.0; nu * nr];
    let mut dm = vec![0.0; n];
    for e in 0..nu {
        for i in 0..n {
            dm[i] = nodes[i].2 * (m[(e + 1) * n + i] - m[e * n + i]);
        }
        for j in 0..nr {
            let mut acc = 0.0;
            for i in 0..n {
                acc += dm[i] * (k[j * n + i] - k[(j + 1) * n + i]);
            }
            out[e * nr + j] = acc.max(0.0);
        }
    }
    Ok(out)
}

/// Smallest `u` with `P(E_tau > u) < tol`.
pub fn inverse_quantile(alpha: f64, tau: f64, tol: f64) -> Result<f64> {
    let table = OneSidedStable::get(alpha)?;
    let mut u = tau.powf(alpha).max(1e-12);
    while table.inverse_tail(tau, u) > tol {
        u *= 1.25;
    }
    Ok(u)
}

/// `H_t(x', r'; dx, dr)` for the standard stable subordinator.
#[allow(non_snake_case)]
pub fn eval_H(sub: &SubSpec, t: f64, x_prime: f64, r_prime: f64, partition: &Partition) -> Result<KernelEval> {
    let alpha = stable_index(sub)?;
    check_times(t, r_prime)?;
    if t < r_prime {
        return Ok(KernelEval::atom(t, x_prime, r_prime, (x_prime, r_prime - t), partition));
    }
    let tau = t - r_prime;
    if tau == 0.0 {
        // regeneration exactly at t
        return Ok(KernelEval::atom(t, x_prime, r_prime, (x_prime, 0.0), partition));
    }
    let ac_mass = h_masses(alpha, tau, &partition.shifted_x(x_prime), &partition.r_edges)?;
    Ok(KernelEval {
        t,
        x_prime,
        r_prime,
        atom_weight: 0.0,
        atom_location: (x_prime, r_prime - t),
        partition: partition.clone(),
        ac_mass,
    })
}

/// Internal operational-time cells for mixing `H` with the outer law:
/// geometric near 0, where the outer law changes fastest, uniform beyond.
fn mixing_u_edges(u_max: f64) -> Vec<f64> {
    let mut e = vec![0.0];
    let knee = 0.05 * u_max;
    let mut v = u_max * 1e-7;
    while v < knee {
        e.push(v);
        v *= 1.3;
    }
    let n = 200;
    for i in 0..=n {
        e.push(knee + (u_max - knee) * i as f64 / n as f64);
    }
    e
}

/// Two-point Gauss average of `f` over `[a, b]`, in `ln u` for cells far from 0.
fn cell_average<F: Fn(f64) -> Result<f64>>(a: f64, b: f64, f: F) -> Result<f64> {
    let g = 0.5 / 3f64.sqrt();
    if a > 0.0 && b / a > 1.2 {
        let (la, lb) = (a.ln(), b.ln());
        let c = 0.5 * (la + lb);
        let d = (lb - la) * g;
        Ok(0.5 * (f((c - d).exp())? + f((c + d).exp())?))
    } else {
        let c = 0.5 * (a + b);
        let d = (b - a) * g;
        Ok(0.5 * (f(c - d)? + f(c + d)?))
    }
}

/// `(u cells, H masses over u x r cells)` for the a.c. part of the mixing.
fn mixing_h(alpha: f64, tau: f64, r_edges: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let u_max = inverse_quantile(alpha, tau, 1e-9)?;
    let u_edges = mixing_u_edges(u_max);
    let h = h_masses(alpha, tau, &u_edges, r_edges)?;
    Ok((u_edges, h))
}

fn kernel_prelude(t: f64, x_prime: f64, r_prime: f64, partition: &Partition) -> Option<KernelEval> {
    if t < r_prime {
        return Some(KernelEval::atom(t, x_prime, r_prime, (x_prime, r_prime - t), partition));
    }
    if t == r_prime {
        return Some(KernelEval::atom(t, x_prime, r_prime, (x_prime, 0.0), partition));
    }
    None
}

/// `Q_t(x', r'; dx, dr)` for independent `A` and `D`.
#[allow(non_snake_case)]
pub fn eval_Q_uncoupled(spec: &ProcessSpec, t: f64, x_prime: f64, r_prime: f64, partition: &Partition) -> Result<KernelEval> {
    if spec.is_coupled() {
        return Err(SemiMarkovError::WrongKernel(
            "coupled specification: use eval_Q_coupled".into(),
        ));
    }
    spec.validate()?;
    let alpha = stable_index(&spec.subordinator)?;
    check_times(t, r_prime)?;
    if let Some(k) = kernel_prelude(t, x_prime, r_prime, partition) {
        return Ok(k);
    }
    let tau = t - r_prime;
    let (u_edges, h) = mixing_h(alpha, tau, &partition.r_edges)?;
    let (nx, nr, nu) = (partition.nx(), partition.nr(), u_edges.len() - 1);
    let xs = partition.shifted_x(x_prime);
    let mut ac_mass = vec![0.0; nx * nr];
    for c in 0..nu {
        let row = &h[c * nr..(c + 1) * nr];
        let u_mass: f64 = row.iter().sum();
        if u_mass == 0.0 {
            continue;
        }
        for i in 0..nx {
            let z = cell_average(u_edges[c], u_edges[c + 1], |u| outer_mass(&spec.outer, u, xs[i], xs[i + 1]))?;
            if z == 0.0 {
                continue;
            }
            for j in 0..nr {
                ac_mass[i * nr + j] += z * row[j];
            }
        }
    }
    Ok(KernelEval {
        t,
        x_prime,
        r_prime,
        atom_weight: 0.0,
        atom_location: (x_prime, r_prime - t),
        partition: partition.clone(),
        ac_mass,
    })
}

/// Refinement of r cells for the coupled spatial shift: finite cells are
/// split evenly, the overflow cell geometrically with a final point at infinity.
fn refine_r(r_edges: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut fine = vec![r_edges[0]];
    let mut owner = Vec::new();
    for j in 0..r_edges.len() - 1 {
        let (a, b) = (r_edges[j], r_edges[j + 1]);
        if b.is_finite() {
            for s in 1..=8 {
                fine.push(a + (b - a) * s as f64 / 8.0);
                owner.push(j);
            }
        } else {
            let mut v = a.max(1e-3);
            if v > a {
                fine.push(v);
                owner.push(j);
            }
            for _ in 0..48 {
                v *= 1.5;
                fine.push(v);
                owner.push(j);
            }
            fine.push(f64::INFINITY);
            owner.push(j);
        }
    }
    (fine, owner)
}

/// `Q_t(x', r'; dx, dr)` for the diagonal coupling `A = B + c D`: after the
/// last regeneration before `t` the position is `x' + B_{E} + c (tau + R)`.
#[allow(non_snake_case)]
pub fn eval_Q_coupled(spec: &ProcessSpec, t: f64, x_prime: f64, r_prime: f64, partition: &Partition) -> Result<KernelEval> {
    spec.validate()?;
    let c = spec.coupling_scale();
    let alpha = stable_index(&spec.subordinator)?;
    check_times(t, r_prime)?;
    if let Some(k) = kernel_prelude(t, x_prime, r_prime, partition) {
        return Ok(k);
    }
    let tau = t - r_prime;
    let (fine_r, owner) = refine_r(&partition.r_edges);
    let (u_edges, h) = mixing_h(alpha, tau, &fine_r)?;
    let (nx, nr, nu, nf) = (partition.nx(), partition.nr(), u_edges.len() - 1, fine_r.len() - 1);
    let xs = partition.shifted_x(x_prime);
    let mut ac_mass = vec![0.0; nx * nr];
    // representative remainder of each fine cell
    let r_mid: Vec<f64> = (0..nf)
        .map(|f| {
            let (a, b) = (fine_r[f], fine_r[f + 1]);
            if b.is_infinite() {
                f64::INFINITY
            } else if a > 0.0 && b / a > 1.2 {
                (a * b).sqrt()
            } else {
                0.5 * (a + b)
            }
        })
        .collect();
    for cu in 0..nu {
        let row = &h[cu * nf..(cu + 1) * nf];
        if row.iter().all(|&m| m == 0.0) {
            continue;
        }
        for f in 0..nf {
            if row[f] == 0.0 {
                continue;
            }
            let shift = if c == 0.0 { 0.0 } else { c * (tau + r_mid[f]) };
            for i in 0..nx {
                let (a, b) = (xs[i] - shift, xs[i + 1] - shift);
                let z = if shift.is_infinite() {
                    // jump to +-infinity: only an unbounded end cell catches it
                    let caught = (shift > 0.0 && xs[i + 1] == f64::INFINITY)
                        || (shift < 0.0 && xs[i] == f64::NEG_INFINITY);
                    if caught { 1.0 } else { 0.0 }
                } else {
                    cell_average(u_edges[cu], u_edges[cu + 1], |u| outer_mass(&spec.outer, u, a, b))?
                };
                ac_mass[i * nr + owner[f]] += z * row[f];
            }
        }
    }
    Ok(KernelEval {
        t,
        x_prime,
        r_prime,
        atom_weight: 0.0,
        atom_location: (x_prime, r_prime - t),
        partition: partition.clone(),
        ac_mass,
    })
}

/// `eval_Q_uncoupled` or `eval_Q_coupled` according to the coupling of `spec`.
#[allow(non_snake_case)]
pub fn eval_Q(spec: &ProcessSpec, t: f64, x_prime: f64, r_prime: f64, partition: &Partition) -> Result<KernelEval> {
    if spec.is_coupled() {
        eval_Q_coupled(spec, t, x_prime, r_prime, partition)
    } else {
        eval_Q_uncoupled(spec, t, x_prime, r_prime, partition)
    }
}

/// Outer processes whose law at fixed operational time is available.
pub fn supports_outer(outer: &OuterSpec) -> bool {
    matches!(outer, OuterSpec::Brownian { .. } | OuterSpec::StableSymmetric { .. } | OuterSpec::CompoundPoisson { .. })
}
