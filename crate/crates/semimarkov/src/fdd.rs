//! Finite-dimensional distributions by Chapman-Kolmogorov composition of
//! the kernels `H` or `Q`, started at `(x', r') = (0, 0)`.
//!
//! Positions live on cells of width `h` centred at `i h`; the remainder lives
//! on cells of width `dr`, which must divide every gap `t_{i+1} - t_i`, plus
//! an overflow cell `r >= t_n - t_i` from which no regeneration can occur
//! before `t_n`. Between two times the process either regenerates (a.c.
//! kernel part, the coordinate is mobilized) or keeps its position (atom),
//! so the result splits by mobilization pattern `k` into `f_k` distributions.

use crate::error::{Result, SemiMarkovError};
use crate::kernel::{eval_H, eval_Q, KernelEval, Partition};
use fracops::{FkDistribution, Grid, LatticeFunction};
use levy_core::{ProcessSpec, SubSpec};
use std::collections::BTreeMap;

/// Which Markov pair is composed: `(E_t, R_t)` or `(X_t, R_t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelFamily {
    H(SubSpec),
    Q(ProcessSpec),
}

impl KernelFamily {
    fn eval(&self, t: f64, r_prime: f64, partition: &Partition) -> Result<KernelEval> {
        match self {
            KernelFamily::H(sub) => eval_H(sub, t, 0.0, r_prime, partition),
            KernelFamily::Q(spec) => eval_Q(spec, t, 0.0, r_prime, partition),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FddGrid {
    /// Position cell width; cell `i` is `[(i - 1/2) h, (i + 1/2) h)`.
    pub h: f64,
    pub i_lo: i64,
    pub i_hi: i64,
    /// Remainder cell width.
    pub dr: f64,
    /// Largest number of times accepted.
    pub max_n: usize,
}

impl FddGrid {
    pub fn new(h: f64, i_lo: i64, i_hi: i64, dr: f64) -> Result<Self> {
        if !(h > 0.0) || !(dr > 0.0) || i_hi < i_lo || i_lo > 0 || i_hi < 0 {
            return Err(SemiMarkovError::Domain("need h, dr > 0 and i_lo <= 0 <= i_hi".into()));
        }
        Ok(FddGrid { h, i_lo, i_hi, dr, max_n: 3 })
    }

    pub fn nx(&self) -> usize {
        (self.i_hi - self.i_lo + 1) as usize
    }

    pub fn center(&self, c: usize) -> f64 {
        (self.i_lo + c as i64) as f64 * self.h
    }

    /// Cell edges in `x`.
    pub fn edges(&self) -> Vec<f64> {
        (0..=self.nx()).map(|c| (self.i_lo as f64 + c as f64 - 0.5) * self.h).collect()
    }
}

/// Mixture of `f_k` distributions resolving the FDD by mobilization pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct FddComposition {
    pub times: Vec<f64>,
    pub grid: FddGrid,
    pub components: Vec<FkDistribution>,
    /// Mass that left the position window.
    pub lost_mass: f64,
}

impl FddComposition {
    pub fn component_mass(&self, idx: usize) -> f64 {
        let d = &self.components[idx].density;
        d.values.iter().sum::<f64>() * self.grid.h.powi(d.dims() as i32)
    }

    pub fn total_mass(&self) -> f64 {
        (0..self.components.len()).map(|i| self.component_mass(i)).sum()
    }

    /// Mass of the component with pattern `k`, 0 if absent.
    pub fn pattern_mass(&self, k: &[usize]) -> f64 {
        self.components
            .iter()
            .position(|c| c.k == k)
            .map_or(0.0, |i| self.component_mass(i))
    }

    /// Cell masses of coordinate `i` (0-based) summed over all patterns.
    pub fn marginal(&self, i: usize) -> Vec<f64> {
        let nx = self.grid.nx();
        let cell = self.grid.h;
        let mut out = vec![0.0; nx];
        for comp in &self.components {
            // the coordinate follows the last mobilized one at or before it
            let axis = comp.k.iter().rposition(|&k| k <= i + 1).unwrap();
            let d = comp.k.len();
            let strides = comp.density.grid.strides();
            let vol = cell.powi(d as i32);
            for (flat, v) in comp.density.values.iter().enumerate() {
                out[(flat / strides[axis]) % nx] += v * vol;
            }
        }
        out
    }
}

/// Kernel masses indexed `[displacement cell][r cell]` with displacements
/// `l = 0..2 nx - 1` meaning `l - (nx - 1)` cells.
struct StepKernel {
    masses: Vec<f64>,
    nr: usize,
    /// Mass displaced beyond every representable cell.
    tail: f64,
}

fn step_kernel(family: &KernelFamily, t: f64, r_prime: &[(f64, f64)], grid: &FddGrid, r_edges: &[f64]) -> Result<StepKernel> {
    let nx = grid.nx() as i64;
    let mut x_edges: Vec<f64> = (-(nx - 1)..=nx).map(|l| (l as f64 - 0.5) * grid.h).collect();
    x_edges.insert(0, f64::NEG_INFINITY);
    x_edges.push(f64::INFINITY);
    let partition = Partition::new(x_edges, r_edges.to_vec())?;
    let nr = partition.nr();
    let nd = 2 * nx as usize - 1;
    let mut masses = vec![0.0; nd * nr];
    let mut tail = 0.0;
    for &(rp, weight) in r_prime {
        let k = family.eval(t, rp, &partition)?;
        for j in 0..nr {
            tail += weight * (k.mass(0, j) + k.mass(nd + 1, j));
        }
        // drop the two unbounded end cells
        for l in 0..nd {
            for j in 0..nr {
                masses[l * nr + j] += weight * k.mass(l + 1, j);
            }
        }
    }
    Ok(StepKernel { masses, nr, tail })
}

fn check_grid_times(times: &[f64], grid: &FddGrid) -> Result<Vec<usize>> {
    if times.is_empty() || times.len() > grid.max_n {
        return Err(SemiMarkovError::Size(format!(
            "grid composition handles 1..={} times, got {}; cost grows like grid^(2n)",
            grid.max_n,
            times.len()
        )));
    }
    if !(times[0] > 0.0) || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(SemiMarkovError::Domain("times must be positive and increasing".into()));
    }
    let mut cells = Vec::new();
    for w in times.windows(2) {
        let m = (w[1] - w[0]) / grid.dr;
        if (m - m.round()).abs() > 1e-9 * m.max(1.0) {
            return Err(SemiMarkovError::Domain(format!("dr = {} does not divide the gap {}", grid.dr, w[1] - w[0])));
        }
        cells.push(m.round() as usize);
    }
    Ok(cells)
}

/// Remainder edges after time `t_i`: `dr`-cells up to the remaining span, then overflow.
fn r_edges(span_cells: usize, dr: f64) -> Vec<f64> {
    let mut e: Vec<f64> = (0..=span_cells).map(|j| j as f64 * dr).collect();
    e.push(f64::INFINITY);
    e
}

/// State after a step: per pattern, masses over (mobilized cells..., r cell).
type State = BTreeMap<Vec<usize>, Vec<f64>>;

/// `P(X_{t_1} in dx_1, ..., X_{t_n} in dx_n)` from `(0, 0)` by iterated composition.
pub fn compose_fdd(family: &KernelFamily, times: &[f64], grid: &FddGrid) -> Result<FddComposition> {
    let gaps = check_grid_times(times, grid)?;
    let n = times.len();
    let nx = grid.nx();
    let origin = (-grid.i_lo) as usize;
    let span_after = |i: usize| -> usize { gaps[i..].iter().sum() };
    let mut lost = 0.0;

    // first step from the exact start r' = 0
    let edges0 = if n == 1 { vec![0.0, f64::INFINITY] } else { r_edges(span_after(0), grid.dr) };
    let k0 = step_kernel(family, times[0], &[(0.0, 1.0)], grid, &edges0)?;
    let nr0 = k0.nr;
    lost += k0.tail;
    let mut state: State = BTreeMap::new();
    let mut first = vec![0.0; nx * nr0];
    for l in 0..2 * nx - 1 {
        let c = origin as i64 + l as i64 - (nx as i64 - 1);
        for j in 0..nr0 {
            let m = k0.masses[l * nr0 + j];
            if c >= 0 && (c as usize) < nx {
                first[c as usize * nr0 + j] += m;
            } else {
                lost += m;
            }
        }
    }
    state.insert(vec![1], first);
    let mut nr_prev = nr0;

    let g = 0.5 / 3f64.sqrt();
    for step in 1..n {
        let m = gaps[step - 1];
        let gap = times[step] - times[step - 1];
        let edges = if step + 1 == n { vec![0.0, f64::INFINITY] } else { r_edges(span_after(step), grid.dr) };
        let nr = edges.len() - 1;
        let overflow_prev = nr_prev - 1;
        // regeneration kernels for r' in cell j < m, averaged over the cell
        let kernels: Vec<StepKernel> = (0..m)
            .map(|j| {
                let pts = [((j as f64 + 0.5 - g) * grid.dr, 0.5), ((j as f64 + 0.5 + g) * grid.dr, 0.5)];
                step_kernel(family, gap, &pts, grid, &edges)
            })
            .collect::<Result<_>>()?;
        let mut next: State = BTreeMap::new();
        for (pattern, masses) in &state {
            let prefix_cells = masses.len() / (nx * nr_prev);
            let mut stay = vec![0.0; prefix_cells * nx * nr];
            // atoms: no regeneration in the gap
            for block in 0..prefix_cells * nx {
                for j in 0..nr_prev {
                    let p = masses[block * nr_prev + j];
                    if p == 0.0 || j < m {
                        continue;
                    }
                    let jn = if j == overflow_prev { nr - 1 } else { (j - m).min(nr - 1) };
                    stay[block * nr + jn] += p;
                }
            }
            // patterns stay distinct: only the moved ones contain step + 1
            next.insert(pattern.clone(), stay);
            let mut moved = pattern.clone();
            moved.push(step + 1);
            let mut out = vec![0.0; prefix_cells * nx * nx * nr];
            for block in 0..prefix_cells * nx {
                let c = block % nx;
                for j in 0..m.min(nr_prev) {
                    let p = masses[block * nr_prev + j];
                    if p == 0.0 || j == overflow_prev {
                        continue;
                    }
                    let kj = &kernels[j];
                    lost += p * kj.tail;
                    for l in 0..2 * nx - 1 {
                        let cn = c as i64 + l as i64 - (nx as i64 - 1);
                        let row = &kj.masses[l * nr..(l + 1) * nr];
                        if cn < 0 || cn as usize >= nx {
                            lost += p * row.iter().sum::<f64>();
                            continue;
                        }
                        let base = (block * nx + cn as usize) * nr;
                        for (jn, &q) in row.iter().enumerate() {
                            out[base + jn] += p * q;
                        }
                    }
                }
            }
            next.insert(moved, out);
        }
        state = next;
        nr_prev = nr;
    }

    let mut components = Vec::new();
    let vol = |d: usize| grid.h.powi(d as i32);
    for (pattern, masses) in state {
        let d = pattern.len();
        let values: Vec<f64> = masses.chunks(nr_prev).map(|r| r.iter().sum::<f64>() / vol(d)).collect();
        if values.iter().all(|&v| v == 0.0) {
            continue;
        }
        let lattice = LatticeFunction::new(
            Grid::new(vec![grid.i_lo as f64 * grid.h; d], vec![grid.h; d], vec![nx; d])?,
            values,
        )?;
        components.push(FkDistribution::new(n, pattern, lattice)?);
    }
    Ok(FddComposition {
        times: times.to_vec(),
        grid: *grid,
        components,
        lost_mass: lost,
    })
}
