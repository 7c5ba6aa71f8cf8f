//! Sampled trajectories of `(A, D)` and their first-passage readouts
//! `E_t = inf{u : D_u >= t}`, `R_t = D_{E_t} - t`, `X_t = A_{E_t}`.

use crate::error::{LevyError, Result};
use crate::parallel::{chunk_rng, map_chunks};
use crate::spec::ProcessSpec;
use rand::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct PathSample {
    pub op_grid: Vec<f64>,
    pub d_values: Vec<f64>,
    pub a_values: Vec<f64>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FddSample {
    pub times: Vec<f64>,
    pub e: Vec<f64>,
    pub r: Vec<f64>,
    pub x: Vec<f64>,
}

/// Which side of the regeneration jump `X_t` is read from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Readout {
    /// `X_t = A_{E_t}`.
    #[default]
    Overshoot,
    /// `X_t = A_{E_t -}`.
    LeftLimit,
}

fn check_grid(op_grid: &[f64]) -> Result<()> {
    if op_grid.is_empty() {
        return Err(LevyError::Argument("operational grid is empty".into()));
    }
    if op_grid[0] != 0.0 {
        return Err(LevyError::Argument(format!(
            "operational grid must start at 0, got {}",
            op_grid[0]
        )));
    }
    if op_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(LevyError::Argument(
            "operational grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(LevyError::Argument("no evaluation times".into()));
    }
    if times.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
        return Err(LevyError::Argument("times must be finite and >= 0".into()));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(LevyError::Argument("times must be sorted ascending".into()));
    }
    Ok(())
}

/// Samples `(A, D)` on `op_grid` with independent exact increments per cell.
pub fn sample_path(spec: &ProcessSpec, op_grid: &[f64], seed: u64) -> Result<PathSample> {
    spec.validate()?;
    check_grid(op_grid)?;
    let mut rng = chunk_rng(seed, 0);
    let mut d_values = Vec::with_capacity(op_grid.len());
    let mut a_values = Vec::with_capacity(op_grid.len());
    let (mut a, mut d) = (0.0, 0.0);
    d_values.push(d);
    a_values.push(a);
    for w in op_grid.windows(2) {
        let (da, dd) = spec.increment(w[1] - w[0], &mut rng);
        a += da;
        d += dd;
        d_values.push(d);
        a_values.push(a);
    }
    Ok(PathSample {
        op_grid: op_grid.to_vec(),
        d_values,
        a_values,
        seed,
    })
}

/// Grid first passage of `D` over each time.
pub fn invert_path(path: &PathSample, times: &[f64], readout: Readout) -> Result<FddSample> {
    check_times(times)?;
    let horizon = *path.d_values.last().unwrap_or(&0.0);
    let mut out = FddSample {
        times: times.to_vec(),
        e: Vec::with_capacity(times.len()),
        r: Vec::with_capacity(times.len()),
        x: Vec::with_capacity(times.len()),
    };
    let mut j = 0usize;
    for &t in times {
        if t > horizon {
            return Err(LevyError::Horizon { t, horizon });
        }
        while path.d_values[j] < t {
            j += 1;
        }
        out.e.push(path.op_grid[j]);
        out.r.push(path.d_values[j] - t);
        let k = match readout {
            Readout::LeftLimit if j > 0 => j - 1,
            _ => j,
        };
        out.x.push(path.a_values[k]);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FddOptions {
    /// Operational-time cell width of the first-passage grid.
    pub du: f64,
    pub readout: Readout,
    /// Safety cap on cells per path.
    pub max_cells: usize,
}

impl Default for FddOptions {
    fn default() -> Self {
        FddOptions {
            du: 2e-3,
            readout: Readout::Overshoot,
            max_cells: 50_000_000,
        }
    }
}

/// Row-major batch of i.i.d. FDD samples (`n_samples x times.len()`).
#[derive(Debug, Clone, PartialEq)]
pub struct FddBatch {
    pub times: Vec<f64>,
    pub seed: u64,
    pub e: Vec<f64>,
    pub r: Vec<f64>,
    pub x: Vec<f64>,
}

impl FddBatch {
    pub fn n_samples(&self) -> usize {
        if self.times.is_empty() {
            0
        } else {
            self.e.len() / self.times.len()
        }
    }

    pub fn sample(&self, i: usize) -> FddSample {
        let m = self.times.len();
        let rows = i * m..(i + 1) * m;
        FddSample {
            times: self.times.clone(),
            e: self.e[rows.clone()].to_vec(),
            r: self.r[rows.clone()].to_vec(),
            x: self.x[rows].to_vec(),
        }
    }

    pub fn e_column(&self, j: usize) -> Vec<f64> {
        self.e.iter().skip(j).step_by(self.times.len()).copied().collect()
    }

    pub fn r_column(&self, j: usize) -> Vec<f64> {
        self.r.iter().skip(j).step_by(self.times.len()).copied().collect()
    }

    pub fn x_column(&self, j: usize) -> Vec<f64> {
        self.x.iter().skip(j).step_by(self.times.len()).copied().collect()
    }
}

fn one_fdd<R: Rng + ?Sized>(
    spec: &ProcessSpec,
    times: &[f64],
    opts: &FddOptions,
    rng: &mut R,
    out: &mut FddBatch,
) -> Result<()> {
    let sub = spec.subordinator;
    let c = spec.coupling_scale();
    let (mut d, mut d_prev) = (0.0f64, 0.0f64);
    let mut cells = 0usize;
    let (mut e_prev, mut b) = (0.0f64, 0.0f64);
    for &t in times {
        while d < t {
            if cells >= opts.max_cells {
                return Err(LevyError::Horizon { t, horizon: d });
            }
            d_prev = d;
            d += sub.increment(opts.du, rng);
            cells += 1;
        }
        let e = cells as f64 * opts.du;
        b += spec.outer.increment(e - e_prev, rng);
        e_prev = e;
        let jump_part = match opts.readout {
            Readout::Overshoot => d,
            Readout::LeftLimit => d_prev,
        };
        out.e.push(e);
        out.r.push(d - t);
        out.x.push(b + c * jump_part);
    }
    Ok(())
}

/// `n_samples` i.i.d. joint draws of `(E, R, X)` at `times`. Paths are grown
/// lazily on a uniform operational grid until they pass the last time.
pub fn sample_fdd(
    spec: &ProcessSpec,
    times: &[f64],
    n_samples: usize,
    seed: u64,
    opts: &FddOptions,
) -> Result<FddBatch> {
    spec.validate()?;
    check_times(times)?;
    if n_samples == 0 {
        return Err(LevyError::Argument("n_samples must be >= 1".into()));
    }
    if !(opts.du > 0.0) {
        return Err(LevyError::Argument(format!("du must be > 0, got {}", opts.du)));
    }
    let parts = map_chunks(n_samples, seed, |range, rng| {
        let mut part = FddBatch {
            times: Vec::new(),
            seed,
            e: Vec::with_capacity(range.len() * times.len()),
            r: Vec::with_capacity(range.len() * times.len()),
            x: Vec::with_capacity(range.len() * times.len()),
        };
        for _ in range {
            one_fdd(spec, times, opts, rng, &mut part)?;
        }
        Ok(part)
    });
    let mut batch = FddBatch {
        times: times.to_vec(),
        seed,
        e: Vec::with_capacity(n_samples * times.len()),
        r: Vec::with_capacity(n_samples * times.len()),
        x: Vec::with_capacity(n_samples * times.len()),
    };
    for part in parts {
        let part: FddBatch = part?;
        batch.e.extend(part.e);
        batch.r.extend(part.r);
        batch.x.extend(part.x);
    }
    Ok(batch)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn manual_path(op_grid: Vec<f64>, d_values: Vec<f64>) -> PathSample {
        let n = op_grid.len();
        PathSample {
            op_grid,
            d_values,
            a_values: (0..n).map(|i| i as f64).collect(),
            seed: 0,
        }
    }

    #[test]
    fn linear_path_inverts_exactly() {
        let grid: Vec<f64> = (0..=100).map(|i| i as f64 * 0.01).collect();
        let d = grid.iter().map(|u| 2.0 * u).collect();
        let f = invert_path(&manual_path(grid, d), &[1.0], Readout::Overshoot).unwrap();
        assert!((f.e[0] - 0.5).abs() < 1e-12);
        assert!(f.r[0].abs() < 1e-12);
    }

    #[test]
    fn step_path_inverts_to_jump_time() {
        let grid = vec![0.0, 0.1, 0.2, 0.3];
        let d = vec![0.0, 0.0, 3.0, 3.0];
        let f = invert_path(&manual_path(grid, d), &[1.0], Readout::Overshoot).unwrap();
        assert_eq!(f.e[0], 0.2);
        assert_eq!(f.r[0], 2.0);
        assert_eq!(f.x[0], 2.0);
        let g = invert_path(
            &manual_path(vec![0.0, 0.1, 0.2, 0.3], vec![0.0, 0.0, 3.0, 3.0]),
            &[1.0],
            Readout::LeftLimit,
        )
        .unwrap();
        assert_eq!(g.x[0], 1.0);
    }

    #[test]
    fn horizon_error() {
        let p = manual_path(vec![0.0, 1.0], vec![0.0, 1.0]);
        assert!(matches!(
            invert_path(&p, &[2.0], Readout::Overshoot),
            Err(LevyError::Horizon { .. })
        ));
    }

    #[test]
    fn empty_grid_rejected() {
        let spec = ProcessSpec::brownian_stable(0.5);
        assert!(matches!(
            sample_path(&spec, &[], 1),
            Err(LevyError::Argument(_))
        ));
    }

    #[test]
    fn path_basics_and_determinism() {
        let spec = ProcessSpec::brownian_stable(0.5);
        let grid: Vec<f64> = (0..=1000).map(|i| i as f64 * 1e-3).collect();
        let p = sample_path(&spec, &grid, 9).unwrap();
        assert_eq!(p.a_values[0], 0.0);
        assert!(p.d_values.windows(2).all(|w| w[1] >= w[0]));
        assert_eq!(p, sample_path(&spec, &grid, 9).unwrap());
        assert_ne!(p.d_values, sample_path(&spec, &grid, 10).unwrap().d_values);
    }

    #[test]
    fn fdd_monotone_and_nonnegative() {
        let spec = ProcessSpec::brownian_stable(0.5);
        let b = sample_fdd(&spec, &[1.0, 2.0], 2000, 4, &FddOptions::default()).unwrap();
        assert_eq!(b.n_samples(), 2000);
        for i in 0..b.n_samples() {
            let s = b.sample(i);
            assert!(s.e[0] <= s.e[1]);
            assert!(s.r.iter().all(|r| *r >= 0.0));
        }
    }

    #[test]
    fn fdd_rejects_unsorted_times() {
        let spec = ProcessSpec::brownian_stable(0.5);
        assert!(sample_fdd(&spec, &[2.0, 1.0], 10, 0, &FddOptions::default()).is_err());
        assert!(sample_fdd(&spec, &[1.0], 0, 0, &FddOptions::default()).is_err());
    }
}
