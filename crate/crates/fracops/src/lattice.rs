//! Uniform tensor-product lattices and `f_k` distributions on the ordered simplex.

use crate::error::{FracError, Result};

/// Axis-aligned uniform grid: node `i` on axis `a` sits at `origin[a] + i * step[a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub origin: Vec<f64>,
    pub step: Vec<f64>,
    pub shape: Vec<usize>,
}

impl Grid {
    pub fn new(origin: Vec<f64>, step: Vec<f64>, shape: Vec<usize>) -> Result<Self> {
        let n = origin.len();
        if n == 0 || step.len() != n || shape.len() != n {
            return Err(FracError::Shape("origin, step and shape must share a nonzero length".into()));
        }
        if step.iter().any(|h| !(*h > 0.0) || !h.is_finite()) {
            return Err(FracError::Shape("steps must be positive and finite".into()));
        }
        if shape.contains(&0) {
            return Err(FracError::Shape("every axis needs at least one node".into()));
        }
        Ok(Grid { origin, step, shape })
    }

    /// `m` nodes per axis starting at 0 with step `h`.
    pub fn cube(dims: usize, h: f64, m: usize) -> Result<Self> {
        Grid::new(vec![0.0; dims], vec![h; dims], vec![m; dims])
    }

    pub fn dims(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major strides (last axis fastest).
    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dims()];
        for a in (0..self.dims().saturating_sub(1)).rev() {
            s[a] = s[a + 1] * self.shape[a + 1];
        }
        s
    }

    pub fn flat(&self, idx: &[usize]) -> usize {
        idx.iter().zip(self.strides()).map(|(i, s)| i * s).sum()
    }

    pub fn unflat(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dims()];
        for a in (0..self.dims()).rev() {
            idx[a] = flat % self.shape[a];
            flat /= self.shape[a];
        }
        idx
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.origin[axis] + i as f64 * self.step[axis]
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.unflat(flat)
            .iter()
            .enumerate()
            .map(|(a, &i)| self.coord(a, i))
            .collect()
    }

    pub fn upper(&self, axis: usize) -> f64 {
        self.coord(axis, self.shape[axis] - 1)
    }

    /// Common step when all axes share it.
    pub fn uniform_step(&self) -> Result<f64> {
        let h = self.step[0];
        if self.step.iter().all(|s| ((s - h) / h).abs() < 1e-12) {
            Ok(h)
        } else {
            Err(FracError::Shape(
                "directional operators need the same step on every axis".into(),
            ))
        }
    }

    /// Flat indices of every line parallel to `(1, ..., 1)`, each in increasing order.
    pub fn diagonal_lines(&self) -> Vec<Vec<usize>> {
        let diag: usize = self.strides().iter().sum();
        let mut lines = Vec::new();
        for start in 0..self.len() {
            let idx = self.unflat(start);
            if !idx.contains(&0) {
                continue;
            }
            let len = idx
                .iter()
                .zip(&self.shape)
                .map(|(i, m)| m - i)
                .min()
                .unwrap_or(0);
            lines.push((0..len).map(|m| start + m * diag).collect());
        }
        lines
    }

    /// Flat indices of every line along `axis`, in increasing order.
    pub fn axis_lines(&self, axis: usize) -> Vec<Vec<usize>> {
        let stride = self.strides()[axis];
        (0..self.len())
            .filter(|&f| self.unflat(f)[axis] == 0)
            .map(|start| (0..self.shape[axis]).map(|m| start + m * stride).collect())
            .collect()
    }
}

/// Values sampled on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeFunction {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl LatticeFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(FracError::Shape(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(LatticeFunction { grid, values })
    }

    pub fn from_fn<F: Fn(&[f64]) -> f64>(grid: Grid, f: F) -> Self {
        let values = (0..grid.len()).map(|i| f(&grid.point(i))).collect();
        LatticeFunction { grid, values }
    }

    /// One-dimensional lattice `f(j h)` for `j = 0..m`.
    pub fn line<F: Fn(f64) -> f64>(h: f64, m: usize, f: F) -> Result<Self> {
        Ok(Self::from_fn(Grid::new(vec![0.0], vec![h], vec![m])?, |x| f(x[0])))
    }

    pub fn dims(&self) -> usize {
        self.grid.dims()
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.values[self.grid.flat(idx)]
    }

    pub fn map_values<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        LatticeFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| f(*v)).collect(),
        }
    }

    /// Multilinear interpolation with zero extension below the grid and
    /// `NaN` (unknown) above it.
    pub fn interpolate(&self, p: &[f64]) -> f64 {
        let g = &self.grid;
        let n = g.dims();
        let mut base = vec![0usize; n];
        let mut frac = vec![0.0; n];
        for a in 0..n {
            let mut q = (p[a] - g.origin[a]) / g.step[a];
            let r = q.round();
            if (q - r).abs() < 1e-9 {
                q = r;
            }
            if q < 0.0 {
                return 0.0;
            }
            let top = (g.shape[a] - 1) as f64;
            if q > top {
                return f64::NAN;
            }
            let i = (q.floor() as usize).min(g.shape[a] - 1);
            base[a] = i;
            frac[a] = q - i as f64;
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << n) {
            let mut w = 1.0;
            let mut idx = base.clone();
            for a in 0..n {
                if corner >> a & 1 == 1 {
                    w *= frac[a];
                    idx[a] += 1;
                } else {
                    w *= 1.0 - frac[a];
                }
            }
            if w != 0.0 {
                acc += w * self.get(&idx);
            }
        }
        acc
    }

    /// Values on the hyperplane `x_0 = 0`, extrapolated linearly from the
    /// first two layers along axis 0.
    pub fn boundary_trace(&self) -> Result<LatticeFunction> {
        let g = &self.grid;
        if g.dims() < 2 || g.shape[0] < 2 {
            return Err(FracError::Shape("trace needs two layers and a second axis".into()));
        }
        let layer = g.strides()[0];
        let theta = g.origin[0] / g.step[0];
        let values = (0..layer)
            .map(|i| {
                let (f0, f1) = (self.values[i], self.values[i + layer]);
                f0 - theta * (f1 - f0)
            })
            .collect();
        let sub = Grid::new(g.origin[1..].to_vec(), g.step[1..].to_vec(), g.shape[1..].to_vec())?;
        LatticeFunction::new(sub, values)
    }
}

/// Measure `f(x_k) delta_{k^c - 1}(dx_{k^c}) dx_k` on the ordered simplex:
/// a density in the mobilized coordinates `k` (1-based, `k_1 = 1`), every
/// other coordinate tied to its predecessor.
#[derive(Debug, Clone, PartialEq)]
pub struct FkDistribution {
    pub n: usize,
    pub k: Vec<usize>,
    pub density: LatticeFunction,
}

impl FkDistribution {
    pub fn new(n: usize, k: Vec<usize>, density: LatticeFunction) -> Result<Self> {
        if k.first() != Some(&1) {
            return Err(FracError::Shape("k must start with 1".into()));
        }
        if k.windows(2).any(|w| w[1] <= w[0]) || *k.last().unwrap() > n {
            return Err(FracError::Shape(format!("k = {k:?} is not increasing within 1..={n}")));
        }
        if density.dims() != k.len() {
            return Err(FracError::Shape(format!(
                "density has {} axes for {} mobilized coordinates",
                density.dims(),
                k.len()
            )));
        }
        Ok(FkDistribution { n, k, density })
    }

    /// Full coordinate vector for a point given in the mobilized coordinates.
    pub fn embed(&self, xk: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        let mut j = 0;
        for i in 0..self.n {
            if j < self.k.len() && self.k[j] == i + 1 {
                x[i] = xk[j];
                j += 1;
            } else {
                x[i] = x[i - 1];
            }
        }
        x
    }

    /// Laplace variables seen by the density: `sigma_i = sum_{j = k_i}^{k_{i+1} - 1} s_j`.
    pub fn effective_s(&self, s: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.k.len());
        for (i, &ki) in self.k.iter().enumerate() {
            let end = self.k.get(i + 1).copied().unwrap_or(self.n + 1);
            out.push(s[ki - 1..end - 1].iter().sum());
        }
        out
    }

    pub fn with_density(&self, density: LatticeFunction) -> Self {
        FkDistribution {
            n: self.n,
            k: self.k.clone(),
            density,
        }
    }
}
