//! The shear `T x' = (x'_1, x'_1 + x'_2, ..., x'_1 + x'_n)` and directional
//! operators obtained by conjugating a 1D operator with it.

use crate::error::{FracError, Result};
use crate::lattice::{Grid, LatticeFunction};
use crate::ops::{apply_on_lines, Op1d};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `(T f)(x') = f(T x')`.
    Forward,
    /// `(T^{-1} g)(x) = g(T^{-1} x)`.
    Inverse,
}

fn shear(p: &[f64], sign: f64) -> Vec<f64> {
    let mut q = p.to_vec();
    for v in q.iter_mut().skip(1) {
        *v += sign * p[0];
    }
    q
}

fn inside(grid: &Grid, p: &[f64]) -> bool {
    p.iter().enumerate().all(|(a, &x)| {
        let tol = 1e-9 * grid.step[a];
        x >= grid.origin[a] - tol && x <= grid.upper(a) + tol
    })
}

/// Resamples `f` under the shear onto `target`. The shear has unit
/// determinant, so no Jacobian factor enters. Target nodes whose preimage
/// falls below the source grid read zero, above it `NaN`.
pub fn cov_apply(direction: Direction, f: &LatticeFunction, target: &Grid) -> Result<LatticeFunction> {
    if target.dims() != f.dims() {
        return Err(FracError::Shape("target and source dimensions differ".into()));
    }
    let (pull, push) = match direction {
        Direction::Forward => (1.0, -1.0),
        Direction::Inverse => (-1.0, 1.0),
    };
    for (i, v) in f.values.iter().enumerate() {
        if *v != 0.0 && !v.is_nan() {
            let image = shear(&f.grid.point(i), push);
            if !inside(target, &image) {
                return Err(FracError::Coverage(format!(
                    "source support point {:?} maps to {:?}, outside the target grid",
                    f.grid.point(i),
                    image
                )));
            }
        }
    }
    Ok(LatticeFunction::from_fn(target.clone(), |p| f.interpolate(&shear(p, pull))))
}

/// `T^{-1} o op o T`: applies `op` along the first sheared coordinate, which
/// acts along `(1, ..., 1)` in the original coordinates.
pub fn directional_pdo(op: &Op1d, f: &LatticeFunction) -> Result<LatticeFunction> {
    op.validate()?;
    let g = &f.grid;
    let h = g.uniform_step()?;
    if g.origin.iter().any(|o| *o != 0.0) {
        return Err(FracError::Shape("directional_pdo expects a grid anchored at 0".into()));
    }
    let m0 = g.shape[0];
    let mut origin = vec![0.0];
    let mut shape = vec![m0];
    for a in 1..g.dims() {
        origin.push(-((m0 - 1) as f64) * h);
        shape.push(m0 - 1 + g.shape[a]);
    }
    let sheared = Grid::new(origin, vec![h; g.dims()], shape)?;
    let tf = cov_apply(Direction::Forward, f, &sheared)?;
    let applied = apply_on_lines(op, &tf, &sheared.axis_lines(0), h);
    // Every node of `g` pulls back inside `sheared`; values sheared past the
    // top of `g` are not needed, so no coverage check applies here.
    Ok(LatticeFunction::from_fn(g.clone(), |p| applied.interpolate(&shear(p, -1.0))))
}
