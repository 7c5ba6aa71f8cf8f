//! Grid implementations of Riemann-Liouville and Caputo derivatives, the
//! directional derivative on `f_k` distributions, directional fractional
//! derivatives, Levy-symbol operators and the shear conjugation.
//!
//! Functions are sampled on uniform lattices and extended by zero below the
//! grid origin. For a growing exponential `exp(<s, t>)` the operators act
//! (away from the origin) as multiplication by their symbols: `(sum s)^alpha`,
//! `sum s` and `phi(sum s)`.

pub mod cov;
pub mod error;
pub mod lattice;
pub mod ops;

pub use cov::{cov_apply, directional_pdo, Direction};
pub use error::{FracError, Result};
pub use lattice::{FkDistribution, Grid, LatticeFunction};
pub use ops::{
    caputo_deriv, directional_apply, directional_deriv, directional_frac_deriv, gl_weights,
    pdo_from_measure, rl_deriv, Op1d,
};
