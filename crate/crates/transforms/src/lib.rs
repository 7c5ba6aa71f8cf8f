//! Transform-space machinery: Laplace transforms of lattice functions,
//! Monte Carlo estimators of Fourier-Laplace transforms of `E_t` and
//! `X_t = A_{E_t}` over ordered time vectors, fixed-Talbot inversion and the
//! Mittag-Leffler function.
//!
//! Conventions: `f^(s) = int exp(-<s, t>) f(t) dt` and
//! `f~(k) = int exp(-i <k, x>) f(x) dx`. Time-Laplace transforms of
//! finite-dimensional distributions integrate over `0 < t_1 < ... < t_n`.

pub mod error;
pub mod laplace;
pub mod mc;
pub mod mittag_leffler;
pub mod probe;
pub mod talbot;

pub use error::{Result, TransformError};
pub use laplace::{laplace_grid, laplace_line};
pub use mc::{
    estimate, mc_flt_x, mc_laplace_e, Combination, CoordWeight, Estimate, Functional, McOptions,
};
pub use mittag_leffler::mittag_leffler;
pub use probe::{Spatial, TransformProbe};
pub use talbot::{talbot_invert, talbot_invert_with, TalbotOptions};
