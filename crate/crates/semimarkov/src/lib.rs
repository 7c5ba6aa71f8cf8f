//! Semi-Markov description of CTRW limits `X_t = A_{E_t}`: the transition
//! kernels `H_t` of `(E_t, R_t)` and `Q_t` of `(X_t, R_t)`, occupation
//! measures, finite-dimensional distributions by kernel composition and the
//! remainder measure `K((-inf, x], [t, inf))`.

pub mod error;
pub mod fdd;
pub mod kernel;
pub mod occupation;
pub mod outer;
pub mod remainder;
pub mod stable;

pub use error::{Result, SemiMarkovError};
pub use fdd::{compose_fdd, FddComposition, FddGrid, KernelFamily};
pub use kernel::{eval_H, eval_Q, eval_Q_coupled, eval_Q_uncoupled, KernelEval, Partition};
pub use occupation::{occupation_clock, occupation_measure, ClockPair, LevyPair, OccupationOptions, OccupationQuery, Region};
pub use remainder::{k2_laplace, remainder_flt, remainder_measure};
pub use stable::OneSidedStable;
