//! Residual checks of the governing equations in transform space.
//!
//! Each check evaluates both sides of an identity at fixed probe points,
//! either in closed form or by Monte Carlo over shared paths, and reports the
//! relative residual `|lhs - rhs| / (|lhs| + |rhs|)` with its error bar. A
//! Monte Carlo probe passes when the residual is below
//! `max(tolerance, 4 sigma)` and `4 sigma` is below the noise cap; wider error
//! bars make it inconclusive rather than passing.

pub mod ctrw;
pub mod error;
pub mod examples;
pub mod identities;
pub mod prop34;
pub mod report;

pub use ctrw::{ctrw_cdf, ctrw_ks_distances, limit_cdf, CtrwKs, CtrwKsOptions};
pub use error::{Result, VerifyError};
pub use examples::{example1_classical_gap, example1_grid, verify_examples_1d};
pub use identities::{
    cor33_rhs, h1_closed_form, probe_sets, residual_cor32, residual_cor32_analytic, residual_cor33,
    residual_theorem31, residual_theorem31_analytic, ProbePoint,
};
pub use prop34::{default_u_sequence, extrapolate_to_zero, verify_prop34, UEstimate};
pub use report::{Budget, Extrapolation, IdentityId, ProbeResidual, ResidualReport, Status, ANALYTIC_TOL};
