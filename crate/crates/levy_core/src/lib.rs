//! Process specifications and samplers for subordinated Levy processes.
//!
//! A pair `(A, D)` of an outer Levy process and a strictly increasing
//! subordinator defines the inverse `E_t = inf{u : D_u >= t}`, the remainder
//! `R_t = D_{E_t} - t` and the time-changed process `X_t = A_{E_t}`.

pub mod ctrw;
pub mod error;
pub mod parallel;
pub mod path;
pub mod quad;
pub mod sampling;
pub mod spec;
pub mod stats;

pub use ctrw::{sample_ctrw, WaitingLaw};
pub use error::{LevyError, Result};
pub use path::{invert_path, sample_fdd, sample_path, FddBatch, FddOptions, FddSample, PathSample, Readout};
pub use sampling::sample_stable_subordinator;
pub use spec::{
    phi_eval, psi_eval, xi_eval, Coupling, JointMeasure, JumpLaw, OuterSpec, ProcessSpec, SubSpec,
};
