use crate::error::{Result, TransformError};
use num_complex::Complex64;

/// Which spatial transform a probe carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spatial {
    /// `k` are Fourier variables, kernel `exp(-i <k, x>)`.
    Fourier,
    /// `k` holds Laplace variables `lambda`, kernel `exp(-<lambda, x>)`.
    Laplace,
}

/// A point in transform space with its estimated value.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformProbe {
    pub spatial: Spatial,
    pub k: Vec<f64>,
    pub s: Vec<f64>,
    pub value: Complex64,
    pub std_error: f64,
    /// Monte Carlo sample count; 0 for analytic values.
    pub n_samples: usize,
    pub seed: Option<u64>,
}

pub(crate) fn check_s(s: &[f64]) -> Result<()> {
    if s.is_empty() {
        return Err(TransformError::Domain("empty s-vector".into()));
    }
    if let Some(v) = s.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(TransformError::Domain(format!("Laplace variables must be > 0, got {v}")));
    }
    Ok(())
}

impl TransformProbe {
    pub fn analytic(spatial: Spatial, k: Vec<f64>, s: Vec<f64>, value: Complex64) -> Result<Self> {
        check_s(&s)?;
        Ok(TransformProbe {
            spatial,
            k,
            s,
            value,
            std_error: 0.0,
            n_samples: 0,
            seed: None,
        })
    }

    pub fn is_analytic(&self) -> bool {
        self.n_samples == 0
    }

    pub fn validate(&self) -> Result<()> {
        check_s(&self.s)?;
        if self.k.len() != self.s.len() {
            return Err(TransformError::Domain("k and s must have equal length".into()));
        }
        if !(self.std_error >= 0.0) {
            return Err(TransformError::Domain("std_error must be >= 0".into()));
        }
        if self.std_error == 0.0 && !self.is_analytic() {
            return Err(TransformError::Domain("Monte Carlo probe with zero std_error".into()));
        }
        Ok(())
    }
}
