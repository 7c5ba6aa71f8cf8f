//! Run configuration: a flat TOML document with one table per command.
//!
//! ```toml
//! seed = 7
//! output_dir = "out"
//!
//! [process]
//! outer = "brownian"
//! alpha = 0.5
//! coupling = 1.0
//!
//! [verify]
//! check = "thm31"
//! times = 1
//! ```
//!
//! Every key is optional; unknown keys are rejected.

use crate::error::{CliError, Result};
use levy_core::{JumpLaw, OuterSpec, ProcessSpec, Readout, SubSpec};
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    Simulate,
    Kernel,
    Transform,
    Verify,
    Ml,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<CommandKind>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub process: ProcessConfig,
    #[serde(default)]
    pub simulate: SimulateConfig,
    #[serde(default)]
    pub kernel: KernelConfig,
    #[serde(default)]
    pub transform: TransformConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub ml: MlConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OuterKind {
    Brownian,
    Stable,
    CompoundPoisson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubKind {
    Stable,
    Truncated,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProcessConfig {
    pub outer: OuterKind,
    pub drift: f64,
    pub diffusivity: f64,
    /// Stability index and scale of a symmetric stable outer process.
    pub index: f64,
    pub scale: f64,
    /// Compound Poisson rate and normal jump law.
    pub rate: f64,
    pub jump_mean: f64,
    pub jump_sd: f64,
    pub subordinator: SubKind,
    pub alpha: f64,
    pub cutoff: f64,
    /// Diagonal coupling scale; absent means uncoupled.
    pub coupling: Option<f64>,
}

impl Default for ProcessConfig {
    fn default() -> Self {
        ProcessConfig {
            outer: OuterKind::Brownian,
            drift: 0.0,
            diffusivity: 1.0,
            index: 2.0,
            scale: 1.0,
            rate: 1.0,
            jump_mean: 0.0,
            jump_sd: 1.0,
            subordinator: SubKind::Stable,
            alpha: 0.5,
            cutoff: 1.0,
            coupling: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReadoutKind {
    Overshoot,
    LeftLimit,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    pub times: Vec<f64>,
    pub n: usize,
    pub du: f64,
    pub readout: ReadoutKind,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig { times: vec![1.0], n: 1000, du: 2e-3, readout: ReadoutKind::Overshoot }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    /// Kernel of `(E_t, R_t)`.
    H,
    /// Kernel of `(X_t, R_t)`.
    Q,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelConfig {
    pub family: KernelKind,
    pub t: f64,
    pub x_prime: f64,
    pub r_prime: f64,
    pub x_lo: f64,
    pub x_hi: f64,
    pub nx: usize,
    pub r_max: f64,
    pub nr: usize,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            family: KernelKind::H,
            t: 1.0,
            x_prime: 0.0,
            r_prime: 0.0,
            x_lo: 0.0,
            x_hi: 4.0,
            nx: 16,
            r_max: 4.0,
            nr: 16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SpatialKind {
    /// Laplace transform in `E`.
    Laplace,
    /// Fourier transform in `X`.
    Fourier,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransformConfig {
    pub spatial: SpatialKind,
    pub k: Vec<f64>,
    pub s: Vec<f64>,
    pub n_paths: usize,
    pub du: f64,
}

impl Default for TransformConfig {
    fn default() -> Self {
        TransformConfig { spatial: SpatialKind::Laplace, k: vec![1.0], s: vec![1.0], n_paths: 100_000, du: 0.01 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Laplace identity for the inverse subordinator.
    Thm31,
    /// Uncoupled Fourier-Laplace identity.
    Cor32,
    /// Coupled Fourier-Laplace identity.
    Cor33,
    /// Remainder limit of the first-passage law.
    Prop34,
    /// One-dimensional stable examples.
    Examples,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    pub k: Vec<f64>,
    pub s: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub check: CheckKind,
    /// Number of time coordinates of the built-in probe set.
    pub times: usize,
    pub probes: Option<Vec<ProbeConfig>>,
    /// 0 evaluates the closed forms only, where they exist.
    pub n_paths: usize,
    pub tolerance: f64,
    pub window: f64,
    pub noise_cap: f64,
    /// Remainder-limit arguments.
    pub x: f64,
    pub t: f64,
    pub alphas: Vec<f64>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            check: CheckKind::Thm31,
            times: 1,
            probes: None,
            n_paths: 100_000,
            tolerance: 0.05,
            window: 0.08,
            noise_cap: 0.25,
            x: 10.0,
            t: 1.0,
            alphas: vec![0.5],
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MlConfig {
    pub z: Vec<f64>,
}

impl Default for MlConfig {
    fn default() -> Self {
        MlConfig { z: vec![-1.0] }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(config_error_message(&e)))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Checks every field before any computation.
    pub fn validate(&self) -> Result<()> {
        self.process.to_spec()?;
        let s = &self.simulate;
        times("simulate.times", &s.times)?;
        positive_count("simulate.n", s.n)?;
        positive("simulate.du", s.du)?;
        let k = &self.kernel;
        positive("kernel.t", k.t)?;
        nonneg("kernel.r_prime", k.r_prime)?;
        finite("kernel.x_prime", k.x_prime)?;
        finite("kernel.x_lo", k.x_lo)?;
        if !(k.x_hi > k.x_lo) || !k.x_hi.is_finite() {
            return Err(key("kernel.x_hi", "must be finite and above kernel.x_lo"));
        }
        positive_count("kernel.nx", k.nx)?;
        positive("kernel.r_max", k.r_max)?;
        positive_count("kernel.nr", k.nr)?;
        let t = &self.transform;
        if t.k.is_empty() || t.k.len() > 3 || t.k.len() != t.s.len() {
            return Err(key("transform.k", "needs 1 to 3 entries, one per entry of transform.s"));
        }
        for v in &t.s {
            positive("transform.s", *v)?;
        }
        for v in &t.k {
            if t.spatial == SpatialKind::Laplace {
                nonneg("transform.k", *v)?;
            } else {
                finite("transform.k", *v)?;
            }
        }
        if t.n_paths < 2 {
            return Err(key("transform.n_paths", "must be at least 2"));
        }
        positive("transform.du", t.du)?;
        let v = &self.verify;
        if !(1..=2).contains(&v.times) {
            return Err(key("verify.times", "must be 1 or 2"));
        }
        if let Some(ps) = &v.probes {
            if ps.is_empty() {
                return Err(key("verify.probes", "must not be empty"));
            }
            for p in ps {
                if p.k.is_empty() || p.k.len() != p.s.len() {
                    return Err(key("verify.probes", "each probe needs k and s of equal, nonzero length"));
                }
            }
        }
        if v.n_paths == 1 {
            return Err(key("verify.n_paths", "must be 0 or at least 2"));
        }
        positive("verify.tolerance", v.tolerance)?;
        positive("verify.window", v.window)?;
        positive("verify.noise_cap", v.noise_cap)?;
        finite("verify.x", v.x)?;
        positive("verify.t", v.t)?;
        if v.alphas.is_empty() || v.alphas.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
            return Err(key("verify.alphas", "must be a nonempty list in (0, 1)"));
        }
        if self.ml.z.is_empty() || self.ml.z.iter().any(|z| !(*z <= 0.0) || !z.is_finite()) {
            return Err(key("ml.z", "must be a nonempty list of finite values <= 0"));
        }
        Ok(())
    }
}

impl ProcessConfig {
    pub fn to_spec(&self) -> Result<ProcessSpec> {
        let outer = match self.outer {
            OuterKind::Brownian => {
                finite("process.drift", self.drift)?;
                nonneg("process.diffusivity", self.diffusivity)?;
                OuterSpec::Brownian { drift: self.drift, diffusivity: self.diffusivity }
            }
            OuterKind::Stable => {
                if !(self.index > 0.0 && self.index <= 2.0) {
                    return Err(key("process.index", "must lie in (0, 2]"));
                }
                positive("process.scale", self.scale)?;
                OuterSpec::StableSymmetric { index: self.index, scale: self.scale }
            }
            OuterKind::CompoundPoisson => {
                positive("process.rate", self.rate)?;
                finite("process.jump_mean", self.jump_mean)?;
                nonneg("process.jump_sd", self.jump_sd)?;
                OuterSpec::CompoundPoisson {
                    rate: self.rate,
                    jumps: JumpLaw::Normal { mean: self.jump_mean, sd: self.jump_sd },
                }
            }
        };
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(key("process.alpha", "must lie in (0, 1)"));
        }
        let sub = match self.subordinator {
            SubKind::Stable => SubSpec::StandardStable { alpha: self.alpha },
            SubKind::Truncated => {
                positive("process.cutoff", self.cutoff)?;
                SubSpec::TruncatedStable { alpha: self.alpha, cutoff: self.cutoff }
            }
        };
        let spec = match self.coupling {
            None => ProcessSpec::uncoupled(outer, sub),
            Some(c) => {
                finite("process.coupling", c)?;
                ProcessSpec::diagonal(outer, sub, c)
            }
        };
        spec.validate().map_err(|e| key("process", &e.to_string()))?;
        Ok(spec)
    }
}

impl ReadoutKind {
    pub fn readout(self) -> Readout {
        match self {
            ReadoutKind::Overshoot => Readout::Overshoot,
            ReadoutKind::LeftLimit => Readout::LeftLimit,
        }
    }
}

fn key(name: &str, msg: &str) -> CliError {
    CliError::Config(format!("{name}: {msg}"))
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() { Ok(()) } else { Err(key(name, &format!("must be finite, got {v}"))) }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() { Ok(()) } else { Err(key(name, &format!("must be positive and finite, got {v}"))) }
}

fn nonneg(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() { Ok(()) } else { Err(key(name, &format!("must be >= 0 and finite, got {v}"))) }
}

fn positive_count(name: &str, v: usize) -> Result<()> {
    if v > 0 { Ok(()) } else { Err(key(name, "must be at least 1")) }
}

fn times(name: &str, t: &[f64]) -> Result<()> {
    if t.is_empty() || t.iter().any(|v| !(*v > 0.0) || !v.is_finite()) || t.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(key(name, "must be a nonempty, strictly increasing list of positive times"));
    }
    Ok(())
}

/// Parser message (which quotes the offending key) with its byte offset.
fn config_error_message(e: &toml::de::Error) -> String {
    e.message().trim().to_string()
        + &e.span().map(|s| format!(" (at byte {})", s.start)).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_the_default() {
        let c = RunConfig::parse("").unwrap();
        c.validate().unwrap();
        assert_eq!(c.process.to_spec().unwrap(), ProcessSpec::brownian_stable(0.5));
    }

    #[test]
    fn unknown_keys_are_named() {
        let err = RunConfig::parse("[process]\nalpah = 0.5\n").unwrap_err().to_string();
        assert!(err.contains("alpah"), "{err}");
        let err = RunConfig::parse("sead = 1\n").unwrap_err().to_string();
        assert!(err.contains("sead"), "{err}");
    }

    #[test]
    fn range_errors_name_the_key() {
        let c = RunConfig::parse("[process]\nalpha = 1.5\n").unwrap();
        assert!(c.validate().unwrap_err().to_string().contains("process.alpha"));
        let c = RunConfig::parse("[simulate]\ntimes = [2.0, 1.0]\n").unwrap();
        assert!(c.validate().unwrap_err().to_string().contains("simulate.times"));
        let c = RunConfig::parse("[transform]\nk = [1.0, 2.0]\n").unwrap();
        assert!(c.validate().unwrap_err().to_string().contains("transform.k"));
    }

    #[test]
    fn coupled_truncated_spec() {
        let c = RunConfig::parse("[process]\nsubordinator = \"truncated\"\ncutoff = 0.1\ncoupling = 2.0\n").unwrap();
        let spec = c.process.to_spec().unwrap();
        assert!(spec.is_coupled());
        assert_eq!(spec.subordinator, SubSpec::TruncatedStable { alpha: 0.5, cutoff: 0.1 });
    }
}
