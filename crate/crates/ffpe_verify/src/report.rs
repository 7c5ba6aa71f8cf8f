use std::fmt::Write as _;
use transforms::{McOptions, TransformProbe};

/// Tolerance for residuals that involve no sampling.
pub const ANALYTIC_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IdentityId {
    Thm31,
    Cor32,
    Cor33,
    Prop34,
    Ex1d,
}

impl IdentityId {
    pub fn as_str(&self) -> &'static str {
        match self {
            IdentityId::Thm31 => "THM31",
            IdentityId::Cor32 => "COR32",
            IdentityId::Cor33 => "COR33",
            IdentityId::Prop34 => "PROP34",
            IdentityId::Ex1d => "EX1D",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Error bars too wide to decide.
    Inconclusive,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        }
    }
}

/// Sampling budget and decision thresholds of a Monte Carlo check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    pub n_paths: usize,
    pub mc: McOptions,
    /// Boundary window `delta`; `delta / 2` must be a multiple of `mc.du`.
    pub window: f64,
    /// Relative tolerance of Monte Carlo residuals.
    pub tolerance: f64,
    /// Largest acceptable `4 sigma`; beyond it a probe is inconclusive.
    pub noise_cap: f64,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            n_paths: 100_000,
            mc: McOptions::default(),
            window: 0.08,
            tolerance: 0.05,
            noise_cap: 0.25,
            seed: 1,
        }
    }
}

impl Budget {
    pub fn with_paths(mut self, n: usize) -> Self {
        self.n_paths = n;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }
}

/// One checked identity at one probe point.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeResidual {
    pub label: String,
    pub lhs: TransformProbe,
    pub rhs: TransformProbe,
    /// `|lhs - rhs| / (|lhs| + |rhs|)`.
    pub residual: f64,
    /// Standard error of `lhs - rhs` on the same relative scale.
    pub sigma: f64,
    pub tolerance: f64,
    pub status: Status,
}

impl ProbeResidual {
    /// Judges a probe: `sigma = 0` means an analytic comparison at `ANALYTIC_TOL`,
    /// otherwise the residual must stay below `max(tolerance, 4 sigma)` and
    /// `4 sigma` below the noise cap.
    pub fn judge(label: String, lhs: TransformProbe, rhs: TransformProbe, diff_se: f64, tolerance: f64, noise_cap: f64) -> Self {
        let scale = lhs.value.norm() + rhs.value.norm();
        let diff = (lhs.value - rhs.value).norm();
        let (residual, sigma) = if scale > 0.0 { (diff / scale, diff_se / scale) } else { (0.0, 0.0) };
        let (tolerance, status) = if diff_se == 0.0 {
            let ok = residual < ANALYTIC_TOL;
            (ANALYTIC_TOL, if ok { Status::Pass } else { Status::Fail })
        } else if 4.0 * sigma > noise_cap {
            (tolerance, Status::Inconclusive)
        } else if residual <= tolerance.max(4.0 * sigma) {
            (tolerance, Status::Pass)
        } else {
            (tolerance, Status::Fail)
        };
        ProbeResidual {
            label,
            lhs,
            rhs,
            residual,
            sigma,
            tolerance,
            status,
        }
    }
}

/// Limit estimate obtained by extrapolation, with its own verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolation {
    pub value: f64,
    pub std_error: f64,
    pub target: f64,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub identity: IdentityId,
    pub probes: Vec<ProbeResidual>,
    pub extrapolation: Option<Extrapolation>,
    /// Paths per Monte Carlo estimate, 0 for analytic reports.
    pub mc_budget: usize,
}

impl ResidualReport {
    pub fn residuals(&self) -> Vec<f64> {
        self.probes.iter().map(|p| p.residual).collect()
    }

    fn statuses(&self) -> impl Iterator<Item = Status> + '_ {
        self.probes.iter().map(|p| p.status).chain(self.extrapolation.map(|e| e.status))
    }

    pub fn pass(&self) -> bool {
        self.statuses().all(|s| s == Status::Pass)
    }

    pub fn inconclusive(&self) -> bool {
        !self.statuses().any(|s| s == Status::Fail) && self.statuses().any(|s| s == Status::Inconclusive)
    }

    pub fn status(&self) -> Status {
        if self.pass() {
            Status::Pass
        } else if self.inconclusive() {
            Status::Inconclusive
        } else {
            Status::Fail
        }
    }

    /// Human-readable block, one line per probe.
    pub fn summary(&self) -> String {
        let mut s = format!(
            "{} {} ({} probes, {} paths)\n",
            self.identity.as_str(),
            self.status().as_str(),
            self.probes.len(),
            self.mc_budget
        );
        for p in &self.probes {
            let _ = writeln!(
                s,
                "  {:<28} lhs {:>12.6} rhs {:>12.6} residual {:.3e} sigma {:.3e} {}",
                p.label,
                p.lhs.value.re,
                p.rhs.value.re,
                p.residual,
                p.sigma,
                p.status.as_str()
            );
        }
        if let Some(e) = &self.extrapolation {
            let _ = writeln!(
                s,
                "  extrapolated {:.6} +- {:.2e} target {:.6} {}",
                e.value,
                e.std_error,
                e.target,
                e.status.as_str()
            );
        }
        s
    }
}
