//! `ctrw`: command-line front end for simulation, kernels, transforms,
//! residual checks and the Mittag-Leffler function.
//!
//! Settings come from an optional TOML file (`--config`) and are overridden
//! by flags. Outputs are CSV files in `--out` (or the config's `output_dir`),
//! or CSV on stdout when no directory is given. Exit code 0 means success,
//! 1 a failed verification, 2 a usage, config or runtime error.

pub mod config;
pub mod error;
pub mod output;

use clap::{Args, Parser, Subcommand};
use config::{CheckKind, CommandKind, KernelKind, RunConfig, SpatialKind};
pub use error::{CliError, Result};
use ffpe_verify::{probe_sets, Budget, ProbePoint, ResidualReport, Status};
use levy_core::{sample_fdd, FddOptions};
use output::{num, write_csv, write_csv_path, Table};
use semimarkov::{eval_H, eval_Q, Partition};
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use transforms::{mc_flt_x, mc_laplace_e, McOptions};

pub const SEED_ENV: &str = "CTRW_SEED";
const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Parser)]
#[command(name = "ctrw", version, about = "CTRW limits: simulation, kernels, transforms and residual checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed; falls back to the config, then to CTRW_SEED.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory; CSV goes to stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Multiplier on every Monte Carlo sample count.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub budget_scale: f64,
    /// Subordinator index.
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Diagonal coupling scale.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub coupling: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Joint samples of (E, R, X) at fixed times.
    Simulate(SimulateArgs),
    /// Transition kernel cell masses.
    Kernel(KernelArgs),
    /// Monte Carlo Laplace or Fourier-Laplace transform probes.
    Transform(TransformArgs),
    /// Residual checks of the governing equations.
    Verify(VerifyArgs),
    /// Mittag-Leffler function on the negative axis.
    Ml(MlArgs),
}

#[derive(Debug, Args, Default)]
pub struct SimulateArgs {
    #[arg(long, value_delimiter = ',')]
    pub times: Option<Vec<f64>>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub du: Option<f64>,
}

#[derive(Debug, Args, Default)]
pub struct KernelArgs {
    #[arg(long, value_enum)]
    pub family: Option<KernelKind>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub x_prime: Option<f64>,
    #[arg(long)]
    pub r_prime: Option<f64>,
}

#[derive(Debug, Args, Default)]
pub struct TransformArgs {
    #[arg(long, value_enum)]
    pub spatial: Option<SpatialKind>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub k: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub s: Option<Vec<f64>>,
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Args, Default)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub check: Option<CheckKind>,
    /// Time coordinates of the built-in probe set (1 or 2).
    #[arg(long)]
    pub times: Option<usize>,
    /// Monte Carlo paths; 0 runs the closed forms only.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Args, Default)]
pub struct MlArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub z: Option<Vec<f64>>,
}

/// Parses `argv`, runs the command and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let env_seed = std::env::var(SEED_ENV).ok();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    match execute(&cli, env_seed.as_deref(), &mut stdout.lock(), &mut stderr.lock()) {
        Ok(()) => 0,
        // a closed downstream pipe (`ctrw ... | head`) ends the output early
        Err(CliError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            if !matches!(e, CliError::VerificationFailed) {
                eprintln!("ctrw: {e}");
            }
            e.exit_code()
        }
    }
}

/// Merges flags over the config and validates the result.
pub fn resolve(cli: &Cli) -> Result<(CommandKind, RunConfig)> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if !(cli.budget_scale > 0.0 && cli.budget_scale.is_finite()) {
        return Err(CliError::Usage(format!("--budget-scale must be positive, got {}", cli.budget_scale)));
    }
    if let Some(a) = cli.alpha {
        cfg.process.alpha = a;
    }
    if cli.coupling.is_some() {
        cfg.process.coupling = cli.coupling;
    }
    if let Some(o) = &cli.out {
        cfg.output_dir = Some(o.clone());
    }
    let kind = match &cli.command {
        None => cfg.command.ok_or_else(|| CliError::Usage("no subcommand given and none in the config".into()))?,
        Some(Command::Simulate(a)) => {
            set(&mut cfg.simulate.times, a.times.clone());
            set(&mut cfg.simulate.n, a.n);
            set(&mut cfg.simulate.du, a.du);
            CommandKind::Simulate
        }
        Some(Command::Kernel(a)) => {
            set(&mut cfg.kernel.family, a.family);
            set(&mut cfg.kernel.t, a.t);
            set(&mut cfg.kernel.x_prime, a.x_prime);
            set(&mut cfg.kernel.r_prime, a.r_prime);
            CommandKind::Kernel
        }
        Some(Command::Transform(a)) => {
            set(&mut cfg.transform.spatial, a.spatial);
            set(&mut cfg.transform.k, a.k.clone());
            set(&mut cfg.transform.s, a.s.clone());
            set(&mut cfg.transform.n_paths, a.n);
            CommandKind::Transform
        }
        Some(Command::Verify(a)) => {
            set(&mut cfg.verify.check, a.check);
            set(&mut cfg.verify.times, a.times);
            set(&mut cfg.verify.n_paths, a.n);
            set(&mut cfg.verify.tolerance, a.tolerance);
            CommandKind::Verify
        }
        Some(Command::Ml(a)) => {
            set(&mut cfg.ml.z, a.z.clone());
            CommandKind::Ml
        }
    };
    cfg.validate()?;
    Ok((kind, cfg))
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

/// Seed precedence: flag, config, environment, default.
pub fn resolve_seed(cli: &Cli, cfg: &RunConfig, env_seed: Option<&str>) -> Result<u64> {
    if let Some(s) = cli.seed.or(cfg.seed) {
        return Ok(s);
    }
    match env_seed {
        Some(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV} must be an unsigned 64-bit integer, got {v:?}"))),
        None => Ok(DEFAULT_SEED),
    }
}

fn scaled(n: usize, scale: f64, min: usize) -> usize {
    if n == 0 {
        0
    } else {
        ((n as f64 * scale).round() as usize).max(min)
    }
}

struct Sink<'a> {
    dir: Option<PathBuf>,
    out: &'a mut dyn Write,
}

impl Sink<'_> {
    fn table(&mut self, name: &str, t: &Table) -> Result<()> {
        match &self.dir {
            Some(d) => {
                std::fs::create_dir_all(d)?;
                write_csv_path(t, &d.join(format!("{name}.csv")))?;
            }
            None => write_csv(t, &mut *self.out)?,
        }
        Ok(())
    }
}

/// Runs a parsed command line; `env_seed` stands in for `CTRW_SEED`.
pub fn execute(cli: &Cli, env_seed: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let (kind, cfg) = resolve(cli)?;
    let seed = resolve_seed(cli, &cfg, env_seed)?;
    let spec = cfg.process.to_spec()?;
    let scale = cli.budget_scale;
    let mut sink = Sink { dir: cfg.output_dir.clone(), out };
    match kind {
        CommandKind::Simulate => {
            let s = &cfg.simulate;
            let opts = FddOptions { du: s.du, readout: s.readout.readout(), ..FddOptions::default() };
            let batch = sample_fdd(&spec, &s.times, scaled(s.n, scale, 1), seed, &opts)?;
            sink.table("fdd", &output::fdd_table(&batch))
        }
        CommandKind::Kernel => {
            let k = &cfg.kernel;
            let part = Partition::uniform(k.x_lo, k.x_hi, k.nx, k.r_max, k.nr)?;
            let eval = match k.family {
                KernelKind::H => eval_H(&spec.subordinator, k.t, k.x_prime, k.r_prime, &part)?,
                KernelKind::Q => eval_Q(&spec, k.t, k.x_prime, k.r_prime, &part)?,
            };
            sink.table("kernel", &output::kernel_table(&eval))
        }
        CommandKind::Transform => {
            let t = &cfg.transform;
            let opts = McOptions { du: t.du, ..McOptions::default() };
            let n = scaled(t.n_paths, scale, 2);
            let probe = match t.spatial {
                SpatialKind::Laplace => mc_laplace_e(&spec, &t.k, &t.s, &opts, n, seed)?,
                SpatialKind::Fourier => mc_flt_x(&spec, &t.k, &t.s, &opts, n, seed)?,
            };
            sink.table("transform", &output::probe_table(t.k.len(), &[probe]))
        }
        CommandKind::Verify => {
            let report = verify(&spec, &cfg, seed, scale)?;
            let summary = report.summary();
            if let Some(d) = &sink.dir {
                std::fs::create_dir_all(d)?;
                std::fs::write(d.join("summary.txt"), &summary)?;
                sink.table("report", &output::report_table(&report))?;
                write!(sink.out, "{summary}")?;
            } else {
                sink.table("report", &output::report_table(&report))?;
                write!(err, "{summary}")?;
            }
            match report.status() {
                Status::Fail => Err(CliError::VerificationFailed),
                Status::Inconclusive => {
                    writeln!(err, "ctrw: some probes were inconclusive; raise --budget-scale to resolve them")?;
                    Ok(())
                }
                Status::Pass => Ok(()),
            }
        }
        CommandKind::Ml => {
            let alpha = cfg.process.alpha;
            let mut t = Table::new(&["alpha", "z", "value"]);
            for &z in &cfg.ml.z {
                let v = transforms::mittag_leffler(alpha, z)?;
                t.push(vec![num(alpha), num(z), num(v)]);
            }
            sink.table("ml", &t)
        }
    }
}

fn verify(spec: &levy_core::ProcessSpec, cfg: &RunConfig, seed: u64, scale: f64) -> Result<ResidualReport> {
    let v = &cfg.verify;
    let n_paths = scaled(v.n_paths, scale, 2);
    let budget = Budget {
        n_paths,
        window: v.window,
        tolerance: v.tolerance,
        noise_cap: v.noise_cap,
        seed,
        ..Budget::default()
    };
    let points: Vec<ProbePoint> = match &v.probes {
        Some(ps) => ps.iter().map(|p| ProbePoint::new(&p.k, &p.s)).collect(),
        None => match (v.check, v.times) {
            (CheckKind::Thm31, 1) => probe_sets::thm31_n1(),
            (CheckKind::Thm31, _) => probe_sets::thm31_n2(),
            (CheckKind::Cor32, 1) => probe_sets::cor32_n1(),
            (CheckKind::Cor32 | CheckKind::Cor33, _) => probe_sets::cor32_n2(),
            _ => probe_sets::cor33_n1(),
        },
    };
    let needs_mc = |what: &str| {
        if n_paths == 0 {
            Err(CliError::Config(format!("verify.n_paths: {what} has no closed form and needs Monte Carlo paths")))
        } else {
            Ok(())
        }
    };
    let report = match v.check {
        CheckKind::Thm31 if n_paths == 0 => ffpe_verify::residual_theorem31_analytic(&spec.subordinator, &points)?,
        CheckKind::Thm31 => ffpe_verify::residual_theorem31(spec, &points, &budget)?,
        CheckKind::Cor32 if n_paths == 0 => ffpe_verify::residual_cor32_analytic(spec, &points)?,
        CheckKind::Cor32 => ffpe_verify::residual_cor32(spec, &points, &budget)?,
        CheckKind::Cor33 => {
            needs_mc("cor33")?;
            ffpe_verify::residual_cor33(spec, &points, &budget)?
        }
        CheckKind::Prop34 => {
            needs_mc("prop34")?;
            ffpe_verify::verify_prop34(spec, v.x, v.t, &ffpe_verify::default_u_sequence(), &budget)?
        }
        CheckKind::Examples => {
            needs_mc("examples")?;
            ffpe_verify::verify_examples_1d(&v.alphas, &budget)?
        }
    };
    Ok(report)
}
