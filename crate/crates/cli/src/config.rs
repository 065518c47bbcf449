use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use renv_core::analysis::DEFAULT_SEED;
use renv_core::envelope::EnvelopeParams;
use renv_core::theorems::{stated, ManifoldSpec, SuiteId};

use crate::CliError;

#[derive(Parser, Debug)]
#[command(name = "renv", version, about = "Inf/sup-convolution regularization on model spaces: evaluations and verification suites")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Evaluate f_lambda (or (f_lambda)^mu when --mu is given) at points.
    Eval(Common),
    /// Grid study of f_lambda -> f as lambda decreases.
    Converge(Common),
    /// Run one verification suite.
    Verify {
        suite: String,
        #[command(flatten)]
        common: Common,
    },
    /// Run a counterexample suite: `hyperbolic` or `warped`.
    Counterexample {
        which: String,
        #[command(flatten)]
        common: Common,
    },
    /// Run several suites (all by default) into one output.
    Sweep {
        suites: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
}

/// Options shared by every subcommand; each may also come from `--config`.
#[derive(Args, Debug, Default, Clone)]
struct Common {
    /// `key = value` file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// euclidean | sphere | hyperbolic | warped | poincare
    #[arg(long)]
    manifold: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
    /// Sectional curvature of sphere/hyperbolic models.
    #[arg(long, allow_negative_numbers = true)]
    curvature: Option<f64>,
    /// Field id, e.g. dist2, half-dist2, const:2, bump:0.3, min-dist.
    #[arg(long)]
    field: Option<String>,
    #[arg(long, value_delimiter = ',')]
    lambda: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    mu: Vec<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long = "K0", alias = "k0")]
    k0: Option<f64>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    spacing: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Sample distances of the hyperbolic counterexample.
    #[arg(long, value_delimiter = ',')]
    distances: Vec<f64>,
    /// Evaluation points at these distances from the origin along the first frame axis.
    #[arg(long = "point-d", value_delimiter = ',')]
    point_d: Vec<f64>,
    /// Evaluation point in model coordinates (repeatable).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    point: Vec<f64>,
    #[arg(long = "A")]
    a: Option<f64>,
    #[arg(long = "B")]
    b: Option<f64>,
    #[arg(long = "C")]
    c: Option<f64>,
    /// Relative tolerance of closed-form comparisons in `eval`.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output path; `-` writes to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

/// Parses the config file through the same flag grammar.
#[derive(Parser, Debug)]
#[command(no_binary_name = true)]
struct FileArgs {
    #[command(flatten)]
    common: Common,
}

impl Common {
    fn or(self, file: Common) -> Common {
        fn v<T>(a: Vec<T>, b: Vec<T>) -> Vec<T> {
            if a.is_empty() {
                b
            } else {
                a
            }
        }
        Common {
            config: self.config,
            manifold: self.manifold.or(file.manifold),
            dim: self.dim.or(file.dim),
            curvature: self.curvature.or(file.curvature),
            field: self.field.or(file.field),
            lambda: v(self.lambda, file.lambda),
            mu: v(self.mu, file.mu),
            q: self.q.or(file.q),
            k0: self.k0.or(file.k0),
            radius: self.radius.or(file.radius),
            spacing: self.spacing.or(file.spacing),
            samples: self.samples.or(file.samples),
            distances: v(self.distances, file.distances),
            point_d: v(self.point_d, file.point_d),
            point: v(self.point, file.point),
            a: self.a.or(file.a),
            b: self.b.or(file.b),
            c: self.c.or(file.c),
            tol: self.tol.or(file.tol),
            seed: self.seed.or(file.seed),
            out: self.out.or(file.out),
            format: self.format.or(file.format),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Eval,
    Converge,
    Verify(SuiteId),
    Counterexample(SuiteId),
    Sweep(Vec<SuiteId>),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Eval => "eval",
            Command::Converge => "converge",
            Command::Verify(_) => "verify",
            Command::Counterexample(_) => "counterexample",
            Command::Sweep(_) => "sweep",
        }
    }
}

/// A validated job.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    /// `None` leaves the suite's own choice.
    pub manifold: Option<ManifoldSpec>,
    pub field: Option<String>,
    pub lambdas: Vec<f64>,
    pub mus: Vec<f64>,
    pub q: Option<f64>,
    pub k0: Option<f64>,
    pub radius: Option<f64>,
    pub spacing: Option<f64>,
    pub samples: Option<usize>,
    pub distances: Vec<f64>,
    pub point_d: Vec<f64>,
    pub point: Vec<f64>,
    pub constants: [Option<f64>; 3],
    pub tol: f64,
    pub seed: u64,
    /// `None` means standard output.
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    /// `q` of the composition constraint `mu <= lambda / (2q)`.
    pub fn q_or_default(&self) -> f64 {
        self.q.unwrap_or(2.0)
    }

    /// `(lambda, mu)` jobs: `mu` paired elementwise, broadcast when single, absent for pure inf-convolutions.
    pub fn pairs(&self) -> Result<Vec<(f64, Option<f64>)>, CliError> {
        match self.mus.len() {
            0 => Ok(self.lambdas.iter().map(|&l| (l, None)).collect()),
            1 => Ok(self.lambdas.iter().map(|&l| (l, Some(self.mus[0]))).collect()),
            n if n == self.lambdas.len() => Ok(self.lambdas.iter().zip(&self.mus).map(|(&l, &m)| (l, Some(m))).collect()),
            _ => Err(CliError::Usage("--mu needs one value or as many values as --lambda".into())),
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn read_config(path: &Path) -> Result<Common, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut argv: Vec<String> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("{}:{}: expected `key = value`", path.display(), i + 1)))?;
        let k = k.trim();
        if k == "config" {
            return Err(usage("config files cannot include other config files"));
        }
        argv.push(format!("--{k}"));
        argv.push(v.split(',').map(str::trim).collect::<Vec<_>>().join(","));
    }
    FileArgs::try_parse_from(argv)
        .map(|f| f.common)
        .map_err(|e| usage(format!("config {}: {}", path.display(), e.render().to_string().trim())))
}

/// Parses `argv` (including the program name), the optional config file, and the
/// `RENV_SEED` fallback into a validated [`RunConfig`].
pub fn parse_config(argv: &[String], env_seed: Option<&str>) -> Result<RunConfig, CliError> {
    let cli = Cli::try_parse_from(argv).map_err(CliError::Clap)?;
    let (command, common) = match cli.cmd {
        Cmd::Eval(c) => (Command::Eval, c),
        Cmd::Converge(c) => (Command::Converge, c),
        Cmd::Verify { suite, common } => (Command::Verify(parse_suite(&suite)?), common),
        Cmd::Counterexample { which, common } => {
            let id = match which.as_str() {
                "hyperbolic" => SuiteId::CounterexampleHyperbolic,
                "warped" => SuiteId::CounterexampleWarped,
                other => return Err(usage(format!("unknown counterexample '{other}' (hyperbolic | warped)"))),
            };
            (Command::Counterexample(id), common)
        }
        Cmd::Sweep { suites, common } => {
            let ids = if suites.is_empty() {
                SuiteId::ALL.to_vec()
            } else {
                suites.iter().map(|s| parse_suite(s)).collect::<Result<_, _>>()?
            };
            (Command::Sweep(ids), common)
        }
    };
    let common = match common.config.clone() {
        Some(p) => common.or(read_config(&p)?),
        None => common,
    };

    let seed = match (common.seed, env_seed) {
        (Some(s), _) => s,
        (None, Some(s)) => s.trim().parse().map_err(|_| usage(format!("RENV_SEED is not an unsigned integer: '{s}'")))?,
        (None, None) => DEFAULT_SEED,
    };
    let manifold = match &common.manifold {
        Some(kind) => Some(ManifoldSpec::parse(kind, common.dim.unwrap_or(2), common.curvature).map_err(|e| usage(e.to_string()))?),
        None if common.dim.is_some() || common.curvature.is_some() => {
            return Err(usage("--dim/--curvature need --manifold"));
        }
        None => None,
    };
    let format = common.format.unwrap_or_default();
    let out = match common.out {
        Some(p) if p.as_os_str() == "-" => None,
        Some(p) => Some(p),
        None => Some(PathBuf::from(format!("renv_{}.{}", command.name(), format.extension()))),
    };
    let cfg = RunConfig {
        command,
        manifold,
        field: common.field,
        lambdas: common.lambda,
        mus: common.mu,
        q: common.q,
        k0: common.k0,
        radius: common.radius,
        spacing: common.spacing,
        samples: common.samples,
        distances: common.distances,
        point_d: common.point_d,
        point: common.point,
        constants: [common.a, common.b, common.c],
        tol: common.tol.unwrap_or(1e-6),
        seed,
        out,
        format,
    };
    validate(&cfg)?;
    Ok(cfg)
}

fn parse_suite(s: &str) -> Result<SuiteId, CliError> {
    s.parse::<SuiteId>().map_err(|_| {
        let names: Vec<&str> = SuiteId::ALL.iter().map(|id| id.name()).collect();
        usage(format!("unknown suite '{s}' (one of {})", names.join(", ")))
    })
}

fn validate(cfg: &RunConfig) -> Result<(), CliError> {
    let positive = |name: &str, v: &[f64]| {
        if v.iter().all(|x| *x > 0.0 && x.is_finite()) {
            Ok(())
        } else {
            Err(usage(format!("--{name} values must be positive")))
        }
    };
    positive("lambda", &cfg.lambdas)?;
    positive("mu", &cfg.mus)?;
    if let Some(q) = cfg.q {
        if !(q > 1.0) {
            return Err(usage("--q must exceed 1"));
        }
    }
    if !(cfg.tol > 0.0) {
        return Err(usage("--tol must be positive"));
    }
    if cfg.samples == Some(0) {
        return Err(usage("--samples must be positive"));
    }
    match &cfg.command {
        Command::Eval | Command::Converge => {
            if cfg.lambdas.is_empty() {
                return Err(usage("--lambda is required"));
            }
            if cfg.command == Command::Eval && cfg.point_d.is_empty() && cfg.point.is_empty() {
                return Err(usage("eval needs --point-d or --point"));
            }
            for (l, mu) in cfg.pairs()? {
                if let Some(mu) = mu {
                    EnvelopeParams::new(l, mu, cfg.q_or_default())
                        .and_then(|p| p.check_composition())
                        .map_err(|e| usage(e.to_string()))?;
                }
            }
        }
        Command::Verify(id) if id.composes() => {
            let q = cfg.q_or_default();
            for &l in &cfg.lambdas {
                for &mu in &cfg.mus {
                    EnvelopeParams::new(l, mu, q).and_then(|p| p.check_composition()).map_err(|e| usage(e.to_string()))?;
                }
            }
        }
        Command::Counterexample(SuiteId::CounterexampleHyperbolic) => {
            for &l in &cfg.lambdas {
                for &mu in &cfg.mus {
                    if !(mu < stated::lambda_prime(l)) {
                        return Err(usage(format!("mu = {mu} must stay below (1 + lambda)^2 / (2 + lambda) at lambda = {l}")));
                    }
                }
            }
        }
        _ => {}
    }
    Ok(())
}
