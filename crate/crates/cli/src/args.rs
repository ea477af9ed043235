//! Command-line surface and its resolution into a validated run.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sobolev_core::families::{make_family, FamilySpec};
use sobolev_core::functional::{FunctionalConfig, MomentFunctional};
use sobolev_core::scalar::{parse_scalar, render, Scalar};
use sobolev_core::suites::Suite;

pub const DEFAULT_DEPTH_CAP: usize = 64;

#[derive(Parser, Debug)]
#[command(name = "sobolev", version, about = "Exact semiclassical and Sobolev orthogonal polynomials")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Emit a table of orthogonal polynomials and their data.
    Table {
        kind: TableKind,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Emit the moments of the functional.
    Moments {
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Run a verification suite (or `all`) and report every failed check.
    Verify {
        /// pearson, tilde, norms, quasi-orth, structure, appendix, sobolev,
        /// connection, j-symmetry, bands, or all
        suite: String,
        #[command(flatten)]
        opts: CommonOpts,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum TableKind {
    Standard,
    Sobolev,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    Jacobi,
    Meixner,
    Qfreud,
    Medem,
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct CommonOpts {
    /// Built-in family (exclusive with --config).
    #[arg(long)]
    pub family: Option<FamilyName>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
    #[arg(long)]
    pub q: Option<String>,
    #[arg(long = "K")]
    pub k: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub c1: Option<String>,
    /// JSON description of a custom Pearson functional.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Sobolev weight λ ≥ 0, as `a/b` or an integer.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub lambda: String,
    /// Largest index n.
    #[arg(short = 'n', default_value_t = 10)]
    pub n: usize,
    /// Largest monomial degree in bilinear identity checks.
    #[arg(long, default_value_t = 10)]
    pub depth: usize,
    #[arg(long, default_value_t = 2)]
    pub kmax: usize,
    #[arg(long, default_value_t = 3)]
    pub mmax: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Run independent tasks on a thread pool; output is unchanged.
    #[arg(long)]
    pub parallel: bool,
}

/// A configuration error, tagged with the flag it concerns.
#[derive(Debug)]
pub struct ConfigError {
    pub flag: &'static str,
    pub message: String,
}

impl ConfigError {
    pub fn new(flag: &'static str, message: impl Into<String>) -> Self {
        ConfigError { flag, message: message.into() }
    }
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.flag, self.message)
    }
}

/// Everything a command needs, validated.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub u: MomentFunctional,
    pub spec: Option<FamilySpec>,
    pub lambda: Scalar,
    pub n: usize,
    pub depth: usize,
    pub k_max: usize,
    pub m_max: usize,
    pub format: Format,
    pub parallel: bool,
}

impl Resolved {
    pub fn source(&self) -> String {
        match &self.spec {
            Some(spec) => spec.to_string(),
            None => self.u.label().to_string(),
        }
    }
}

pub fn depth_cap() -> Result<usize, ConfigError> {
    match std::env::var("SOBOLEV_DEPTH_CAP") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| ConfigError::new("SOBOLEV_DEPTH_CAP", format!("not a nonnegative integer: {v:?}"))),
        Err(_) => Ok(DEFAULT_DEPTH_CAP),
    }
}

fn scalar(flag: &'static str, text: &Option<String>) -> Result<Option<Scalar>, ConfigError> {
    text.as_deref()
        .map(|t| parse_scalar(t).map_err(|e| ConfigError::new(flag, e.to_string())))
        .transpose()
}

fn family_spec(opts: &CommonOpts, name: FamilyName) -> Result<FamilySpec, ConfigError> {
    let defaults = FamilySpec::defaults();
    let given: [(&'static str, bool); 6] = [
        ("--alpha", opts.alpha.is_some()),
        ("--beta", opts.beta.is_some()),
        ("--c", opts.c.is_some()),
        ("--q", opts.q.is_some()),
        ("--K", opts.k.is_some()),
        ("--c1", opts.c1.is_some()),
    ];
    let allowed: &[&str] = match name {
        FamilyName::Jacobi => &["--alpha", "--beta"],
        FamilyName::Meixner => &["--beta", "--c"],
        FamilyName::Qfreud => &["--q", "--K", "--c1"],
        FamilyName::Medem => &[],
    };
    if let Some((flag, _)) = given.iter().find(|(flag, set)| *set && !allowed.contains(flag)) {
        return Err(ConfigError::new(flag, format!("does not apply to --family {name:?}").to_lowercase()));
    }
    let spec = match (name, &defaults) {
        (FamilyName::Jacobi, [FamilySpec::Jacobi { alpha, beta }, ..]) => FamilySpec::jacobi(
            scalar("--alpha", &opts.alpha)?.unwrap_or_else(|| alpha.clone()),
            scalar("--beta", &opts.beta)?.unwrap_or_else(|| beta.clone()),
        ),
        (FamilyName::Meixner, [_, FamilySpec::Meixner { beta, c }, ..]) => FamilySpec::meixner(
            scalar("--beta", &opts.beta)?.unwrap_or_else(|| beta.clone()),
            scalar("--c", &opts.c)?.unwrap_or_else(|| c.clone()),
        ),
        (FamilyName::Qfreud, [_, _, FamilySpec::QFreud { q, k, c1 }, ..]) => FamilySpec::qfreud(
            scalar("--q", &opts.q)?.unwrap_or_else(|| q.clone()),
            scalar("--K", &opts.k)?.unwrap_or_else(|| k.clone()),
            scalar("--c1", &opts.c1)?.unwrap_or_else(|| c1.clone()),
        ),
        (FamilyName::Medem, _) => FamilySpec::Medem,
        _ => unreachable!("default family order is fixed"),
    };
    spec.validate().map_err(|e| ConfigError::new("--family", e.to_string()))?;
    Ok(spec)
}

pub fn resolve(opts: &CommonOpts) -> Result<Resolved, ConfigError> {
    let cap = depth_cap()?;
    for (flag, v) in [("-n", opts.n), ("--depth", opts.depth)] {
        if v > cap {
            return Err(ConfigError::new(flag, format!("{v} exceeds the depth cap {cap} (SOBOLEV_DEPTH_CAP)")));
        }
    }
    let lambda = parse_scalar(&opts.lambda).map_err(|e| ConfigError::new("--lambda", e.to_string()))?;
    if lambda < Scalar::from_integer(0.into()) {
        return Err(ConfigError::new("--lambda", format!("must be ≥ 0, got {}", render(&lambda))));
    }
    let (u, spec) = match (&opts.family, &opts.config) {
        (Some(_), Some(_)) => return Err(ConfigError::new("--config", "give either --family or --config, not both")),
        (None, None) => return Err(ConfigError::new("--family", "one of --family or --config is required")),
        (Some(name), None) => {
            let spec = family_spec(opts, *name)?;
            let u = make_family(&spec).map_err(|e| ConfigError::new("--family", e.to_string()))?;
            (u, Some(spec))
        }
        (None, Some(path)) => {
            let family_flags = [&opts.alpha, &opts.beta, &opts.c, &opts.q, &opts.k, &opts.c1];
            if family_flags.iter().any(|f| f.is_some()) {
                return Err(ConfigError::new("--config", "family parameter flags cannot be combined with --config"));
            }
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError::new("--config", format!("{}: {e}", path.display())))?;
            let cfg = FunctionalConfig::from_json(&text).map_err(|e| ConfigError::new("--config", e.to_string()))?;
            (cfg.build().map_err(|e| ConfigError::new("--config", e.to_string()))?, None)
        }
    };
    Ok(Resolved {
        u,
        spec,
        lambda,
        n: opts.n,
        depth: opts.depth,
        k_max: opts.kmax,
        m_max: opts.mmax,
        format: opts.format,
        parallel: opts.parallel,
    })
}

/// `all` or a single suite name.
pub fn suites(name: &str) -> Result<Vec<Suite>, ConfigError> {
    if name == "all" {
        return Ok(Suite::ALL.to_vec());
    }
    name.parse::<Suite>()
        .map(|s| vec![s])
        .map_err(|_| {
            let known: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
            ConfigError::new("<suite>", format!("unknown suite {name:?}; expected one of {} or all", known.join(", ")))
        })
}
