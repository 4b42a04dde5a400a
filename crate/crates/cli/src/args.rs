//! Command-line grammar, JSON configuration files and their merge.
//!
//! Every option can be given as a flag or as a key of the JSON object passed
//! with `--config` (snake_case keys, e.g. `"s_thin"`); flags win. Vectors are
//! comma-separated. Abscissae and step sizes also accept grids:
//!
//! * `start:stop:count`: `count` equally spaced points including both ends;
//! * `start:stop:count:log`: geometric spacing.

use crate::error::{CliError, CliResult};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Generating functions and gap statistics of the hard-edge Bessel process.
#[derive(Debug, Parser)]
#[command(name = "besselgap", version, about)]
pub struct Cli {
    /// What to compute.
    #[command(subcommand)]
    pub command: Command,
    /// Options shared by all commands.
    #[command(flatten)]
    pub options: Options,
    /// Worker threads for grid sweeps.
    #[arg(long, global = true, env = "BESSELGAP_JOBS")]
    pub jobs: Option<usize>,
    /// JSON file supplying defaults for any option.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

/// The subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// F(r x, s) by the Fredholm and Painlevé routes (needs alpha, r, s; x grid).
    Genfn,
    /// Probability of no particle in a union of intervals (alpha, intervals).
    Gap,
    /// Distribution of the number of particles in (0, x) (alpha, x grid, terms, tol).
    CountDist,
    /// P(ζ_ell > x) for the ell-th smallest particle (alpha, ell, x grid).
    KthCdf,
    /// P(ζ_m1 > x1, ζ_m2 > x2, …) (alpha, m, x list).
    Joint,
    /// Smallest particle of the thinned process (alpha, s_thin, x grid).
    Thinned,
    /// Smallest particle conditioned on the thinned one (alpha, s_thin, x1, x grid of x2).
    Conditional,
    /// Ratio probability Q(r) = P(ζ2/ζ1 > r) by both routes (alpha, r list).
    RatioQ,
    /// Finite-n Laguerre values at x/4n against the limit (alpha, r as x points, s, n list).
    LueConverge,
    /// Finite-n Fredholm determinant against the Hankel ratio (alpha, r as λ points, s, n list).
    HankelCheck,
    /// Eigenvalues of seeded Laguerre draws (n, alpha, seed, draws).
    SampleLue,
    /// Degenerate-limit rates of the coupled system (alpha, r, s, which, deltas, x).
    DegenerateProbe,
    /// q_j²(ξ) along the coupled system (alpha, r, s; x grid of ξ).
    TraceQ,
    /// Run the invariant suite and print a pass/fail table.
    Selfcheck,
}

impl Command {
    /// Name as typed on the command line.
    pub fn name(self) -> String {
        serde_json::to_value(self)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default()
    }
}

/// Output formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    /// A `# config` comment line, a header row and one row per grid point.
    #[default]
    Csv,
    /// `{config, rows, diagnostics}`.
    Json,
}

/// All options. Every field is optional here; commands check what they need.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// Bessel order α > −1.
    #[serde(skip_serializing_if = "Option::is_none")]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Interval scales r_1 < … < r_k (or point lists, see the command help).
    #[serde(skip_serializing_if = "Option::is_none")]
    #[arg(long, global = true, value_delimiter = ',')]
    pub r: Option<Vec<f64>>,
    /// Multipliers s_1, …, s_k.
    #[serde(skip_serializing_if = "Option::is_none")]
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub s: Option<Vec<f64>>,
    /// Abscissae: a number, a comma list or a grid.
    #[serde(skip_serializing_if = "Option::is_none")]
    #[arg(long, global = true, value_parser = parse_grid)]
    pub x: Option<Grid>,
    /// First abscissa of `conditional`.
    #[serde(skip_serializing_if = "Option::is_none")]
    #[arg(long, global = true)]
    pub x1: Option<f64>,
    /// Disjoint intervals `a:b,c:d,…` for `gap`.
    #[serde(skip_serializing_if = "Option::is_none")]
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_interval)]
    pub intervals: Option<Vec<Interval>>,
    /// Order-statistic index ℓ ≥ 1.
    #[serde(skip_serializing_if = "Option::is_none")]
    #[arg(long, global = true)]
    pub ell: Option<usize>,
    /// Order-statistic indices for `joint`.
    #[serde(skip_serializing_if = "Option::is_none")]
    #[arg(long, global = true, value_delimiter = ',')]
    pub m: Option<Vec<usize>>,
    /// Thinning (removal) probability in (0, 1).
    #[serde(skip_serializing_if = "Option::is_none")]
    #[arg(long, global = true)]
    pub s_thin: Option<f64>,
    /// Matrix sizes.
    #[serde(skip_serializing_if = "Option::is_none")]
    #[arg(long, global = true, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// Base seed of the sampler.
    #[serde(skip_serializing_if = "Option::is_none")]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Number of seeded draws (seeds seed, seed + 1, …).
    #[serde(skip_serializing_if = "Option::is_none")]
    #[arg(long, global = true)]
    pub draws: Option<usize>,
    /// Number N of roots of unity for coefficient extraction.
    #[serde(skip_serializing_if = "Option::is_none")]
    #[arg(long, global = true)]
    pub terms: Option<usize>,
    /// Quadrature / truncation tolerance.
    #[serde(skip_serializing_if = "Option::is_none")]
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Local error tolerance of the ODE integrations.
    #[serde(skip_serializing_if = "Option::is_none")]
    #[arg(long, global = true)]
    pub ode_tol: Option<f64>,
    /// Starting abscissa of the ODE integrations.
    #[serde(skip_serializing_if = "Option::is_none")]
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// Degenerate limit: `s-merge:j`, `r-merge:j` or `r1-to-0`.
    #[serde(skip_serializing_if = "Option::is_none")]
    #[arg(long, global = true)]
    pub which: Option<String>,
    /// Distances to the degenerate configuration (list or grid).
    #[serde(skip_serializing_if = "Option::is_none")]
    #[arg(long, global = true, value_parser = parse_grid)]
    pub deltas: Option<Grid>,
    /// Output format.
    #[serde(skip_serializing_if = "Option::is_none")]
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

/// An open interval `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval(pub f64, pub f64);

/// A list of abscissae given literally or as a grid. In a configuration
/// file it is a number, an array of numbers or a grid string.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Grid {
    /// A single value.
    One(f64),
    /// Literal values.
    List(Vec<f64>),
    /// `start:stop:count[:log]`.
    Spec(String),
}

impl Grid {
    /// The abscissae, in the order given.
    pub fn values(&self) -> CliResult<Vec<f64>> {
        match self {
            Grid::One(v) => Ok(vec![*v]),
            Grid::List(v) => Ok(v.clone()),
            Grid::Spec(s) => expand_grid(s),
        }
    }
}

// Decoded through `Value`: untagged enums cannot read numbers when
// serde_json keeps arbitrary-precision number text.
impl<'de> Deserialize<'de> for Grid {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let number = |v: &serde_json::Value| {
            v.as_f64()
                .ok_or_else(|| D::Error::custom(format!("expected a number, got {v}")))
        };
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::String(s) => parse_grid(&s).map_err(D::Error::custom),
            serde_json::Value::Array(items) => items.iter().map(number).collect::<Result<_, _>>().map(Grid::List),
            v => number(&v).map(Grid::One),
        }
    }
}

fn parse_grid(text: &str) -> Result<Grid, String> {
    if text.contains(':') {
        expand_grid(text).map_err(|e| e.to_string())?;
        Ok(Grid::Spec(text.to_owned()))
    } else {
        text.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
            .collect::<Result<Vec<_>, _>>()
            .map(Grid::List)
    }
}

fn expand_grid(text: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::Input(format!("grid {text:?} is not start:stop:count[:log]"));
    let parts: Vec<&str> = text.split(':').collect();
    if !(3..=4).contains(&parts.len()) {
        return Err(bad());
    }
    let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    let log = match parts.get(3).map(|s| s.trim()) {
        None => false,
        Some("log") => true,
        Some(_) => return Err(bad()),
    };
    if count == 0 || !start.is_finite() || !stop.is_finite() {
        return Err(bad());
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    if log && !(start > 0.0 && stop > 0.0) {
        return Err(CliError::Input(format!("logarithmic grid {text:?} needs positive ends")));
    }
    let t = |i: usize| i as f64 / (count - 1) as f64;
    Ok((0..count)
        .map(|i| {
            if log {
                (start.ln() + (stop.ln() - start.ln()) * t(i)).exp()
            } else {
                start + (stop - start) * t(i)
            }
        })
        .collect())
}

fn parse_interval(text: &str) -> Result<Interval, String> {
    let (a, b) = text.split_once(':').ok_or_else(|| format!("interval {text:?} is not a:b"))?;
    let a: f64 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    Ok(Interval(a, b))
}

macro_rules! overlay {
    ($top:expr, $base:expr, $($field:ident),* $(,)?) => {
        Options { $($field: $top.$field.or($base.$field)),* }
    };
}

impl Options {
    /// Reads a JSON configuration file.
    pub fn from_file(path: &std::path::Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("config {}: {e}", path.display())))
    }

    /// `self` with unset fields taken from `base`.
    pub fn over(self, base: Options) -> Options {
        overlay!(
            self, base, alpha, r, s, x, x1, intervals, ell, m, s_thin, n, seed, draws, terms, tol, ode_tol, eps,
            which, deltas, format
        )
    }

    /// The output format (CSV by default).
    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }
}

/// Fetches a required option or fails with a message naming the flag.
pub fn need<T: Clone>(value: &Option<T>, flag: &str, command: Command) -> CliResult<T> {
    value
        .clone()
        .ok_or_else(|| CliError::Input(format!("{} needs --{flag}", command.name())))
}
