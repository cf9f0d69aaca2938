//! Flag parsing and config-file merging.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use tetrastab::bifurcation::MAX_AMPLITUDE;
use tetrastab::models::{ModelKind, ProfileModel};

use crate::CliError;

pub const DEFAULT_LMAX: usize = 20;
pub const MIN_LMAX: usize = 8;
pub const MAX_LMAX: usize = 96;
pub const DEFAULT_MU: f64 = 9.0;
pub const DEFAULT_MU1: f64 = 3.0;
pub const DEFAULT_EPSILON: f64 = 0.02;
pub const DEFAULT_RANGE: &str = "0.005:0.04:4";

#[derive(Debug, Parser)]
#[command(
    name = "tetrastab",
    version,
    about = "Tetrahedral steady states of 2D Euler on the sphere and their formal stability"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sign summary for every model, checked against the expected table.
    Table1(CommonArgs),
    /// Run the invariant suite.
    Verify(CommonArgs),
    /// Tracked Hessian eigenvalue against its quadratic approximation.
    Sweep(CommonArgs),
    /// Branch and eigenvalue expansion coefficients.
    Expand(CommonArgs),
    /// Hessian spectrum at one amplitude.
    Hessian(CommonArgs),
}

impl Command {
    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::Table1(a) | Command::Verify(a) | Command::Sweep(a) | Command::Expand(a) | Command::Hessian(a) => a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelChoice {
    Polynomial,
    SineGordon,
    SinhGordon,
    Exponential,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
    Markdown,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    #[arg(long, value_enum)]
    pub model: Option<ModelChoice>,
    #[arg(long)]
    pub lmax: Option<usize>,
    #[arg(long, allow_hyphen_values = true, conflicts_with = "epsilon_range")]
    pub epsilon: Option<f64>,
    /// `A:B:STEPS`, geometrically spaced.
    #[arg(long)]
    pub epsilon_range: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu1: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON file with any of the above keys; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Contents of a `--config` file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub model: Option<ModelChoice>,
    pub lmax: Option<usize>,
    pub epsilon: Option<f64>,
    pub epsilon_range: Option<String>,
    pub mu: Option<f64>,
    pub mu1: Option<f64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }
}

/// Amplitude selection after merging.
#[derive(Debug, Clone, PartialEq)]
pub enum Amplitudes {
    Single(f64),
    Range(Vec<f64>),
}

impl Amplitudes {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Amplitudes::Single(e) => vec![*e],
            Amplitudes::Range(v) => v.clone(),
        }
    }
}

/// Fully resolved and validated settings.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub models: Vec<ProfileModel>,
    pub lmax: usize,
    pub amplitudes: Option<Amplitudes>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

fn check_amplitude(e: f64) -> Result<f64, CliError> {
    if e > 0.0 && e <= MAX_AMPLITUDE {
        Ok(e)
    } else {
        Err(CliError::Usage(format!("epsilon must lie in (0, {MAX_AMPLITUDE}], got {e}")))
    }
}

/// Parses `A:B:STEPS` into `STEPS` geometrically spaced amplitudes from `A` to `B`.
pub fn parse_range(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("epsilon range must look like A:B:STEPS, got '{s}'"));
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts[..] else { return Err(bad()) };
    let a = check_amplitude(f64::from_str(a.trim()).map_err(|_| bad())?)?;
    let b = check_amplitude(f64::from_str(b.trim()).map_err(|_| bad())?)?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if n < 2 || a >= b {
        return Err(CliError::Usage(format!("epsilon range needs A < B and STEPS >= 2, got '{s}'")));
    }
    let ratio = (b / a).ln() / (n - 1) as f64;
    Ok((0..n).map(|k| if k == n - 1 { b } else { a * (ratio * k as f64).exp() }).collect())
}

impl RunConfig {
    /// Merges flags over the optional config file and validates.
    ///
    /// `min_lmax` is the usage floor for the command; the verification
    /// command passes a lower one so resolution failures surface as checks.
    pub fn resolve(args: &CommonArgs, min_lmax: usize) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let choice = args.model.or(file.model).unwrap_or(ModelChoice::All);
        let lmax = args.lmax.or(file.lmax).unwrap_or(DEFAULT_LMAX);
        if !(min_lmax..=MAX_LMAX).contains(&lmax) {
            return Err(CliError::Usage(format!("lmax must lie in [{min_lmax}, {MAX_LMAX}], got {lmax}")));
        }
        let mu = args.mu.or(file.mu).unwrap_or(DEFAULT_MU);
        let mu1 = args.mu1.or(file.mu1).unwrap_or(DEFAULT_MU1);
        let kinds: Vec<ModelKind> = match choice {
            ModelChoice::All => ModelKind::ALL.to_vec(),
            ModelChoice::Polynomial => vec![ModelKind::Polynomial],
            ModelChoice::SineGordon => vec![ModelKind::SineGordon],
            ModelChoice::SinhGordon => vec![ModelKind::SinhGordon],
            ModelChoice::Exponential => vec![ModelKind::Exponential],
        };
        let models = kinds
            .into_iter()
            .map(|k| ProfileModel::from_kind(k, mu, mu1))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Usage(e.to_string()))?;

        // flags beat the file
        let amplitudes = match (args.epsilon, &args.epsilon_range, file.epsilon, &file.epsilon_range) {
            (Some(e), _, _, _) => Some(Amplitudes::Single(check_amplitude(e)?)),
            (None, Some(r), _, _) => Some(Amplitudes::Range(parse_range(r)?)),
            (None, None, Some(e), _) => Some(Amplitudes::Single(check_amplitude(e)?)),
            (None, None, None, Some(r)) => Some(Amplitudes::Range(parse_range(r)?)),
            _ => None,
        };
        Ok(Self { models, lmax, amplitudes, format: args.format.or(file.format), out: args.out.clone().or(file.out) })
    }

    /// The one model of a single-model command.
    pub fn single_model(&self, command: &str) -> Result<ProfileModel, CliError> {
        match self.models.as_slice() {
            [m] => Ok(*m),
            _ => Err(CliError::Usage(format!("{command} needs a single --model"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_range() {
        assert_eq!(parse_range("0.005:0.04:4").unwrap(), vec![0.005, 0.01, 0.02, 0.04]);
        for bad in ["0.1:0.05:3", "0.1:0.2:1", "0:0.1:3", "0.1:0.6:3", "a:b:c", "0.1:0.2"] {
            assert!(matches!(parse_range(bad), Err(CliError::Usage(_))), "{bad}");
        }
    }

    #[test]
    fn defaults_and_validation() {
        let cfg = RunConfig::resolve(&CommonArgs::default(), MIN_LMAX).unwrap();
        assert_eq!(cfg.lmax, DEFAULT_LMAX);
        assert_eq!(cfg.models.len(), 4);
        assert!(cfg.amplitudes.is_none());
        let neg = CommonArgs { mu: Some(-1.0), ..Default::default() };
        let err = RunConfig::resolve(&neg, MIN_LMAX).unwrap_err();
        assert!(err.to_string().contains("polynomial parameters must be positive"));
        let low = CommonArgs { lmax: Some(4), ..Default::default() };
        assert!(RunConfig::resolve(&low, MIN_LMAX).is_err());
        assert!(RunConfig::resolve(&low, 0).is_ok());
        let eps = CommonArgs { epsilon: Some(0.7), ..Default::default() };
        assert!(RunConfig::resolve(&eps, MIN_LMAX).is_err());
    }
}
