//! Command-line flags. Every subcommand also accepts `--config <FILE>`, a JSON
//! object whose keys are the long flag names (`"pi-hat"`, `"p1"`, ...); flags
//! given on the command line take precedence over the file.

use crate::error::{CliError, CliResult};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(
    name = "allele-assoc",
    version,
    about = "Allele-based case-control association tests, power and simulation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the population quantities of a two-locus model as JSON.
    Model(ModelArgs),
    /// Test every marker of a counts file and write a TSV report.
    Scan(ScanArgs),
    /// Evaluate asymptotic power curves and write CSV.
    Power(PowerArgs),
    /// Estimate type I error or power by Monte Carlo and write JSON (and TSV).
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisArg {
    #[value(name = "q1")]
    Q1,
    #[value(name = "delta")]
    Delta,
    #[value(name = "delta_weight")]
    DeltaWeight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeArg {
    Allele,
    Genotype,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorrectionArg {
    TowardZero,
    AwayFromZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestArg {
    #[value(name = "t")]
    T,
    #[value(name = "w")]
    W,
    #[value(name = "w_cor")]
    WCor,
    #[value(name = "u")]
    U,
    /// `W_delta` at every weight in `--deltas`.
    #[value(name = "w_delta")]
    WDelta,
    /// Continuity-corrected `W_delta` at every weight in `--deltas`.
    #[value(name = "w_cor_delta")]
    WCorDelta,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct ModelArgs {
    /// JSON file with any of these flags as keys.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Frequency of the risk allele A1 at the causal locus.
    #[arg(long)]
    pub p1: Option<f64>,
    /// Penetrances P(case | A1A1), P(case | A1A2), P(case | A2A2).
    #[arg(long, value_delimiter = ',')]
    pub pen: Option<Vec<f64>>,
    /// Frequency of marker allele M1.
    #[arg(long)]
    pub q1: Option<f64>,
    /// Standardized LD coefficient between A1 and M1.
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    /// Number of cases (sets the design weight used for Q; default balanced).
    #[arg(long)]
    pub r: Option<u64>,
    /// Number of controls.
    #[arg(long)]
    pub s: Option<u64>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct ScanArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Tab-separated counts: marker_id case_m1 case_m2 ctrl_m1 ctrl_m2.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output TSV (standard output when absent).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// External estimate of the disease prevalence; required.
    #[arg(long)]
    pub pi_hat: Option<f64>,
    /// Confidence level of the effect-ratio interval [default: 0.95].
    #[arg(long)]
    pub ci_level: Option<f64>,
    /// Continuity correction direction for W_cor [default: toward-zero].
    #[arg(long)]
    pub correction: Option<CorrectionArg>,
    /// Print the note that p-values rank markers only locally [default: true].
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub warn_locality: Option<bool>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct PowerArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Coordinate to sweep.
    #[arg(long)]
    pub axis: Option<AxisArg>,
    #[arg(long)]
    pub p1: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub pen: Option<Vec<f64>>,
    /// Marker allele frequency, fixed unless sweeping q1.
    #[arg(long)]
    pub q1: Option<f64>,
    /// LD coefficient, fixed unless sweeping delta.
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub r: Option<u64>,
    #[arg(long)]
    pub s: Option<u64>,
    /// Two-sided significance level.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Explicit axis values (comma-separated).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub values: Option<Vec<f64>>,
    /// Evenly spaced axis values: first value.
    #[arg(long, allow_hyphen_values = true)]
    pub from: Option<f64>,
    /// Evenly spaced axis values: last value.
    #[arg(long, allow_hyphen_values = true)]
    pub to: Option<f64>,
    /// Evenly spaced axis values: number of points.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Denominator weights for W_delta rows (e.g. prevalence estimates);
    /// default is the model prevalence.
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,
    /// Output CSV (standard output when absent).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct SimulateArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub p1: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub pen: Option<Vec<f64>>,
    #[arg(long)]
    pub q1: Option<f64>,
    /// LD coefficient [default: 0].
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub r: Option<u64>,
    #[arg(long)]
    pub s: Option<u64>,
    /// Prevalence estimate plugged into W, W_cor and U; required.
    #[arg(long)]
    pub pi_hat: Option<f64>,
    /// Number of replications.
    #[arg(long)]
    pub reps: Option<u64>,
    /// Seed of the random streams [default: 1].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Sampling scheme [default: allele].
    #[arg(long)]
    pub mode: Option<ModeArg>,
    /// Significance levels [default: 0.001].
    #[arg(long, value_delimiter = ',')]
    pub alphas: Option<Vec<f64>>,
    /// Weights for the W_delta tests.
    #[arg(long, value_delimiter = ',')]
    pub deltas: Option<Vec<f64>>,
    /// Tests to tally [default: t,w,w_cor,u, plus w_delta when --deltas is given].
    #[arg(long, value_delimiter = ',')]
    pub tests: Option<Vec<TestArg>>,
    /// Type I error run: requires delta = 0.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub type1: Option<bool>,
    /// Continuity correction direction [default: toward-zero].
    #[arg(long)]
    pub correction: Option<CorrectionArg>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output JSON (standard output when absent).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Optional long-format TSV of rejection rates.
    #[arg(long)]
    pub tsv: Option<PathBuf>,
}

macro_rules! overlay {
    ($ty:ty { $($field:ident),* $(,)? }) => {
        impl $ty {
            /// Fill unset flags from `--config`, if given.
            pub fn resolve(mut self) -> CliResult<Self> {
                if let Some(path) = self.config.take() {
                    let file: Self = load_config(&path)?;
                    $(self.$field = self.$field.or(file.$field);)*
                }
                Ok(self)
            }
        }
    };
}

overlay!(ModelArgs {
    p1,
    pen,
    q1,
    delta,
    r,
    s
});
overlay!(ScanArgs {
    input,
    output,
    pi_hat,
    ci_level,
    correction,
    warn_locality
});
overlay!(PowerArgs {
    axis,
    p1,
    pen,
    q1,
    delta,
    r,
    s,
    alpha,
    values,
    from,
    to,
    steps,
    weights,
    output
});
overlay!(SimulateArgs {
    p1,
    pen,
    q1,
    delta,
    r,
    s,
    pi_hat,
    reps,
    seed,
    mode,
    alphas,
    deltas,
    tests,
    type1,
    correction,
    threads,
    output,
    tsv
});

fn load_config<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("config file {}: {e}", path.display())))
}

/// Unwrap a required setting or name the flag that is missing.
pub fn required<T>(value: Option<T>, flag: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::Usage(format!("missing --{flag} (flag or config key `{flag}`)")))
}
