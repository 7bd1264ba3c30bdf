use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::keyrate::Protocol;

#[derive(Debug, Parser)]
#[command(name = "cvqkd", version, about = "CV-QKD key rates and security thresholds under thermal noise")]
#[command(args_override_self = true)]
pub struct Cli {
    /// Print records as JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Flat key = value file supplying flag defaults.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Worker threads for sweeps (0 = one per core).
    #[arg(long, global = true, value_name = "N", default_value_t = 0)]
    pub parallel: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Key rate at one operating point.
    #[command(args_override_self = true)]
    Rate(RateArgs),
    /// Key rates or thresholds over a grid, as CSV.
    #[command(args_override_self = true)]
    Sweep(SweepArgs),
    /// Security threshold in T or beta.
    #[command(args_override_self = true)]
    Threshold(ThresholdArgs),
    /// Closed-form vs oracle spectra, entropy identities and reference values.
    #[command(args_override_self = true)]
    Selfcheck(SelfcheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProtocolChoice {
    #[value(alias = "direct")]
    Dr,
    #[value(alias = "reverse")]
    Rr,
    /// Larger rate of the two; ties go to rr.
    Best,
}

impl ProtocolChoice {
    pub fn fixed(self) -> Option<Protocol> {
        match self {
            ProtocolChoice::Dr => Some(Protocol::Direct),
            ProtocolChoice::Rr => Some(Protocol::Reverse),
            ProtocolChoice::Best => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ProtocolChoice::Dr => "dr",
            ProtocolChoice::Rr => "rr",
            ProtocolChoice::Best => "best",
        }
    }
}

/// Thermal background replacing `W` and `V0`.
#[derive(Debug, Clone, Args)]
pub struct WirelessArgs {
    /// Frequency in GHz, inserted as omega = GHz x 1e9 rad/s.
    #[arg(long = "freq-ghz", value_name = "GHZ", conflicts_with = "omega_rad_s")]
    pub freq_ghz: Option<f64>,
    /// Angular frequency in rad/s.
    #[arg(long = "omega-rad-s", value_name = "RAD_S")]
    pub omega_rad_s: Option<f64>,
    /// Background temperature in kelvin.
    #[arg(long, value_name = "KELVIN", default_value_t = 300.0)]
    pub temp: f64,
}

impl WirelessArgs {
    pub fn omega(&self) -> Option<f64> {
        self.omega_rad_s.or(self.freq_ghz.map(|g| g * 1e9))
    }
}

#[derive(Debug, Clone, Args)]
pub struct RateArgs {
    #[arg(long, value_enum, default_value = "best")]
    pub protocol: ProtocolChoice,
    /// Channel transmission.
    #[arg(long = "T", value_name = "T")]
    pub t: f64,
    /// Cloner EPR variance.
    #[arg(long = "W", value_name = "W", default_value_t = 1.0)]
    pub w: f64,
    /// Signal variance.
    #[arg(long = "Vs", value_name = "VS", default_value_t = 1e5)]
    pub vs: f64,
    /// Carrier variance V0 = 1 + beta.
    #[arg(long = "V0", value_name = "V0", conflicts_with = "beta")]
    pub v0: Option<f64>,
    /// Preparation noise beta = V0 - 1.
    #[arg(long, value_name = "BETA")]
    pub beta: Option<f64>,
    #[command(flatten)]
    pub wireless: WirelessArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SearchVariable {
    #[value(name = "T")]
    T,
    #[value(name = "beta")]
    Beta,
}

#[derive(Debug, Clone, Args)]
pub struct ThresholdArgs {
    /// Defaults to best, or dr with --wireless.
    #[arg(long, value_enum)]
    pub protocol: Option<ProtocolChoice>,
    /// Variable to solve for.
    #[arg(long, value_enum, default_value = "T")]
    pub search: SearchVariable,
    /// Thermal-background scenario: V0 = W = 2n + 1, direct reconciliation.
    #[arg(long)]
    pub wireless: bool,
    /// Fixed transmission for --search beta.
    #[arg(long = "T", value_name = "T")]
    pub t: Option<f64>,
    #[arg(long = "W", value_name = "W", default_value_t = 1.0)]
    pub w: f64,
    /// Defaults to 1e5, or 1e8 with --wireless.
    #[arg(long = "Vs", value_name = "VS")]
    pub vs: Option<f64>,
    /// Fixed carrier variance for --search T.
    #[arg(long = "V0", value_name = "V0", conflicts_with = "beta")]
    pub v0: Option<f64>,
    #[arg(long, value_name = "BETA")]
    pub beta: Option<f64>,
    /// Lower end of the search bracket.
    #[arg(long, value_name = "X")]
    pub lo: Option<f64>,
    /// Upper end of the search bracket.
    #[arg(long, value_name = "X")]
    pub hi: Option<f64>,
    /// Absolute tolerance on T, relative tolerance on beta.
    #[arg(long, value_name = "TOL")]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub env: WirelessArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepVariable {
    #[value(name = "T")]
    T,
    #[value(name = "beta")]
    Beta,
    #[value(name = "V0")]
    V0,
    #[value(name = "W")]
    W,
    #[value(name = "Vs")]
    Vs,
    #[value(name = "omega")]
    Omega,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepMode {
    Rate,
    NoiseThreshold,
    TransmissionThreshold,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value = "rate")]
    pub mode: SweepMode,
    /// Swept variable; omega sweeps use the thermal background.
    #[arg(long, value_enum)]
    pub var: SweepVariable,
    #[arg(long)]
    pub start: f64,
    #[arg(long)]
    pub stop: f64,
    #[arg(long)]
    pub count: usize,
    #[arg(long, value_enum, default_value = "linear")]
    pub spacing: Spacing,
    /// One or more protocols, comma separated.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "best")]
    pub protocol: Vec<ProtocolChoice>,
    #[arg(long = "T", value_name = "T", value_delimiter = ',')]
    pub t: Vec<f64>,
    #[arg(long = "W", value_name = "W", value_delimiter = ',')]
    pub w: Vec<f64>,
    #[arg(long = "Vs", value_name = "VS", value_delimiter = ',')]
    pub vs: Vec<f64>,
    #[arg(long = "V0", value_name = "V0", value_delimiter = ',', conflicts_with = "beta")]
    pub v0: Vec<f64>,
    #[arg(long, value_name = "BETA", value_delimiter = ',')]
    pub beta: Vec<f64>,
    /// Background temperature in kelvin for omega sweeps.
    #[arg(long, value_name = "KELVIN", value_delimiter = ',')]
    pub temp: Vec<f64>,
    #[arg(long, value_name = "X")]
    pub lo: Option<f64>,
    #[arg(long, value_name = "X")]
    pub hi: Option<f64>,
    #[arg(long, value_name = "TOL")]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SelfcheckArgs {
    /// Agreement tolerance for oracle and identity checks.
    #[arg(long, default_value_t = super::selfcheck::DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    /// Random covariance matrices for the oracle comparison.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = super::selfcheck::DEFAULT_SEED)]
    pub seed: u64,
    /// Override the reduced Planck constant (J s).
    #[arg(long)]
    pub hbar: Option<f64>,
    /// Override the Boltzmann constant (J/K).
    #[arg(long)]
    pub kb: Option<f64>,
}
