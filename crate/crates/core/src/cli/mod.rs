//! Command-line front end: `rate`, `sweep`, `threshold` and `selfcheck`.
//!
//! Exit codes: 0 success, 1 selfcheck failure, 2 usage error, 3 numeric
//! or I/O error.

pub mod args;
pub mod config;
pub mod eval;
pub mod format;
pub mod record;
pub mod selfcheck;
pub mod sweep;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use clap::Parser;

use crate::channel::{ChannelParams, ModulationParams};
use crate::keyrate::ThresholdQuery;
use crate::thermal::{PhysicalConstants, ThermalEnvironment, WirelessScenario, DEFAULT_WIRELESS_SIGNAL};
use crate::Error;
use args::{Cli, Command, ProtocolChoice, RateArgs, SearchVariable, SelfcheckArgs, SweepArgs, ThresholdArgs};
use record::RunRecord;
use selfcheck::{run_selfcheck, SelfcheckOptions};
use sweep::SweepSpec;

pub const EXIT_OK: i32 = 0;
pub const EXIT_SELFCHECK: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
    #[error("selfcheck failed: {0}")]
    Selfcheck(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Runtime(_) => EXIT_RUNTIME,
            CliError::Selfcheck(_) => EXIT_SELFCHECK,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) => CliError::Usage(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Runtime(format!("I/O error: {e}"))
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run(args: impl IntoIterator<Item = OsString>) -> i32 {
    let args = match config::expand_args(args.into_iter().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("cvqkd: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("cvqkd: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Rate(a) => emit_record(cli, &cmd_rate(a)?),
        Command::Threshold(a) => emit_record(cli, &cmd_threshold(a)?),
        Command::Sweep(a) => cmd_sweep(cli, a),
        Command::Selfcheck(a) => cmd_selfcheck(cli, a),
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit_record(cli: &Cli, record: &RunRecord) -> Result<(), CliError> {
    let mut out = open_output(cli.out.as_deref())?;
    if cli.json {
        writeln!(out, "{}", record.to_json())?;
    } else {
        write!(out, "{}", record.to_text())?;
    }
    out.flush()?;
    Ok(())
}

fn carrier(v0: Option<f64>, beta: Option<f64>) -> Option<f64> {
    v0.or(beta.map(|b| 1.0 + b))
}

pub fn cmd_rate(a: &RateArgs) -> Result<RunRecord, CliError> {
    let mut inputs = Vec::new();
    let (w, v0) = match a.wireless.omega() {
        Some(omega) => {
            if carrier(a.v0, a.beta).is_some() {
                return Err(CliError::Usage("--V0/--beta are set by the thermal background".into()));
            }
            let env = ThermalEnvironment::new(omega, a.wireless.temp)?;
            let v = WirelessScenario::new(env).thermal_variance();
            inputs.extend([("omega", omega), ("temperature", a.wireless.temp)]);
            (v, v)
        }
        None => (a.w, carrier(a.v0, a.beta).unwrap_or(1.0)),
    };
    let ch = ChannelParams::new(a.t, w)?;
    let m = ModulationParams::new(a.vs, v0)?;
    inputs.extend([("T", a.t), ("W", w), ("Vs", a.vs), ("V0", v0)]);
    let r = eval::rate(a.protocol, &ch, &m)?;
    Ok(RunRecord::rate(&inputs, &r))
}

pub fn cmd_threshold(a: &ThresholdArgs) -> Result<RunRecord, CliError> {
    let bracketed = |q: ThresholdQuery| {
        let (lo, hi) = q.bracket();
        let q = q.with_bracket(a.lo.unwrap_or(lo), a.hi.unwrap_or(hi));
        match a.tol {
            Some(tol) => q.with_tolerance(tol),
            None => q,
        }
    };
    if a.wireless {
        let omega =
            a.env.omega().ok_or_else(|| CliError::Usage("--wireless needs --freq-ghz or --omega-rad-s".into()))?;
        if a.search != SearchVariable::T || a.t.is_some() || carrier(a.v0, a.beta).is_some() {
            return Err(CliError::Usage("--wireless searches T with V0 and W set by the background".into()));
        }
        let choice = a.protocol.unwrap_or(ProtocolChoice::Dr);
        let vs = a.vs.unwrap_or(DEFAULT_WIRELESS_SIGNAL);
        let scenario = WirelessScenario::new(ThermalEnvironment::new(omega, a.env.temp)?).with_signal(vs);
        let v = scenario.thermal_variance();
        let (p, outcome) = eval::transmission(choice, |p| bracketed(scenario.threshold_query(p)))?;
        let inputs = [("omega", omega), ("temperature", a.env.temp), ("Vs", vs), ("W", v), ("V0", v)];
        return Ok(RunRecord::threshold(p.short_name(), "T", &inputs, &outcome));
    }
    if a.env.omega().is_some() {
        return Err(CliError::Usage("--freq-ghz/--omega-rad-s need --wireless".into()));
    }
    let choice = a.protocol.unwrap_or(ProtocolChoice::Best);
    let vs = a.vs.unwrap_or(sweep::DEFAULT_VS);
    match a.search {
        SearchVariable::T => {
            if a.t.is_some() {
                return Err(CliError::Usage("--T is the searched variable".into()));
            }
            let v0 = carrier(a.v0, a.beta).unwrap_or(1.0);
            ModulationParams::new(vs, v0)?;
            let (p, outcome) =
                eval::transmission(choice, |p| bracketed(ThresholdQuery::transmission(p, a.w, vs, v0 - 1.0)))?;
            Ok(RunRecord::threshold(p.short_name(), "T", &[("W", a.w), ("Vs", vs), ("V0", v0)], &outcome))
        }
        SearchVariable::Beta => {
            if carrier(a.v0, a.beta).is_some() {
                return Err(CliError::Usage("--V0/--beta is the searched variable".into()));
            }
            let t = a.t.ok_or_else(|| CliError::Usage("--search beta needs --T".into()))?;
            ChannelParams::new(t, a.w)?;
            let (p, outcome) = eval::noise(choice, |p| bracketed(ThresholdQuery::noise(p, a.w, vs, t)))?;
            Ok(RunRecord::threshold(p.short_name(), "beta", &[("T", t), ("W", a.w), ("Vs", vs)], &outcome))
        }
    }
}

fn cmd_sweep(cli: &Cli, a: &SweepArgs) -> Result<(), CliError> {
    let spec = SweepSpec::from_args(a)?;
    let output = spec.run(cli.parallel)?;
    for e in &output.errors {
        eprintln!("cvqkd: {e}");
    }
    let mut out = open_output(cli.out.as_deref())?;
    output.write_csv(&mut out)?;
    out.flush()?;
    Ok(())
}

fn cmd_selfcheck(cli: &Cli, a: &SelfcheckArgs) -> Result<(), CliError> {
    let consts = PhysicalConstants {
        hbar: a.hbar.unwrap_or(PhysicalConstants::SI_2019.hbar),
        k_b: a.kb.unwrap_or(PhysicalConstants::SI_2019.k_b),
    };
    if !(a.tolerance > 0.0) {
        return Err(CliError::Usage(format!("--tolerance must be positive, got {}", a.tolerance)));
    }
    let report = run_selfcheck(&SelfcheckOptions { tolerance: a.tolerance, samples: a.samples, seed: a.seed, consts });
    let mut out = open_output(cli.out.as_deref())?;
    if cli.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("report serializes"))?;
    } else {
        write!(out, "{}", report.to_text())?;
    }
    out.flush()?;
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Selfcheck(report.failed().join(", ")))
    }
}
