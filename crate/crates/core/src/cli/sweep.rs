//! Grid sweeps emitted as CSV.
//!
//! Columns depend only on the mode and on whether the sweep runs over the
//! thermal background (`--var omega`):
//!
//! | mode | columns |
//! |------|---------|
//! | rate | `protocol,[omega,temperature,]T,W,Vs,V0,beta,i_ab,holevo,rate,secure` |
//! | noise-threshold | `protocol,T,W,Vs,beta_star,verdict,fil08_bound` |
//! | transmission-threshold | `protocol,[omega,temperature,]W,Vs,V0,beta,T_star,verdict` |
//!
//! Rows run over protocols, then T, W, Vs, V0 and temperature lists, then
//! the swept variable. `protocol` holds the protocol actually used (the
//! winner for `best`). Threshold columns hold the crossing; a noise search
//! that is insecure everywhere reports `beta_star = 0`, other verdicts
//! leave the value as `nan`. Rows that fail to evaluate keep their inputs,
//! print `nan` outputs and the verdict `error`.

use std::io::Write;

use rayon::prelude::*;

use super::args::{ProtocolChoice, Spacing, SweepArgs, SweepMode, SweepVariable};
use super::eval;
use super::format::format_number;
use super::CliError;
use crate::channel::{ChannelParams, ModulationParams};
use crate::keyrate::{fil08_bound, Protocol, ThresholdOutcome, ThresholdQuery};
use crate::thermal::{ThermalEnvironment, WirelessScenario, DEFAULT_WIRELESS_TOLERANCE};

pub const DEFAULT_W: f64 = 1.0;
pub const DEFAULT_VS: f64 = 1e5;
pub const DEFAULT_V0: f64 = 1.0;
pub const DEFAULT_TEMPERATURE: f64 = 300.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl Grid {
    pub fn new(start: f64, stop: f64, count: usize, spacing: Spacing) -> Result<Self, CliError> {
        if count < 2 {
            return Err(CliError::Usage(format!("--count must be at least 2, got {count}")));
        }
        if !(start.is_finite() && stop.is_finite() && start < stop) {
            return Err(CliError::Usage(format!("need finite --start < --stop, got {start} and {stop}")));
        }
        if spacing == Spacing::Log && !(start > 0.0) {
            return Err(CliError::Usage(format!("log spacing needs --start > 0, got {start}")));
        }
        Ok(Self { start, stop, count, spacing })
    }

    /// Grid points; both endpoints are reproduced exactly.
    pub fn values(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i == 0 {
                    return self.start;
                }
                if i == self.count - 1 {
                    return self.stop;
                }
                let u = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.start + (self.stop - self.start) * u,
                    Spacing::Log => (self.start.ln() + (self.stop.ln() - self.start.ln()) * u).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub mode: SweepMode,
    pub variable: SweepVariable,
    pub grid: Grid,
    pub protocols: Vec<ProtocolChoice>,
    pub t: Vec<f64>,
    pub w: Vec<f64>,
    pub vs: Vec<f64>,
    pub v0: Vec<f64>,
    pub temperature: Vec<f64>,
    pub bracket: (Option<f64>, Option<f64>),
    pub tolerance: Option<f64>,
}

fn or_default(v: &[f64], default: f64) -> Vec<f64> {
    if v.is_empty() {
        vec![default]
    } else {
        v.to_vec()
    }
}

impl SweepSpec {
    pub fn from_args(a: &SweepArgs) -> Result<Self, CliError> {
        use SweepVariable as V;
        let grid = Grid::new(a.start, a.stop, a.count, a.spacing)?;
        let allowed: &[V] = match a.mode {
            SweepMode::Rate => &[V::T, V::Beta, V::V0, V::W, V::Vs, V::Omega],
            SweepMode::NoiseThreshold => &[V::T, V::W, V::Vs],
            SweepMode::TransmissionThreshold => &[V::Beta, V::V0, V::W, V::Vs, V::Omega],
        };
        if !allowed.contains(&a.var) {
            return Err(CliError::Usage(format!("--var {:?} cannot be swept in {:?} mode", a.var, a.mode)));
        }
        let clash = |given: bool, name: &str| -> Result<(), CliError> {
            if given {
                Err(CliError::Usage(format!("--{name} is fixed by the sweep or the mode and cannot be given")))
            } else {
                Ok(())
            }
        };
        let wireless = a.var == V::Omega;
        let carrier_set = !a.v0.is_empty() || !a.beta.is_empty();
        clash(a.var == V::T && !a.t.is_empty(), "T")?;
        clash(a.mode == SweepMode::TransmissionThreshold && !a.t.is_empty(), "T")?;
        clash(a.var == V::W && !a.w.is_empty(), "W")?;
        clash(a.var == V::Vs && !a.vs.is_empty(), "Vs")?;
        clash(matches!(a.var, V::V0 | V::Beta) && carrier_set, "V0/--beta")?;
        clash(a.mode == SweepMode::NoiseThreshold && carrier_set, "V0/--beta")?;
        clash(wireless && (carrier_set || !a.w.is_empty()), "W/--V0/--beta")?;
        clash(!wireless && !a.temp.is_empty(), "temp")?;
        let needs_t = a.mode != SweepMode::TransmissionThreshold && a.var != V::T;
        if needs_t && a.t.is_empty() {
            return Err(CliError::Usage("--T is required unless T is swept or searched".into()));
        }
        let v0 =
            if a.beta.is_empty() { or_default(&a.v0, DEFAULT_V0) } else { a.beta.iter().map(|b| 1.0 + b).collect() };
        Ok(Self {
            mode: a.mode,
            variable: a.var,
            grid,
            protocols: a.protocol.clone(),
            t: if needs_t { a.t.clone() } else { vec![f64::NAN] },
            w: or_default(&a.w, DEFAULT_W),
            vs: or_default(&a.vs, DEFAULT_VS),
            v0,
            temperature: if wireless { or_default(&a.temp, DEFAULT_TEMPERATURE) } else { vec![f64::NAN] },
            bracket: (a.lo, a.hi),
            tolerance: a.tol,
        })
    }

    pub fn wireless(&self) -> bool {
        self.variable == SweepVariable::Omega
    }

    pub fn header(&self) -> Vec<&'static str> {
        let mut h = vec!["protocol"];
        if self.wireless() {
            h.extend(["omega", "temperature"]);
        }
        match self.mode {
            SweepMode::Rate => h.extend(["T", "W", "Vs", "V0", "beta", "i_ab", "holevo", "rate", "secure"]),
            SweepMode::NoiseThreshold => h.extend(["T", "W", "Vs", "beta_star", "verdict", "fil08_bound"]),
            SweepMode::TransmissionThreshold => h.extend(["W", "Vs", "V0", "beta", "T_star", "verdict"]),
        }
        h
    }

    /// Grid points in output order.
    pub fn points(&self) -> Vec<Point> {
        let xs = self.grid.values();
        let mut out = Vec::new();
        for &protocol in &self.protocols {
            for &t in &self.t {
                for &w in &self.w {
                    for &vs in &self.vs {
                        for &v0 in &self.v0 {
                            for &temperature in &self.temperature {
                                for &x in &xs {
                                    let mut p = Point { protocol, t, w, vs, v0, omega: f64::NAN, temperature };
                                    match self.variable {
                                        SweepVariable::T => p.t = x,
                                        SweepVariable::Beta => p.v0 = 1.0 + x,
                                        SweepVariable::V0 => p.v0 = x,
                                        SweepVariable::W => p.w = x,
                                        SweepVariable::Vs => p.vs = x,
                                        SweepVariable::Omega => p.omega = x,
                                    }
                                    out.push(p);
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    fn transmission_query(&self, p: Protocol, w: f64, vs: f64, beta: f64, tolerance: f64) -> ThresholdQuery {
        let q = ThresholdQuery::transmission(p, w, vs, beta).with_tolerance(self.tolerance.unwrap_or(tolerance));
        self.apply_bracket(q)
    }

    fn apply_bracket(&self, q: ThresholdQuery) -> ThresholdQuery {
        let (lo, hi) = q.bracket();
        q.with_bracket(self.bracket.0.unwrap_or(lo), self.bracket.1.unwrap_or(hi))
    }

    /// Evaluates one point into its CSV fields.
    pub fn evaluate(&self, point: &Point) -> Result<Vec<String>, (Vec<String>, String)> {
        let mut p = *point;
        let mut fields = vec![p.protocol.name().to_string()];
        if self.wireless() {
            match ThermalEnvironment::new(p.omega, p.temperature) {
                Ok(env) => {
                    let v = WirelessScenario::new(env).thermal_variance();
                    p.w = v;
                    p.v0 = v;
                }
                Err(_) => {
                    p.w = f64::NAN;
                    p.v0 = f64::NAN;
                }
            }
            fields.push(format_number(p.omega));
            fields.push(format_number(p.temperature));
        }
        let num = |x: f64| format_number(x);
        match self.mode {
            SweepMode::Rate => {
                fields.extend([num(p.t), num(p.w), num(p.vs), num(p.v0), num(p.v0 - 1.0)]);
                let result = ChannelParams::new(p.t, p.w)
                    .and_then(|ch| Ok((ch, ModulationParams::new(p.vs, p.v0)?)))
                    .and_then(|(ch, m)| eval::rate(p.protocol, &ch, &m));
                match result {
                    Ok(r) => {
                        fields[0] = r.protocol.short_name().into();
                        fields.extend([num(r.i_ab), num(r.holevo), num(r.rate), r.secure.to_string()]);
                        Ok(fields)
                    }
                    Err(e) => {
                        fields.extend(["nan"; 4].map(String::from));
                        Err((fields, e.to_string()))
                    }
                }
            }
            SweepMode::NoiseThreshold => {
                fields.extend([num(p.t), num(p.w), num(p.vs)]);
                let result = eval::noise(p.protocol, |proto| {
                    let q = ThresholdQuery::noise(proto, p.w, p.vs, p.t);
                    let q = match self.tolerance {
                        Some(tol) => q.with_tolerance(tol),
                        None => q,
                    };
                    self.apply_bracket(q)
                });
                let bound = fil08_bound(p.t).map_or("nan".into(), num);
                match result {
                    Ok((proto, outcome)) => {
                        fields[0] = proto.short_name().into();
                        let value = match outcome {
                            ThresholdOutcome::Threshold(b) => num(b),
                            ThresholdOutcome::NeverSecure => "0".into(),
                            ThresholdOutcome::AlwaysSecure => "nan".into(),
                        };
                        fields.extend([value, outcome.verdict().into(), bound]);
                        Ok(fields)
                    }
                    Err(e) => {
                        fields.extend(["nan".into(), "error".into(), bound]);
                        Err((fields, e.to_string()))
                    }
                }
            }
            SweepMode::TransmissionThreshold => {
                fields.extend([num(p.w), num(p.vs), num(p.v0), num(p.v0 - 1.0)]);
                let tolerance = if self.wireless() {
                    DEFAULT_WIRELESS_TOLERANCE
                } else {
                    crate::keyrate::DEFAULT_TRANSMISSION_TOLERANCE
                };
                let result = if p.w.is_nan() {
                    Err(crate::Error::InvalidArgument(format!(
                        "invalid thermal background omega = {}, temperature = {}",
                        p.omega, p.temperature
                    )))
                } else {
                    eval::transmission(p.protocol, |proto| {
                        self.transmission_query(proto, p.w, p.vs, p.v0 - 1.0, tolerance)
                    })
                };
                match result {
                    Ok((proto, outcome)) => {
                        fields[0] = proto.short_name().into();
                        fields.extend([outcome.value().map_or("nan".into(), num), outcome.verdict().into()]);
                        Ok(fields)
                    }
                    Err(e) => {
                        fields.extend(["nan".into(), "error".into()]);
                        Err((fields, e.to_string()))
                    }
                }
            }
        }
    }

    /// Evaluates every point on `threads` workers (0 = one per core);
    /// rows come back in grid order.
    pub fn run(&self, threads: usize) -> Result<SweepOutput, CliError> {
        let points = self.points();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::Runtime(format!("cannot start worker pool: {e}")))?;
        let results: Vec<_> = pool.install(|| points.par_iter().map(|p| self.evaluate(p)).collect());
        let mut rows = Vec::with_capacity(results.len());
        let mut errors = Vec::new();
        for (i, r) in results.into_iter().enumerate() {
            match r {
                Ok(fields) => rows.push(fields),
                Err((fields, msg)) => {
                    errors.push(format!("row {}: {msg}", i + 1));
                    rows.push(fields);
                }
            }
        }
        Ok(SweepOutput { header: self.header(), rows, errors })
    }
}

/// One grid point before evaluation. `NaN` marks fields that do not apply.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub protocol: ProtocolChoice,
    pub t: f64,
    pub w: f64,
    pub vs: f64,
    pub v0: f64,
    pub omega: f64,
    pub temperature: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    /// One message per row that failed to evaluate.
    pub errors: Vec<String>,
}

impl SweepOutput {
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_exact() {
        let g = Grid::new(0.01, 1.0, 100, Spacing::Linear).unwrap();
        let v = g.values();
        assert_eq!((v[0], v[99], v.len()), (0.01, 1.0, 100));
        let g = Grid::new(1e9, 1e19, 11, Spacing::Log).unwrap();
        let v = g.values();
        assert_eq!((v[0], v[10]), (1e9, 1e19));
        assert!((v[5] / 1e14 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(0.0, 1.0, 1, Spacing::Linear).is_err());
        assert!(Grid::new(1.0, 0.5, 10, Spacing::Linear).is_err());
        assert!(Grid::new(0.0, 1.0, 10, Spacing::Log).is_err());
        assert!(Grid::new(0.0, f64::NAN, 10, Spacing::Linear).is_err());
    }
}
