//! The record printed by `rate` and `threshold`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::format::{format_number, round_sig};
use crate::keyrate::{KeyRateResult, ThresholdOutcome};

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RecordResult {
    Rate { i_ab: f64, holevo: f64, rate: f64, secure: bool },
    Threshold { search: String, verdict: String, value: Option<f64> },
}

/// One evaluation with its inputs. Numbers are stored already rounded to
/// the output precision so that emitting and re-parsing is lossless.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub engine_version: String,
    pub selfcheck: String,
    pub protocol: String,
    pub inputs: BTreeMap<String, f64>,
    pub result: RecordResult,
}

impl RunRecord {
    fn new(command: &str, protocol: &str, inputs: &[(&str, f64)], result: RecordResult) -> Self {
        Self {
            command: command.into(),
            engine_version: ENGINE_VERSION.into(),
            selfcheck: "not-run".into(),
            protocol: protocol.into(),
            inputs: inputs.iter().map(|&(k, v)| (k.to_string(), round_sig(v))).collect(),
            result,
        }
    }

    pub fn rate(inputs: &[(&str, f64)], r: &KeyRateResult) -> Self {
        let result = RecordResult::Rate {
            i_ab: round_sig(r.i_ab),
            holevo: round_sig(r.holevo),
            rate: round_sig(r.rate),
            secure: r.secure,
        };
        Self::new("rate", r.protocol.short_name(), inputs, result)
    }

    pub fn threshold(protocol: &str, search: &str, inputs: &[(&str, f64)], outcome: &ThresholdOutcome) -> Self {
        let result = RecordResult::Threshold {
            search: search.into(),
            verdict: outcome.verdict().into(),
            value: outcome.value().map(round_sig),
        };
        Self::new("threshold", protocol, inputs, result)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    /// `key = value` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: &str| {
            let _ = writeln!(out, "{k:<15} {v}");
        };
        line("command", &self.command);
        line("protocol", &self.protocol);
        for (k, v) in &self.inputs {
            line(k, &format_number(*v));
        }
        match &self.result {
            RecordResult::Rate { i_ab, holevo, rate, secure } => {
                line("i_ab", &format_number(*i_ab));
                line("holevo", &format_number(*holevo));
                line("rate", &format_number(*rate));
                line("secure", &secure.to_string());
            }
            RecordResult::Threshold { search, verdict, value } => {
                line("search", search);
                line("verdict", verdict);
                line("threshold", &value.map_or("nan".into(), format_number));
            }
        }
        line("engine_version", &self.engine_version);
        line("selfcheck", &self.selfcheck);
        out
    }
}
