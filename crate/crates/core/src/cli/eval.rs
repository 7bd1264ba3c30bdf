//! Protocol-choice aware wrappers over the key-rate engine.

use super::args::ProtocolChoice;
use crate::channel::{ChannelParams, ModulationParams};
use crate::keyrate::{
    best_key_rate, key_rate, noise_threshold, transmission_threshold, KeyRateResult, Protocol, ThresholdOutcome,
    ThresholdQuery,
};
use crate::Result;

pub fn rate(choice: ProtocolChoice, ch: &ChannelParams, modulation: &ModulationParams) -> Result<KeyRateResult> {
    match choice.fixed() {
        Some(p) => key_rate(p, ch, modulation),
        None => best_key_rate(ch, modulation),
    }
}

/// Searches applied to `make(protocol)`; for `best`, the smallest
/// transmission threshold wins, ties going to reverse reconciliation.
pub fn transmission(
    choice: ProtocolChoice,
    make: impl Fn(Protocol) -> ThresholdQuery,
) -> Result<(Protocol, ThresholdOutcome)> {
    let score = |o: &ThresholdOutcome| match o {
        ThresholdOutcome::AlwaysSecure => f64::NEG_INFINITY,
        ThresholdOutcome::Threshold(t) => *t,
        ThresholdOutcome::NeverSecure => f64::INFINITY,
    };
    pick(choice, |p| transmission_threshold(&make(p)), |dr, rr| score(dr) < score(rr))
}

/// As [`transmission`]; for `best`, the largest tolerated noise wins.
pub fn noise(
    choice: ProtocolChoice,
    make: impl Fn(Protocol) -> ThresholdQuery,
) -> Result<(Protocol, ThresholdOutcome)> {
    let score = |o: &ThresholdOutcome| match o {
        ThresholdOutcome::AlwaysSecure => f64::INFINITY,
        ThresholdOutcome::Threshold(b) => *b,
        ThresholdOutcome::NeverSecure => 0.0,
    };
    pick(choice, |p| noise_threshold(&make(p)), |dr, rr| score(dr) > score(rr))
}

fn pick(
    choice: ProtocolChoice,
    search: impl Fn(Protocol) -> Result<ThresholdOutcome>,
    direct_wins: impl Fn(&ThresholdOutcome, &ThresholdOutcome) -> bool,
) -> Result<(Protocol, ThresholdOutcome)> {
    if let Some(p) = choice.fixed() {
        return Ok((p, search(p)?));
    }
    let dr = search(Protocol::Direct)?;
    let rr = search(Protocol::Reverse)?;
    Ok(if direct_wins(&dr, &rr) { (Protocol::Direct, dr) } else { (Protocol::Reverse, rr) })
}
