//! Secret key rates for direct and reverse reconciliation, security
//! thresholds and protocol selection.
//!
//! Rates are ideal (perfect reconciliation, asymptotic key): Shannon
//! information between Alice and Bob minus Eve's Holevo bound.

use std::fmt;
use std::str::FromStr;

use crate::channel::{mutual_information_ab, ChannelParams, ModulationParams};
use crate::error::{ensure_finite, Error, Result};
use crate::eve::{holevo_dr_report, holevo_rr_report};

pub const DEFAULT_TRANSMISSION_BRACKET: (f64, f64) = (0.01, 1.0);
pub const DEFAULT_TRANSMISSION_TOLERANCE: f64 = 1e-5;
pub const DEFAULT_NOISE_BRACKET: (f64, f64) = (1e-4, 1e6);
pub const DEFAULT_NOISE_TOLERANCE: f64 = 1e-3;

/// Reconciliation direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Protocol {
    /// Bob and Eve estimate Alice's encoding.
    Direct,
    /// Alice and Eve estimate Bob's measurement.
    Reverse,
}

impl Protocol {
    pub const ALL: [Protocol; 2] = [Protocol::Direct, Protocol::Reverse];

    pub fn short_name(&self) -> &'static str {
        match self {
            Protocol::Direct => "dr",
            Protocol::Reverse => "rr",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dr" | "direct" => Ok(Protocol::Direct),
            "rr" | "reverse" => Ok(Protocol::Reverse),
            _ => Err(Error::InvalidArgument(format!("unknown protocol '{s}' (expected dr or rr)"))),
        }
    }
}

/// Key rate of one protocol at one operating point, in bits per use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyRateResult {
    pub protocol: Protocol,
    pub i_ab: f64,
    pub holevo: f64,
    /// `i_ab − holevo`; negative when no key can be distilled.
    pub rate: f64,
    pub secure: bool,
    /// Rounding bound on `rate` from the entropies it is built from.
    pub resolution: f64,
}

impl KeyRateResult {
    fn new(protocol: Protocol, i_ab: f64, holevo: f64, entropy_scale: f64) -> Self {
        let rate = i_ab - holevo;
        let resolution = 8.0 * f64::EPSILON * (i_ab.abs() + entropy_scale);
        Self { protocol, i_ab, holevo, rate, secure: rate > 0.0, resolution }
    }

    /// Whether the sign of `rate` is above rounding noise.
    pub fn is_resolved(&self) -> bool {
        self.rate.abs() > self.resolution || self.resolution == 0.0
    }
}

/// `R◀ = I(X_A:X_B) − I(X_B:E)` or `R▶ = I(X_A:X_B) − I(X_A:E)`.
pub fn key_rate(protocol: Protocol, ch: &ChannelParams, modulation: &ModulationParams) -> Result<KeyRateResult> {
    let i_ab = mutual_information_ab(ch, modulation);
    let report = match protocol {
        Protocol::Direct => holevo_dr_report(ch, modulation)?,
        Protocol::Reverse => holevo_rr_report(ch, modulation)?,
    };
    Ok(KeyRateResult::new(protocol, i_ab, report.holevo, report.s_e + report.s_conditional))
}

/// The protocol with the larger rate; ties go to reverse reconciliation.
///
/// With noisy preparation on a lossy channel this picks reverse
/// reconciliation below `T = 0.5` and direct reconciliation above it.
pub fn best_protocol(ch: &ChannelParams, modulation: &ModulationParams) -> Result<Protocol> {
    Ok(best_key_rate(ch, modulation)?.protocol)
}

/// Rate of the protocol chosen by [`best_protocol`].
pub fn best_key_rate(ch: &ChannelParams, modulation: &ModulationParams) -> Result<KeyRateResult> {
    let direct = key_rate(Protocol::Direct, ch, modulation)?;
    let reverse = key_rate(Protocol::Reverse, ch, modulation)?;
    Ok(if direct.rate > reverse.rate { direct } else { reverse })
}

/// Previously known reverse-reconciliation noise bound `β < 1/(1 − T)`.
///
/// Returns infinity at `T = 1`.
pub fn fil08_bound(t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!("transmission T must lie in [0, 1], got {t}")));
    }
    if t == 1.0 {
        return Ok(f64::INFINITY);
    }
    Ok(1.0 / (1.0 - t))
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Search {
    Transmission { beta: f64 },
    Noise { t: f64 },
}

/// A security-threshold search: everything fixed but `T` or `β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdQuery {
    pub protocol: Protocol,
    pub w: f64,
    pub v_s: f64,
    search: Search,
    bracket: (f64, f64),
    tolerance: f64,
}

impl ThresholdQuery {
    /// Search over `T` at fixed preparation noise `beta`.
    pub fn transmission(protocol: Protocol, w: f64, v_s: f64, beta: f64) -> Self {
        Self {
            protocol,
            w,
            v_s,
            search: Search::Transmission { beta },
            bracket: DEFAULT_TRANSMISSION_BRACKET,
            tolerance: DEFAULT_TRANSMISSION_TOLERANCE,
        }
    }

    /// Search over `β` at fixed transmission `t`.
    pub fn noise(protocol: Protocol, w: f64, v_s: f64, t: f64) -> Self {
        Self {
            protocol,
            w,
            v_s,
            search: Search::Noise { t },
            bracket: DEFAULT_NOISE_BRACKET,
            tolerance: DEFAULT_NOISE_TOLERANCE,
        }
    }

    /// Search interval. For noise searches the endpoints are values of `β`.
    pub fn with_bracket(mut self, lo: f64, hi: f64) -> Self {
        self.bracket = (lo, hi);
        self
    }

    /// Absolute tolerance on `T`, or relative tolerance on `β`.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn bracket(&self) -> (f64, f64) {
        self.bracket
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// The fixed `β` of a transmission search.
    pub fn fixed_beta(&self) -> Option<f64> {
        match self.search {
            Search::Transmission { beta } => Some(beta),
            Search::Noise { .. } => None,
        }
    }

    /// The fixed `T` of a noise search.
    pub fn fixed_t(&self) -> Option<f64> {
        match self.search {
            Search::Noise { t } => Some(t),
            Search::Transmission { .. } => None,
        }
    }

    fn validate(&self) -> Result<()> {
        ensure_finite("W", self.w)?;
        ensure_finite("V_S", self.v_s)?;
        ensure_finite("tolerance", self.tolerance)?;
        let (lo, hi) = self.bracket;
        if !(lo < hi) {
            return Err(Error::InvalidArgument(format!("bracket [{lo}, {hi}] must satisfy lo < hi")));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        Ok(())
    }

    fn rate_at(&self, t: f64, beta: f64) -> Result<f64> {
        let ch = ChannelParams::new(t, self.w)?;
        let modulation = ModulationParams::from_beta(self.v_s, beta)?;
        Ok(key_rate(self.protocol, &ch, &modulation)?.rate)
    }

    /// Rate at a bracket end, which must have a definite sign.
    fn endpoint_rate(&self, t: f64, beta: f64) -> Result<f64> {
        let ch = ChannelParams::new(t, self.w)?;
        let modulation = ModulationParams::from_beta(self.v_s, beta)?;
        let r = key_rate(self.protocol, &ch, &modulation)?;
        if !r.is_resolved() {
            return Err(Error::Numeric(format!(
                "rate {:e} at bracket end T = {t}, beta = {beta} is below its rounding bound {:e}; narrow the bracket",
                r.rate, r.resolution
            )));
        }
        Ok(r.rate)
    }
}

/// Result of a threshold search over a bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdOutcome {
    /// The rate changes sign at this value.
    Threshold(f64),
    /// The rate is positive over the whole bracket.
    AlwaysSecure,
    /// The rate is non-positive over the whole bracket.
    NeverSecure,
}

impl ThresholdOutcome {
    pub fn value(&self) -> Option<f64> {
        match self {
            ThresholdOutcome::Threshold(x) => Some(*x),
            _ => None,
        }
    }

    pub fn verdict(&self) -> &'static str {
        match self {
            ThresholdOutcome::Threshold(_) => "threshold",
            ThresholdOutcome::AlwaysSecure => "always-secure",
            ThresholdOutcome::NeverSecure => "never-secure",
        }
    }
}

/// Bisects between a secure and an insecure point until `done` holds,
/// returning the last secure point.
fn bisect(
    mut secure: f64,
    mut insecure: f64,
    done: impl Fn(f64, f64) -> bool,
    mut is_secure: impl FnMut(f64) -> Result<bool>,
) -> Result<f64> {
    while !done(secure, insecure) {
        let mid = 0.5 * (secure + insecure);
        if mid == secure || mid == insecure {
            break;
        }
        if is_secure(mid)? {
            secure = mid;
        } else {
            insecure = mid;
        }
    }
    Ok(secure)
}

/// Smallest transmission with a positive rate, to within the query tolerance.
///
/// The rate grows with `T`, so a positive rate at the lower end means the
/// whole bracket is secure and a non-positive rate at the upper end means
/// none of it is.
pub fn transmission_threshold(q: &ThresholdQuery) -> Result<ThresholdOutcome> {
    let Search::Transmission { beta } = q.search else {
        return Err(Error::InvalidArgument("transmission_threshold needs a query with fixed beta".into()));
    };
    q.validate()?;
    let (lo, hi) = q.bracket;
    if lo < 0.0 || hi > 1.0 {
        return Err(Error::InvalidArgument(format!("transmission bracket [{lo}, {hi}] must lie in [0, 1]")));
    }
    if q.endpoint_rate(lo, beta)? > 0.0 {
        return Ok(ThresholdOutcome::AlwaysSecure);
    }
    if q.endpoint_rate(hi, beta)? <= 0.0 {
        return Ok(ThresholdOutcome::NeverSecure);
    }
    let t = bisect(hi, lo, |a, b| (a - b).abs() <= q.tolerance, |t| Ok(q.rate_at(t, beta)? > 0.0))?;
    Ok(ThresholdOutcome::Threshold(t))
}

/// Largest preparation noise `β` with a positive rate, bisected in `log β`
/// to the query's relative tolerance.
///
/// The rate falls with `β`; [`ThresholdOutcome::NeverSecure`] means even
/// the lower end of the bracket (effectively `β = 0`) is insecure.
pub fn noise_threshold(q: &ThresholdQuery) -> Result<ThresholdOutcome> {
    let Search::Noise { t } = q.search else {
        return Err(Error::InvalidArgument("noise_threshold needs a query with fixed T".into()));
    };
    q.validate()?;
    let (lo, hi) = q.bracket;
    if !(lo > 0.0) || !hi.is_finite() {
        return Err(Error::InvalidArgument(format!("noise bracket [{lo}, {hi}] must be positive and finite")));
    }
    if q.endpoint_rate(t, lo)? <= 0.0 {
        return Ok(ThresholdOutcome::NeverSecure);
    }
    if q.endpoint_rate(t, hi)? > 0.0 {
        return Ok(ThresholdOutcome::AlwaysSecure);
    }
    let log_tol = q.tolerance.ln_1p();
    let x = bisect(lo.ln(), hi.ln(), |a, b| (a - b).abs() <= log_tol, |x| Ok(q.rate_at(t, x.exp())? > 0.0))?;
    Ok(ThresholdOutcome::Threshold(x.exp()))
}
