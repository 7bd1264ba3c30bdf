//! Blackbody background noise and the wireless scenario built on it.
//!
//! Frequencies are angular (rad/s). Quoted figures such as "300 GHz" are
//! reproduced by inserting the gigahertz number directly as `ω`, which is
//! what [`ThermalEnvironment::from_ghz_as_omega`] does; use
//! [`ThermalEnvironment::from_hertz`] for an ordinary frequency.

use crate::channel::{ChannelParams, ModulationParams};
use crate::error::{ensure_finite, Error, Result};
use crate::keyrate::{transmission_threshold, Protocol, ThresholdOutcome, ThresholdQuery};

/// Below this value of `ħω/k_BT` the occupation uses its series expansion.
pub const SERIES_THRESHOLD: f64 = 1e-6;
/// Above this value of `ħω/k_BT` the occupation is taken as zero.
pub const QUANTUM_CUTOFF: f64 = 700.0;
pub const DEFAULT_WIRELESS_SIGNAL: f64 = 1e8;
pub const DEFAULT_WIRELESS_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, J·s.
    pub hbar: f64,
    /// Boltzmann constant, J/K.
    pub k_b: f64,
}

impl PhysicalConstants {
    /// Exact SI values since 2019.
    pub const SI_2019: PhysicalConstants = PhysicalConstants { hbar: 1.054571817e-34, k_b: 1.380649e-23 };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::SI_2019
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalEnvironment {
    omega: f64,
    temperature: f64,
}

impl ThermalEnvironment {
    /// `omega` in rad/s, `temperature` in kelvin.
    pub fn new(omega: f64, temperature: f64) -> Result<Self> {
        ensure_finite("omega", omega)?;
        ensure_finite("temperature", temperature)?;
        if !(omega > 0.0) {
            return Err(Error::InvalidArgument(format!("angular frequency must be > 0, got {omega}")));
        }
        if !(temperature > 0.0) {
            return Err(Error::InvalidArgument(format!("temperature must be > 0 K, got {temperature}")));
        }
        Ok(Self { omega, temperature })
    }

    /// `ω = ghz × 10⁹` rad/s, the convention the recipes use.
    pub fn from_ghz_as_omega(ghz: f64, temperature: f64) -> Result<Self> {
        Self::new(ghz * 1e9, temperature)
    }

    /// `ω = 2π f` for an ordinary frequency in hertz.
    pub fn from_hertz(hz: f64, temperature: f64) -> Result<Self> {
        Self::new(std::f64::consts::TAU * hz, temperature)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    /// `ħω / k_B T`.
    pub fn reduced_energy(&self, consts: &PhysicalConstants) -> f64 {
        consts.hbar * self.omega / (consts.k_b * self.temperature)
    }
}

/// Bose–Einstein occupation `n̄ = 1 / (exp(ħω/k_BT) − 1)`.
pub fn mean_photon_number(env: &ThermalEnvironment) -> f64 {
    mean_photon_number_with(env, &PhysicalConstants::SI_2019)
}

pub fn mean_photon_number_with(env: &ThermalEnvironment, consts: &PhysicalConstants) -> f64 {
    occupation(env.reduced_energy(consts))
}

/// `n̄` as a function of `x = ħω/k_BT`.
pub fn occupation(x: f64) -> f64 {
    if x > QUANTUM_CUTOFF {
        0.0
    } else if x < SERIES_THRESHOLD {
        1.0 / x - 0.5 + x / 12.0
    } else {
        1.0 / x.exp_m1()
    }
}

/// Quadrature variance `V = 2n̄ + 1` of the thermal mode.
pub fn thermal_variance(env: &ThermalEnvironment) -> f64 {
    thermal_variance_with(env, &PhysicalConstants::SI_2019)
}

pub fn thermal_variance_with(env: &ThermalEnvironment, consts: &PhysicalConstants) -> f64 {
    2.0 * mean_photon_number_with(env, consts) + 1.0
}

/// Alice's carrier and Eve's injected noise both share the thermal background.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WirelessScenario {
    pub env: ThermalEnvironment,
    pub v_s: f64,
    pub consts: PhysicalConstants,
}

impl WirelessScenario {
    pub fn new(env: ThermalEnvironment) -> Self {
        Self { env, v_s: DEFAULT_WIRELESS_SIGNAL, consts: PhysicalConstants::SI_2019 }
    }

    pub fn with_signal(mut self, v_s: f64) -> Self {
        self.v_s = v_s;
        self
    }

    pub fn with_constants(mut self, consts: PhysicalConstants) -> Self {
        self.consts = consts;
        self
    }

    pub fn thermal_variance(&self) -> f64 {
        thermal_variance_with(&self.env, &self.consts)
    }

    pub fn modulation(&self) -> Result<ModulationParams> {
        ModulationParams::new(self.v_s, self.thermal_variance())
    }

    pub fn channel(&self, t: f64) -> Result<ChannelParams> {
        ChannelParams::new(t, self.thermal_variance())
    }

    /// Transmission search at the scenario's noise for any protocol.
    pub fn threshold_query(&self, protocol: Protocol) -> ThresholdQuery {
        let v = self.thermal_variance();
        ThresholdQuery::transmission(protocol, v, self.v_s, v - 1.0).with_tolerance(DEFAULT_WIRELESS_TOLERANCE)
    }
}

/// Minimum transmission for a positive direct-reconciliation rate.
pub fn wireless_threshold(scenario: &WirelessScenario) -> Result<f64> {
    let query = scenario.threshold_query(Protocol::Direct);
    match transmission_threshold(&query)? {
        ThresholdOutcome::Threshold(t) => Ok(t),
        ThresholdOutcome::AlwaysSecure => Ok(query.bracket().0),
        ThresholdOutcome::NeverSecure => Err(Error::Domain(format!(
            "no secure transmission in the search bracket at omega = {} rad/s, {} K",
            scenario.env.omega(),
            scenario.env.temperature()
        ))),
    }
}
