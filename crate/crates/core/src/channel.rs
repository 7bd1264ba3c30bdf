//! Alice's noisy preparation, the beamsplitter channel to Bob and the
//! classical mutual information between them.
//!
//! Both quadratures are symmetrized, so a single variance describes each
//! role. Bob homodynes one quadrature chosen at random per run; the
//! formulas below are per measured quadrature.

use crate::error::{ensure_finite, Error, Result};

/// Alice's Gaussian modulation: signal variance `V_S` on top of a thermal
/// carrier of variance `V₀ = 1 + β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationParams {
    v_s: f64,
    v_0: f64,
}

impl ModulationParams {
    pub fn new(v_s: f64, v_0: f64) -> Result<Self> {
        ensure_finite("V_S", v_s)?;
        ensure_finite("V0", v_0)?;
        if v_s < 0.0 {
            return Err(Error::InvalidArgument(format!("signal variance V_S must be >= 0, got {v_s}")));
        }
        if v_0 < 1.0 {
            return Err(Error::InvalidArgument(format!("carrier variance V0 must be >= 1, got {v_0}")));
        }
        Ok(Self { v_s, v_0 })
    }

    /// Parametrized by the preparation noise `β = V₀ − 1`.
    pub fn from_beta(v_s: f64, beta: f64) -> Result<Self> {
        ensure_finite("beta", beta)?;
        if beta < 0.0 {
            return Err(Error::InvalidArgument(format!("preparation noise beta must be >= 0, got {beta}")));
        }
        Self::new(v_s, 1.0 + beta)
    }

    pub fn v_s(&self) -> f64 {
        self.v_s
    }

    pub fn v_0(&self) -> f64 {
        self.v_0
    }

    pub fn beta(&self) -> f64 {
        self.v_0 - 1.0
    }

    /// Total variance of Alice's mode, `V = V_S + V₀`.
    pub fn total_variance(&self) -> f64 {
        self.v_s + self.v_0
    }
}

/// Entangling-cloner channel: beamsplitter transmission `T` and variance `W`
/// of the EPR state injected into its free port.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    t: f64,
    w: f64,
}

impl ChannelParams {
    pub fn new(t: f64, w: f64) -> Result<Self> {
        ensure_finite("T", t)?;
        ensure_finite("W", w)?;
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidArgument(format!("transmission T must lie in [0, 1], got {t}")));
        }
        if w < 1.0 {
            return Err(Error::InvalidArgument(format!("cloner variance W must be >= 1, got {w}")));
        }
        Ok(Self { t, w })
    }

    /// Pure-loss channel (`W = 1`).
    pub fn lossy(t: f64) -> Result<Self> {
        Self::new(t, 1.0)
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn w(&self) -> f64 {
        self.w
    }
}

/// Bob's quadrature variance `b_V = (1 − T) W + T V`.
pub fn bob_variance(ch: &ChannelParams, modulation: &ModulationParams) -> f64 {
    (1.0 - ch.t) * ch.w + ch.t * modulation.total_variance()
}

/// Bob's variance conditioned on Alice's signal, `b₁ = (1 − T) W + T V₀`.
///
/// Conditioning is on the signal `X_S` only: the carrier noise stays
/// unknown to Bob, hence `V₀` rather than the vacuum.
pub fn bob_conditional_variance(ch: &ChannelParams, modulation: &ModulationParams) -> f64 {
    (1.0 - ch.t) * ch.w + ch.t * modulation.v_0
}

/// `I(X_A:X_B) = ½ log₂(b_V / b₁)` in bits.
pub fn mutual_information_ab(ch: &ChannelParams, modulation: &ModulationParams) -> f64 {
    let b1 = bob_conditional_variance(ch, modulation);
    // b_V / b₁ = 1 + T V_S / b₁
    0.5 * (ch.t * modulation.v_s / b1).ln_1p() / std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(t: f64, w: f64, v_s: f64, v_0: f64) -> (ChannelParams, ModulationParams) {
        (ChannelParams::new(t, w).unwrap(), ModulationParams::new(v_s, v_0).unwrap())
    }

    #[test]
    fn parameter_validation() {
        assert!(ChannelParams::new(-0.1, 1.0).is_err());
        assert!(ChannelParams::new(1.1, 1.0).is_err());
        assert!(ChannelParams::new(0.5, 0.9).is_err());
        assert!(ChannelParams::new(f64::NAN, 1.0).is_err());
        assert!(ModulationParams::new(-1.0, 1.0).is_err());
        assert!(ModulationParams::new(1.0, 0.5).is_err());
        assert!(ModulationParams::from_beta(1.0, -0.5).is_err());
        let m = ModulationParams::from_beta(10.0, 9.0).unwrap();
        assert_eq!(m.v_0(), 10.0);
        assert_eq!(m.beta(), 9.0);
        assert_eq!(m.total_variance(), 20.0);
    }

    #[test]
    fn bob_variance_examples() {
        let (ch, m) = params(1.0, 1.0, 4.0, 1.0);
        assert_eq!(bob_variance(&ch, &m), 5.0);
        let (ch, m) = params(0.0, 3.0, 17.0, 2.0);
        assert_eq!(bob_variance(&ch, &m), 3.0);
        let (ch, m) = params(0.5, 1.0, 100.0, 1.0);
        assert_eq!(bob_variance(&ch, &m), 51.0);
    }

    #[test]
    fn bob_conditional_variance_examples() {
        let (ch, m) = params(1.0, 1.0, 4.0, 1.0);
        assert_eq!(bob_conditional_variance(&ch, &m), 1.0);
        let (ch, m) = params(0.5, 1.0, 4.0, 10.0);
        assert_eq!(bob_conditional_variance(&ch, &m), 5.5);
        let (ch, m) = params(0.37, 2.5, 0.0, 7.0);
        assert_eq!(bob_conditional_variance(&ch, &m), bob_variance(&ch, &m));
    }

    #[test]
    fn mutual_information_examples() {
        let (ch, m) = params(1.0, 1.0, 3.0, 1.0);
        assert_relative_eq!(mutual_information_ab(&ch, &m), 1.0, max_relative = 1e-14);
        let (ch, m) = params(0.0, 2.0, 1e5, 5.0);
        assert_eq!(mutual_information_ab(&ch, &m), 0.0);
        let (ch, m) = params(0.5, 1.0, 1e5, 1.0);
        let expected = 0.5 * (50001.0f64).log2();
        assert_relative_eq!(mutual_information_ab(&ch, &m), expected, max_relative = 1e-14);
        assert!((mutual_information_ab(&ch, &m) - 7.805).abs() < 1e-3);
        let (ch, m) = params(0.7, 1.3, 0.0, 4.0);
        assert_eq!(mutual_information_ab(&ch, &m), 0.0);
    }

    #[test]
    fn variance_gap_is_signal() {
        for &t in &[0.0, 0.1, 0.5, 0.93, 1.0] {
            for &v_s in &[0.0, 1.0, 1e3, 1e5] {
                let (ch, m) = params(t, 1.7, v_s, 12.0);
                let gap = bob_variance(&ch, &m) - bob_conditional_variance(&ch, &m);
                assert!((gap - t * v_s).abs() <= 1e-12 * (1.0 + t * v_s));
            }
        }
    }
}
