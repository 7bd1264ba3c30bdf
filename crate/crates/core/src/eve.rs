//! Entangling-cloner eavesdropper: Eve's two-mode state, its conditional
//! versions given Bob's (reverse reconciliation) or Alice's (direct
//! reconciliation) data, and the resulting Holevo bounds.
//!
//! Eve keeps the beamsplitter output `E′` and the idler `E″` of her EPR
//! pair. The authoritative conditional spectra come from conditioning the
//! covariance matrix and running the generic `|eig(iΩV)|` solver; the closed
//! forms in this module are evaluated alongside as a cross-check.

use nalgebra::Matrix4x2;

use crate::channel::{bob_variance, ChannelParams, ModulationParams};
use crate::error::{Error, Result};
use crate::gaussian::{
    assemble_cm, projector_q, spectrum_from_invariants, symplectic_spectrum_generic, von_neumann_entropy,
    SymplecticSpectrum, TwoModeCM, CLAMP_TOLERANCE,
};

/// Relative agreement expected between closed-form and oracle spectra.
pub const CROSS_CHECK_TOLERANCE: f64 = 1e-8;

/// Eve's state `V_E(v_q, v_p)` for a given channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EveState {
    cm: TwoModeCM,
    channel: ChannelParams,
    v_q: f64,
    v_p: f64,
    varphi: f64,
}

impl EveState {
    pub fn cm(&self) -> &TwoModeCM {
        &self.cm
    }

    pub fn channel(&self) -> &ChannelParams {
        &self.channel
    }

    /// Variance of `E′` in Q, `(1 − T) v_q + T W`.
    pub fn e_q(&self) -> f64 {
        self.cm.a
    }

    /// Variance of `E′` in P, `(1 − T) v_p + T W`.
    pub fn e_p(&self) -> f64 {
        self.cm.a_p
    }

    /// `e_V` when both quadratures see the same input variance.
    pub fn e_v(&self) -> Option<f64> {
        self.is_symmetric().then_some(self.cm.a)
    }

    /// Intra-Eve correlation `[T(W² − 1)]^½`.
    pub fn varphi(&self) -> f64 {
        self.varphi
    }

    pub fn is_symmetric(&self) -> bool {
        self.v_q == self.v_p
    }
}

/// Builds `V_E(v_q, v_p) = [[Δ[e_q, e_p], φZ], [φZ, W I]]` with
/// `e_x = (1 − T) v_x + T W` and `φ = [T(W² − 1)]^½`.
pub fn eve_cm(v_q: f64, v_p: f64, ch: &ChannelParams) -> Result<EveState> {
    if !(v_q >= 1.0 && v_p >= 1.0) || !v_q.is_finite() || !v_p.is_finite() {
        return Err(Error::InvalidArgument(format!("input variances must be finite and >= 1, got ({v_q}, {v_p})")));
    }
    let (t, w) = (ch.t(), ch.w());
    let varphi = (t * (w * w - 1.0)).sqrt();
    let cm = assemble_cm((1.0 - t) * v_q + t * w, (1.0 - t) * v_p + t * w, w, w, varphi, -varphi)?;
    Ok(EveState { cm, channel: *ch, v_q, v_p, varphi })
}

/// Spectrum of Eve's state,
/// `ν_E = ½[√((e_V + W)² − 4T(W² − 1)) ± (e_V − W)]` when symmetric.
///
/// Asymmetric states go through the generic solver.
pub fn eve_spectrum(state: &EveState) -> Result<SymplecticSpectrum> {
    let Some(e_v) = state.e_v() else {
        return symplectic_spectrum_generic(state.cm);
    };
    let (t, w) = (state.channel.t(), state.channel.w());
    let corr = state.varphi * state.varphi;
    let y = (e_v + w) * (e_v + w) - 4.0 * corr;
    let slack = 8.0 * f64::EPSILON * ((e_v + w) * (e_v + w) + 4.0 * corr);
    if y < 4.0 - slack.max(4.0 * CLAMP_TOLERANCE) {
        return Err(Error::Unphysical(format!("Eve's state has y = {y} < 4")));
    }
    let big = 0.5 * (y.max(0.0).sqrt() + (e_v - w).abs());
    // ν₁ν₂ = e_V W − T(W² − 1) = (1 − T) V W + T
    let small = ((1.0 - t) * state.v_q * w + t) / big;
    SymplecticSpectrum::with_resolution(vec![big, small], state.cm.covariance().purity_resolution())
}

/// Correlations between Eve's modes and Bob's measured quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BobCorrelations {
    /// `⟨Ê′X̂_B⟩ = √(T(1 − T)) (V_S + V₀ − W)`
    pub xi: f64,
    /// `|⟨Ê″X̂_B⟩| = √(1 − T) √(W² − 1)`
    pub phi: f64,
}

impl BobCorrelations {
    pub fn new(ch: &ChannelParams, modulation: &ModulationParams) -> Self {
        let (t, w) = (ch.t(), ch.w());
        Self {
            xi: (t * (1.0 - t)).sqrt() * (modulation.total_variance() - w),
            phi: (1.0 - t).sqrt() * (w * w - 1.0).sqrt(),
        }
    }

    /// The 4x2 block `[ξ I; −ϕ Z]` in the frame where `⟨Ê′Ê″⟩ = +φ Z`.
    ///
    /// `Ê′` and `X̂_B` pick up the injected mode with opposite signs
    /// (`−√T` and `+√(1 − T)`), so `⟨Ê″X̂_B⟩` carries the opposite sign to
    /// `⟨Ê″Ê′⟩`.
    pub fn matrix(&self) -> Matrix4x2<f64> {
        #[rustfmt::skip]
        let c = Matrix4x2::new(
            self.xi, 0.0,
            0.0, self.xi,
            -self.phi, 0.0,
            0.0, self.phi,
        );
        c
    }
}

fn from_matrix(m: &nalgebra::Matrix4<f64>) -> Result<TwoModeCM> {
    assemble_cm(m[(0, 0)], m[(1, 1)], m[(2, 2)], m[(3, 3)], m[(0, 2)], m[(1, 3)])
}

fn checked_bob_variance(ch: &ChannelParams, modulation: &ModulationParams) -> Result<f64> {
    let b_v = bob_variance(ch, modulation);
    if b_v > 0.0 && b_v.is_finite() {
        Ok(b_v)
    } else {
        Err(Error::Numeric(format!("Bob's variance T(V − W) + W = {b_v} is not positive")))
    }
}

/// Eve's state conditioned on Bob's homodyne outcome,
/// `V_{E|X_B} = V_E − b_V⁻¹ C Π Cᵀ`, evaluated literally.
///
/// The `Q` entry of `Ê′` cancels from `O(V)` down to `O(1)`, so for very
/// large `V` this loses about `ε V` relative accuracy; the Holevo bound
/// uses [`rr_conditional_blocks`] instead.
pub fn eve_conditional_cm_rr(ch: &ChannelParams, modulation: &ModulationParams) -> Result<TwoModeCM> {
    let b_v = checked_bob_variance(ch, modulation)?;
    let v = modulation.total_variance();
    let eve = eve_cm(v, v, ch)?;
    let c = BobCorrelations::new(ch, modulation).matrix();
    let update = c * projector_q() * c.transpose() / b_v;
    from_matrix(&(eve.cm.matrix() - update))
}

/// Conditional blocks written out in closed form:
/// `A = Δ[VW/b_V, e_V]`, `B = Δ[(1 − T + TWV)/b_V, W]`, `C = Δ[φV/b_V, −φ]`.
pub fn rr_conditional_blocks(ch: &ChannelParams, modulation: &ModulationParams) -> Result<TwoModeCM> {
    let b_v = checked_bob_variance(ch, modulation)?;
    let (t, w, v) = (ch.t(), ch.w(), modulation.total_variance());
    let varphi = (t * (w * w - 1.0)).sqrt();
    assemble_cm(v * w / b_v, (1.0 - t) * v + t * w, (1.0 - t + t * w * v) / b_v, w, varphi * v / b_v, -varphi)
}

/// The conditional blocks with the correlation entry taken as
/// `φ[2 − V/b_V]`, i.e. with `⟨Ê″X̂_B⟩` given the same sign as `⟨Ê″Ê′⟩`.
///
/// Agrees with [`rr_conditional_blocks`] when `W = 1`. For `W > 1` it
/// underestimates Eve's information and is kept only for comparison.
pub fn rr_conditional_blocks_same_sign(ch: &ChannelParams, modulation: &ModulationParams) -> Result<TwoModeCM> {
    let b_v = checked_bob_variance(ch, modulation)?;
    let (t, w, v) = (ch.t(), ch.w(), modulation.total_variance());
    let varphi = (t * (w * w - 1.0)).sqrt();
    let mut cm = rr_conditional_blocks(ch, modulation)?;
    cm.c_q = varphi * (2.0 - v / b_v);
    Ok(cm)
}

/// `(Δ, det)` of `V_{E|X_B}` in closed form.
pub fn rr_conditional_invariants(ch: &ChannelParams, modulation: &ModulationParams) -> Result<(f64, f64)> {
    let b_v = checked_bob_variance(ch, modulation)?;
    let (t, w, v) = (ch.t(), ch.w(), modulation.total_variance());
    let e_v = (1.0 - t) * v + t * w;
    let delta = (v * w * e_v + w * (1.0 - t + t * w * v) - 2.0 * t * (w * w - 1.0) * v) / b_v;
    let det = v * ((1.0 - t) * v * w + t) / b_v;
    Ok((delta, det))
}

/// `(Δ, det)` of [`rr_conditional_blocks_same_sign`], as rational functions
/// of `T`, `V`, `W` over the denominator `T(V − W) + W`.
pub fn rr_conditional_invariants_same_sign(ch: &ChannelParams, modulation: &ModulationParams) -> Result<(f64, f64)> {
    let den = checked_bob_variance(ch, modulation)?;
    let (t, w, v) = (ch.t(), ch.w(), modulation.total_variance());
    let w2m1 = w * w - 1.0;
    let delta = (w + v * v * w
        - 4.0 * t * t * (v - w) * w2m1
        - t * (2.0 * v + (v * v - 3.0) * w - 4.0 * v * w * w + 4.0 * w * w * w))
        / den;
    let det =
        ((-t + (t - 1.0) * v * w) * (-4.0 * (t - 1.0) * t * w * w2m1 + v * (-1.0 + 4.0 * (t - 1.0) * t * w2m1))) / den;
    Ok((delta, det))
}

/// Spectrum from the invariants, with the small root taken from the product.
/// Closed-form spectrum of `V_{E|X_B}`.
pub fn rr_conditional_spectrum_closed(ch: &ChannelParams, modulation: &ModulationParams) -> Result<SymplecticSpectrum> {
    let (delta, det) = rr_conditional_invariants(ch, modulation)?;
    let resolution = rr_conditional_blocks(ch, modulation)?.covariance().purity_resolution();
    spectrum_from_invariants(delta, delta * delta - 4.0 * det, det, resolution)
}

/// Eve's state given Alice's Q signal: `V_{E|Q_A} = V_E(V₀, V)`.
pub fn eve_conditional_cm_dr(ch: &ChannelParams, modulation: &ModulationParams) -> Result<EveState> {
    eve_cm(modulation.v_0(), modulation.total_variance(), ch)
}

/// The polynomials `F` and `G` with `ν²_{E|X_A} = |F ± √G| / 2`.
pub fn dr_f_g(ch: &ChannelParams, modulation: &ModulationParams) -> (f64, f64) {
    let (t, w) = (ch.t(), ch.w());
    let (v, v0) = (modulation.total_variance(), modulation.v_0());
    let f = v * v0 + t * (2.0 + (t - 2.0) * v * v0) - t * w * (t - 1.0) * (v + v0) + w * w * (t - 1.0) * (t - 1.0);
    let g = (t - 1.0)
        * (t - 1.0)
        * (t * t * (v - w) * (v - w) * (v0 - w) * (v0 - w)
            + (-v0 * v + w * w) * (-v0 * v + w * w)
            + 2.0 * t * (v - w) * (w - v0) * (-2.0 + v * v0 + w * w));
    (f, g)
}

/// Closed-form spectrum of `V_{E|Q_A}` from `F` and `G`.
///
/// The `−` branch cancels badly for large `V`; it is replaced by the
/// equivalent `(F² − G)/4 = det V_{E|Q_A} = ((1 − T)V₀W + T)((1 − T)VW + T)`.
pub fn dr_conditional_spectrum_closed(ch: &ChannelParams, modulation: &ModulationParams) -> Result<SymplecticSpectrum> {
    let (f, g) = dr_f_g(ch, modulation);
    let (t, w) = (ch.t(), ch.w());
    let det = ((1.0 - t) * modulation.v_0() * w + t) * ((1.0 - t) * modulation.total_variance() * w + t);
    let resolution = eve_conditional_cm_dr(ch, modulation)?.cm.covariance().purity_resolution();
    spectrum_from_invariants(f, g, det, resolution)
}

/// Entropies behind one Holevo bound.
#[derive(Debug, Clone, PartialEq)]
pub struct HolevoReport {
    /// `S(E)` in bits.
    pub s_e: f64,
    /// `S(E|X)` in bits.
    pub s_conditional: f64,
    /// `S(E) − S(E|X)` in bits.
    pub holevo: f64,
    pub conditional_spectrum: SymplecticSpectrum,
    /// Largest relative difference between closed-form and oracle
    /// conditional spectra.
    pub closed_form_discrepancy: f64,
}

fn holevo_difference(s_e: f64, s_conditional: f64) -> Result<f64> {
    let diff = s_e - s_conditional;
    if diff >= 0.0 {
        Ok(diff)
    } else if -diff <= 1e-9 * s_e.max(1.0) {
        Ok(0.0)
    } else {
        Err(Error::Numeric(format!("conditioning increased Eve's entropy: S(E) = {s_e}, S(E|X) = {s_conditional}")))
    }
}

fn report(
    label: &str,
    unconditioned: &EveState,
    oracle: SymplecticSpectrum,
    closed: SymplecticSpectrum,
) -> Result<HolevoReport> {
    let discrepancy = oracle.max_relative_difference(&closed);
    if discrepancy > CROSS_CHECK_TOLERANCE.max(2.0 * closed.resolution()) {
        log::warn!(
            "{label}: closed-form conditional spectrum {:?} differs from oracle {:?} (rel {discrepancy:e})",
            closed.nu(),
            oracle.nu()
        );
    }
    let s_e = von_neumann_entropy(&eve_spectrum(unconditioned)?)?;
    let s_conditional = von_neumann_entropy(&oracle)?;
    Ok(HolevoReport {
        s_e,
        s_conditional,
        holevo: holevo_difference(s_e, s_conditional)?,
        conditional_spectrum: oracle,
        closed_form_discrepancy: discrepancy,
    })
}

/// `I(X_B:E) = S(E) − S(E|X_B)` with the entropies itemized.
pub fn holevo_rr_report(ch: &ChannelParams, modulation: &ModulationParams) -> Result<HolevoReport> {
    let v = modulation.total_variance();
    let eve = eve_cm(v, v, ch)?;
    let oracle = symplectic_spectrum_generic(rr_conditional_blocks(ch, modulation)?)?;
    let closed = rr_conditional_spectrum_closed(ch, modulation)?;
    report("reverse reconciliation", &eve, oracle, closed)
}

/// Eve's Holevo information on Bob's data, in bits.
pub fn holevo_rr(ch: &ChannelParams, modulation: &ModulationParams) -> Result<f64> {
    holevo_rr_report(ch, modulation).map(|r| r.holevo)
}

/// `I(X_A:E) = S(E) − S(E|X_A)` with the entropies itemized.
pub fn holevo_dr_report(ch: &ChannelParams, modulation: &ModulationParams) -> Result<HolevoReport> {
    let v = modulation.total_variance();
    let eve = eve_cm(v, v, ch)?;
    let oracle = symplectic_spectrum_generic(eve_conditional_cm_dr(ch, modulation)?.cm)?;
    let closed = dr_conditional_spectrum_closed(ch, modulation)?;
    report("direct reconciliation", &eve, oracle, closed)
}

/// Eve's Holevo information on Alice's data, in bits.
pub fn holevo_dr(ch: &ChannelParams, modulation: &ModulationParams) -> Result<f64> {
    holevo_dr_report(ch, modulation).map(|r| r.holevo)
}
