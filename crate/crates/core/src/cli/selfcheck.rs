//! Built-in consistency checks run by `cvqkd selfcheck`.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::channel::{ChannelParams, ModulationParams};
use crate::eve::{
    dr_conditional_spectrum_closed, eve_cm, eve_conditional_cm_dr, eve_conditional_cm_rr, eve_spectrum, holevo_dr,
    holevo_rr, rr_conditional_spectrum_closed,
};
use crate::gaussian::{
    g_entropy, symplectic, symplectic_spectrum_closed, symplectic_spectrum_generic, CovarianceMatrix, TwoModeCM,
};
use crate::keyrate::{key_rate, noise_threshold, transmission_threshold, Protocol, ThresholdQuery};
use crate::thermal::{
    thermal_variance_with, wireless_threshold, PhysicalConstants, ThermalEnvironment, WirelessScenario,
};
use crate::Result;

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_SEED: u64 = 20_260_101;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfcheckOptions {
    /// Relative agreement required between closed forms and the oracle.
    pub tolerance: f64,
    pub samples: usize,
    pub seed: u64,
    pub consts: PhysicalConstants,
}

impl Default for SelfcheckOptions {
    fn default() -> Self {
        Self { tolerance: DEFAULT_TOLERANCE, samples: 1000, seed: DEFAULT_SEED, consts: PhysicalConstants::SI_2019 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfcheckReport {
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl SelfcheckReport {
    pub fn failed(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!("{} {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail));
        }
        let n_pass = self.checks.iter().filter(|c| c.passed).count();
        out.push_str(&format!("selfcheck: {n_pass}/{} checks passed\n", self.checks.len()));
        out
    }
}

/// Random physical two-mode state: a thermal product with variances
/// log-uniform in `[1, 1e5]` under random passive and squeezing operations.
pub fn random_two_mode_cm(rng: &mut impl Rng) -> CovarianceMatrix {
    let mut variance = || (rng.random::<f64>() * 1e5f64.ln()).exp();
    let (v1, v2) = (variance(), variance());
    let mut u = |lo: f64, hi: f64| lo + (hi - lo) * rng.random::<f64>();
    let s = symplectic::phase_rotation(u(0.0, 6.3), u(0.0, 6.3))
        * symplectic::squeezer(u(-0.5, 0.5), u(-0.5, 0.5))
        * symplectic::phase_rotation(u(0.0, 6.3), u(0.0, 6.3))
        * symplectic::beamsplitter(u(0.0, 3.2))
        * symplectic::two_mode_squeezer(u(0.0, 1.0));
    TwoModeCM::thermal_product(v1, v2)
        .expect("thermal variances are >= 1")
        .covariance()
        .transformed(&s)
        .expect("symplectic image of a state is finite")
}

/// Operating points for the attack-state comparisons.
pub fn attack_grid() -> Vec<(ChannelParams, ModulationParams)> {
    let mut out = Vec::new();
    for &t in &[0.05, 0.3, 0.5, 0.7, 0.95] {
        for &w in &[1.0, 2.0, 50.0] {
            for &v_s in &[1.0, 1e3, 1e5] {
                for &v_0 in &[1.0, 10.0, 1e3] {
                    out.push((ChannelParams::new(t, w).unwrap(), ModulationParams::new(v_s, v_0).unwrap()));
                }
            }
        }
    }
    out
}

fn check(name: &'static str, result: Result<(bool, String)>) -> Check {
    match result {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check { name, passed: false, detail: format!("error: {e}") },
    }
}

fn worst_case(name: &'static str, tol: f64, diffs: Result<Vec<f64>>) -> Check {
    check(
        name,
        diffs.map(|d| {
            let worst = d.iter().copied().fold(0.0, f64::max);
            (worst <= tol, format!("max relative difference {worst:.3e} over {} cases (tolerance {tol:.1e})", d.len()))
        }),
    )
}

fn within(name: &'static str, value: Result<f64>, lo: f64, hi: f64) -> Check {
    check(name, value.map(|v| ((lo..=hi).contains(&v), format!("{v:.6} in [{lo}, {hi}]"))))
}

fn relative(name: &'static str, value: f64, expected: f64, rel: f64) -> Check {
    let err = (value - expected).abs() / expected.abs();
    Check { name, passed: err <= rel, detail: format!("{value:.6e} vs {expected:.6e} (relative error {err:.2e})") }
}

fn mid_infrared_threshold(consts: PhysicalConstants) -> Result<(bool, String)> {
    let mut best = (f64::INFINITY, 0.0);
    for i in 0..=40 {
        let omega = 1e13 * 10f64.powf(i as f64 / 40.0);
        let s = WirelessScenario::new(ThermalEnvironment::new(omega, 300.0)?).with_constants(consts);
        let t = wireless_threshold(&s)?;
        if (0.75..=0.85).contains(&t) {
            return Ok((true, format!("T* = {t:.4} at omega = {omega:.3e} rad/s")));
        }
        if (t - 0.8).abs() < (best.0 - 0.8f64).abs() {
            best = (t, omega);
        }
    }
    Ok((false, format!("closest T* = {:.4} at omega = {:.3e} rad/s", best.0, best.1)))
}

pub fn run_selfcheck(opts: &SelfcheckOptions) -> SelfcheckReport {
    let tol = opts.tolerance;
    let mut rng = StdRng::seed_from_u64(opts.seed);
    let cms: Vec<_> = (0..opts.samples).map(|_| random_two_mode_cm(&mut rng)).collect();
    let grid = attack_grid();
    let mut checks = Vec::new();

    checks.push(worst_case(
        "spectrum.closed-vs-oracle",
        tol,
        cms.iter()
            .map(|cm| Ok(symplectic_spectrum_closed(*cm)?.max_relative_difference(&symplectic_spectrum_generic(*cm)?)))
            .collect(),
    ));
    checks.push(worst_case(
        "eve.unconditioned-vs-oracle",
        tol,
        grid.iter()
            .map(|(ch, m)| {
                let state = eve_cm(m.total_variance(), m.total_variance(), ch)?;
                Ok(eve_spectrum(&state)?.max_relative_difference(&symplectic_spectrum_generic(state.cm())?))
            })
            .collect(),
    ));
    checks.push(worst_case(
        "eve.dr-conditional-vs-oracle",
        tol,
        grid.iter()
            .map(|(ch, m)| {
                let oracle = symplectic_spectrum_generic(eve_conditional_cm_dr(ch, m)?.cm())?;
                Ok(dr_conditional_spectrum_closed(ch, m)?.max_relative_difference(&oracle))
            })
            .collect(),
    ));
    checks.push(worst_case(
        "eve.rr-conditional-vs-oracle",
        tol,
        grid.iter()
            .map(|(ch, m)| {
                let oracle = symplectic_spectrum_generic(eve_conditional_cm_rr(ch, m)?)?;
                Ok(rr_conditional_spectrum_closed(ch, m)?.max_relative_difference(&oracle))
            })
            .collect(),
    ));

    let identity_tol = tol.min(1e-12);
    checks.push(check("entropy.g-vacuum", g_entropy(1.0).map(|g| (g == 0.0, format!("g(1) = {g:e}")))));
    checks.push(check(
        "entropy.g-three",
        g_entropy(3.0)
            .map(|g| ((g - 2.0).abs() <= identity_tol, format!("g(3) = {g:.17} (tolerance {identity_tol:.1e})"))),
    ));
    checks.push(check(
        "entropy.pure-epr",
        [1.0, 2.0, 10.0, 1e3]
            .iter()
            .map(|&w| symplectic_spectrum_generic(TwoModeCM::epr(w)?)?.entropy())
            .collect::<Result<Vec<_>>>()
            .map(|s| {
                let worst = s.iter().copied().fold(0.0, f64::max);
                (worst < 1e-8, format!("largest EPR entropy {worst:.3e} bits for W in {{1, 2, 10, 1e3}}"))
            }),
    ));
    checks.push(check(
        "entropy.thermal-pair",
        (|| {
            let direct = symplectic_spectrum_generic(TwoModeCM::thermal_product(3.0, 7.0)?)?.entropy()?;
            let sum = g_entropy(3.0)? + g_entropy(7.0)?;
            Ok(((direct - sum).abs() <= 1e3 * identity_tol, format!("S = {direct:.15}, g(3) + g(7) = {sum:.15}")))
        })(),
    ));

    let env = |omega: f64| ThermalEnvironment::new(omega, 300.0).map(|e| thermal_variance_with(&e, &opts.consts));
    checks.push(match env(1e9) {
        Ok(v) => relative("blackbody.1e9-rad-s", v, 7.85e4, 0.01),
        Err(e) => check("blackbody.1e9-rad-s", Err(e)),
    });
    checks.push(match env(3e11) {
        Ok(v) => relative("blackbody.3e11-rad-s", v, 2.63e2, 0.01),
        Err(e) => check("blackbody.3e11-rad-s", Err(e)),
    });

    checks.push(within(
        "reference.rr-threshold-v0-10",
        transmission_threshold(&ThresholdQuery::transmission(Protocol::Reverse, 1.0, 1e5, 9.0))
            .and_then(|o| o.value().ok_or_else(|| crate::Error::Domain(format!("no crossing: {}", o.verdict())))),
        0.88,
        0.90,
    ));
    checks.push(check(
        "reference.dr-3db-limit",
        [1.0, 10.0, 1e2, 1e3, 1e4]
            .iter()
            .map(|&v0| {
                let m = ModulationParams::new(1e5, v0)?;
                let above = key_rate(Protocol::Direct, &ChannelParams::lossy(0.55)?, &m)?.rate;
                let below = key_rate(Protocol::Direct, &ChannelParams::lossy(0.45)?, &m)?.rate;
                Ok(above > 0.0 && below < 0.0)
            })
            .collect::<Result<Vec<_>>>()
            .map(|ok| {
                (
                    ok.iter().all(|&b| b),
                    format!(
                        "rate(0.55) > 0 > rate(0.45) for {}/5 carrier variances",
                        ok.iter().filter(|&&b| b).count()
                    ),
                )
            }),
    ));
    checks.push(check(
        "reference.rr-noise-bound",
        [0.3, 0.5, 0.7, 0.9]
            .iter()
            .map(|&t| {
                let beta = noise_threshold(&ThresholdQuery::noise(Protocol::Reverse, 1.0, 1e5, t))?
                    .value()
                    .ok_or_else(|| crate::Error::Domain(format!("no noise crossing at T = {t}")))?;
                Ok((beta - 1.0 / (1.0 - t)).abs() * (1.0 - t))
            })
            .collect::<Result<Vec<_>>>()
            .map(|e| {
                let worst = e.iter().copied().fold(0.0, f64::max);
                (worst <= 0.1, format!("largest relative deviation from 1/(1 - T): {worst:.4}"))
            }),
    ));
    checks.push(check(
        "reference.degenerate-perfect-channel",
        (|| {
            let ch = ChannelParams::lossy(1.0)?;
            let m = ModulationParams::new(1e5, 10.0)?;
            let (dr, rr) = (holevo_dr(&ch, &m)?, holevo_rr(&ch, &m)?);
            Ok((dr.abs() <= 1e-6 && rr.abs() <= 1e-6, format!("Holevo dr = {dr:e}, rr = {rr:e} at T = W = 1")))
        })(),
    ));
    checks.push(within(
        "reference.microwave-window",
        ThermalEnvironment::from_ghz_as_omega(300.0, 300.0)
            .and_then(|e| wireless_threshold(&WirelessScenario::new(e).with_constants(opts.consts))),
        0.9949,
        0.9989,
    ));
    checks.push(check("reference.mid-infrared", mid_infrared_threshold(opts.consts)));

    let passed = checks.iter().all(|c| c.passed);
    SelfcheckReport { passed, checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_passes() {
        let report = run_selfcheck(&SelfcheckOptions { samples: 100, ..Default::default() });
        assert!(report.passed, "{}", report.to_text());
    }

    #[test]
    fn corrupted_constants_fail_blackbody_checks() {
        let consts = PhysicalConstants { hbar: 1.054571817e-33, ..PhysicalConstants::SI_2019 };
        let report = run_selfcheck(&SelfcheckOptions { samples: 10, consts, ..Default::default() });
        let failed = report.failed();
        assert!(failed.contains(&"blackbody.1e9-rad-s") && failed.contains(&"blackbody.3e11-rad-s"), "{failed:?}");
        assert!(!failed.contains(&"spectrum.closed-vs-oracle"));
    }

    #[test]
    fn tight_tolerance_fails_oracle_checks() {
        let report = run_selfcheck(&SelfcheckOptions { samples: 100, tolerance: 1e-15, ..Default::default() });
        assert!(report.failed().contains(&"spectrum.closed-vs-oracle"));
    }
}
