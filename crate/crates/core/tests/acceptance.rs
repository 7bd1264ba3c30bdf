//! Acceptance suite. Prints one `PASS`/`FAIL` line per criterion and exits
//! non-zero if any criterion fails.
//!
//!     cargo test --test acceptance

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use cvqkd::channel::{mutual_information_ab, ChannelParams, ModulationParams};
use cvqkd::cli::selfcheck::{attack_grid, random_two_mode_cm};
use cvqkd::eve::{
    dr_conditional_spectrum_closed, eve_cm, eve_conditional_cm_dr, eve_spectrum, holevo_dr, holevo_rr,
    rr_conditional_blocks, rr_conditional_spectrum_closed,
};
use cvqkd::gaussian::{g_entropy, symplectic_spectrum_closed, symplectic_spectrum_generic, TwoModeCM};
use cvqkd::keyrate::{fil08_bound, key_rate, noise_threshold, transmission_threshold, Protocol, ThresholdQuery};
use cvqkd::thermal::{thermal_variance, wireless_threshold, ThermalEnvironment, WirelessScenario};
use cvqkd::Result;
use rand::rngs::StdRng;
use rand::SeedableRng;

type Outcome = Result<(bool, String)>;
type Criterion = (&'static str, fn() -> Outcome);

fn within(value: f64, expected: f64, rel: f64) -> bool {
    ((value - expected) / expected).abs() <= rel
}

fn point(t: f64, w: f64, v_s: f64, v_0: f64) -> Result<(ChannelParams, ModulationParams)> {
    Ok((ChannelParams::new(t, w)?, ModulationParams::new(v_s, v_0)?))
}

fn blackbody() -> Outcome {
    let a = thermal_variance(&ThermalEnvironment::new(1e9, 300.0)?);
    let b = thermal_variance(&ThermalEnvironment::new(3e11, 300.0)?);
    Ok((within(a, 7.85e4, 0.01) && within(b, 2.63e2, 0.01), format!("V(1e9) = {a:.5e}, V(3e11) = {b:.5e}")))
}

fn rr_threshold() -> Outcome {
    let out = transmission_threshold(&ThresholdQuery::transmission(Protocol::Reverse, 1.0, 1e5, 9.0))?;
    let t = out.value().unwrap_or(f64::NAN);
    Ok(((0.88..=0.90).contains(&t), format!("T* = {t:.6} ({})", out.verdict())))
}

fn dr_three_db() -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for v_0 in [1.0, 10.0, 1e2, 1e3, 1e4] {
        let (hi, m) = point(0.55, 1.0, 1e5, v_0)?;
        let (lo, _) = point(0.45, 1.0, 1e5, v_0)?;
        let (r_hi, r_lo) = (key_rate(Protocol::Direct, &hi, &m)?.rate, key_rate(Protocol::Direct, &lo, &m)?.rate);
        ok &= r_hi > 0.0 && r_lo < 0.0;
        detail.push(format!("V0={v_0}: {r_lo:.2e}/{r_hi:.2e}"));
    }
    Ok((ok, detail.join(", ")))
}

fn noise_bound() -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for t in [0.3, 0.5, 0.7, 0.9] {
        let beta = noise_threshold(&ThresholdQuery::noise(Protocol::Reverse, 1.0, 1e5, t))?.value().unwrap_or(f64::NAN);
        let bound = fil08_bound(t)?;
        ok &= within(beta, bound, 0.10);
        detail.push(format!("T={t}: {beta:.4} vs {bound:.4}"));
    }
    Ok((ok, detail.join(", ")))
}

fn microwave() -> Outcome {
    let t = wireless_threshold(&WirelessScenario::new(ThermalEnvironment::from_ghz_as_omega(300.0, 300.0)?))?;
    Ok(((0.9949..=0.9989).contains(&t), format!("T* = {t:.6}")))
}

fn mid_infrared() -> Outcome {
    let mut closest = (f64::NAN, 0.0);
    for i in 0..=100 {
        let omega = 1e13 * 10f64.powf(i as f64 / 100.0);
        let t = wireless_threshold(&WirelessScenario::new(ThermalEnvironment::new(omega, 300.0)?))?;
        if (0.75..=0.85).contains(&t) {
            return Ok((true, format!("T* = {t:.4} at omega = {omega:.3e} rad/s")));
        }
        if !((closest.0 - 0.8f64).abs() <= (t - 0.8).abs()) {
            closest = (t, omega);
        }
    }
    Ok((false, format!("closest T* = {:.4} at omega = {:.3e} rad/s", closest.0, closest.1)))
}

fn oracle_equivalence() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2_718_281);
    let mut generic = 0.0f64;
    for _ in 0..1000 {
        let cm = random_two_mode_cm(&mut rng);
        generic =
            generic.max(symplectic_spectrum_closed(cm)?.max_relative_difference(&symplectic_spectrum_generic(cm)?));
    }
    let (mut fg, mut rr, mut ve) = (0.0f64, 0.0f64, 0.0f64);
    for (ch, m) in attack_grid() {
        let dr_oracle = symplectic_spectrum_generic(eve_conditional_cm_dr(&ch, &m)?.cm())?;
        fg = fg.max(dr_conditional_spectrum_closed(&ch, &m)?.max_relative_difference(&dr_oracle));
        let rr_oracle = symplectic_spectrum_generic(rr_conditional_blocks(&ch, &m)?)?;
        rr = rr.max(rr_conditional_spectrum_closed(&ch, &m)?.max_relative_difference(&rr_oracle));
        let state = eve_cm(m.total_variance(), m.total_variance(), &ch)?;
        ve = ve.max(eve_spectrum(&state)?.max_relative_difference(&symplectic_spectrum_generic(state.cm())?));
    }
    let worst = generic.max(fg).max(rr).max(ve);
    Ok((
        worst <= 1e-8,
        format!("max relative difference: generic {generic:.1e}, F/G {fg:.1e}, RR {rr:.1e}, nu_E {ve:.1e}"),
    ))
}

fn entropy_identities() -> Outcome {
    let g1 = g_entropy(1.0)?;
    let g3 = g_entropy(3.0)?;
    let mut worst = 0.0f64;
    for w in [1.0, 2.0, 10.0, 1e3] {
        worst = worst.max(symplectic_spectrum_generic(TwoModeCM::epr(w)?)?.entropy()?.abs());
    }
    Ok((
        g1 == 0.0 && (g3 - 2.0).abs() <= 1e-12 && worst < 1e-8,
        format!("g(1) = {g1}, g(3) - 2 = {:.1e}, max EPR entropy = {worst:.1e}", g3 - 2.0),
    ))
}

fn degenerate_points() -> Outcome {
    let mut failures = Vec::new();
    for &v_s in &[1.0, 1e3, 1e5] {
        for &v_0 in &[1.0, 10.0, 1e3] {
            let (ch, m) = point(1.0, 1.0, v_s, v_0)?;
            let i_ab = mutual_information_ab(&ch, &m);
            for p in Protocol::ALL {
                let r = key_rate(p, &ch, &m)?;
                if r.holevo.abs() > 1e-6 || (r.rate - i_ab).abs() > 1e-6 {
                    failures.push(format!("T=1 {p} Vs={v_s} V0={v_0}"));
                }
            }
            if holevo_dr(&ch, &m)?.abs() > 1e-6 || holevo_rr(&ch, &m)?.abs() > 1e-6 {
                failures.push(format!("T=1 holevo Vs={v_s} V0={v_0}"));
            }
        }
    }
    for &t in &[0.0, 0.3, 0.5, 0.7, 1.0] {
        for &w in &[1.0, 2.0, 50.0] {
            for &v_0 in &[1.0, 10.0, 1e3] {
                let (ch, m) = point(t, w, 0.0, v_0)?;
                if mutual_information_ab(&ch, &m) != 0.0 {
                    failures.push(format!("Vs=0 I_AB T={t} W={w} V0={v_0}"));
                }
                for p in Protocol::ALL {
                    if key_rate(p, &ch, &m)?.rate > 0.0 {
                        failures.push(format!("Vs=0 {p} T={t} W={w} V0={v_0}"));
                    }
                }
            }
        }
    }
    for &w in &[1.0, 2.0, 50.0] {
        for &v_s in &[1.0, 1e3, 1e5] {
            for &v_0 in &[1.0, 10.0, 1e3] {
                let (ch, m) = point(0.0, w, v_s, v_0)?;
                for p in Protocol::ALL {
                    if key_rate(p, &ch, &m)?.rate > 0.0 {
                        failures.push(format!("T=0 {p} W={w} Vs={v_s} V0={v_0}"));
                    }
                }
            }
        }
    }
    let detail = if failures.is_empty() { "T=1, Vs=0 and T=0 grids hold".to_string() } else { failures.join("; ") };
    Ok((failures.is_empty(), detail))
}

fn golden_recipes() -> Outcome {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let start = Instant::now();
    let mut detail = Vec::new();
    let mut ok = true;
    for name in ["fig1", "fig2", "fig3", "fig4"] {
        let run = || {
            Command::new(env!("CARGO_BIN_EXE_cvqkd"))
                .arg("--config")
                .arg(root.join("../../recipes").join(format!("{name}.ini")))
                .output()
                .map(|o| (o.status.success(), o.stdout))
        };
        let (a_ok, a) = run().map_err(|e| cvqkd::Error::Numeric(e.to_string()))?;
        let (b_ok, b) = run().map_err(|e| cvqkd::Error::Numeric(e.to_string()))?;
        let golden = std::fs::read(root.join("tests/golden").join(format!("{name}.csv"))).unwrap_or_default();
        let same = a_ok && b_ok && a == b && a == golden;
        ok &= same;
        detail.push(format!("{name} {}", if same { "identical" } else { "differs" }));
    }
    let elapsed = start.elapsed();
    ok &= elapsed.as_secs_f64() < 60.0;
    detail.push(format!("{:.2} s for two passes", elapsed.as_secs_f64()));
    Ok((ok, detail.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1 blackbody variances", blackbody),
        ("2 RR transmission threshold", rr_threshold),
        ("3 DR loss independence", dr_three_db),
        ("4 RR noise bound", noise_bound),
        ("5 microwave window", microwave),
        ("6 mid-infrared band", mid_infrared),
        ("7 oracle equivalence", oracle_equivalence),
        ("8 entropy identities", entropy_identities),
        ("9 degenerate points", degenerate_points),
        ("10 figure golden files", golden_recipes),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let (passed, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
        failed += usize::from(!passed);
        println!("{} {name}: {detail} [{:.2} s]", if passed { "PASS" } else { "FAIL" }, start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
