use cvqkd::channel::{bob_conditional_variance, bob_variance, mutual_information_ab, ChannelParams, ModulationParams};
use cvqkd::eve::{
    dr_conditional_spectrum_closed, eve_cm, eve_conditional_cm_dr, holevo_dr, holevo_dr_report, holevo_rr,
    holevo_rr_report,
};
use cvqkd::gaussian::symplectic_spectrum_generic;
use cvqkd::keyrate::{key_rate, Protocol};
use proptest::prelude::*;

fn lin(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

fn log(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    lin(lo.ln(), hi.ln(), n).map(f64::exp)
}

fn point(t: f64, w: f64, v_s: f64, v_0: f64) -> (ChannelParams, ModulationParams) {
    (ChannelParams::new(t, w).unwrap(), ModulationParams::new(v_s, v_0).unwrap())
}

#[test]
fn mutual_information_monotone_in_signal_and_transmission() {
    let ts: Vec<f64> = lin(0.0, 1.0, 20).collect();
    let vss: Vec<f64> = log(1e-2, 1e6, 20).collect();
    for &v_0 in &[1.0, 10.0, 1e3] {
        for (i, &t) in ts.iter().enumerate() {
            for (j, &v_s) in vss.iter().enumerate() {
                let here =
                    mutual_information_ab(&ChannelParams::lossy(t).unwrap(), &ModulationParams::new(v_s, v_0).unwrap());
                if i + 1 < ts.len() {
                    let up = mutual_information_ab(
                        &ChannelParams::lossy(ts[i + 1]).unwrap(),
                        &ModulationParams::new(v_s, v_0).unwrap(),
                    );
                    assert!(up >= here, "T: {t} -> {}", ts[i + 1]);
                }
                if j + 1 < vss.len() {
                    let up = mutual_information_ab(
                        &ChannelParams::lossy(t).unwrap(),
                        &ModulationParams::new(vss[j + 1], v_0).unwrap(),
                    );
                    assert!(up >= here, "V_S: {v_s} -> {}", vss[j + 1]);
                }
            }
        }
    }
}

#[test]
fn mutual_information_falls_with_carrier_noise() {
    for t in lin(0.05, 1.0, 10) {
        for &w in &[1.0, 3.0] {
            let mut prev = f64::INFINITY;
            for v_0 in log(1.0, 1e6, 30) {
                let (ch, m) = point(t, w, 1e5, v_0);
                let i = mutual_information_ab(&ch, &m);
                assert!(i <= prev);
                prev = i;
            }
        }
    }
}

proptest! {
    #[test]
    fn variance_gap_is_signal(t in 0.0f64..=1.0, w in 1.0f64..100.0, v_s in 0.0f64..1e6, v_0 in 1.0f64..1e4) {
        let (ch, m) = point(t, w, v_s, v_0);
        let gap = bob_variance(&ch, &m) - bob_conditional_variance(&ch, &m);
        prop_assert!((gap - t * v_s).abs() <= 1e-12 * bob_variance(&ch, &m).max(1.0));
    }
}

/// The 20 x 20 x 3 (T, V0, W) grid for attack-state invariants.
fn eve_grid() -> Vec<(ChannelParams, ModulationParams)> {
    let mut out = Vec::new();
    for t in lin(0.01, 0.99, 20) {
        for v_0 in log(1.0, 1e4, 20) {
            for &w in &[1.0, 2.0, 20.0] {
                out.push(point(t, w, 1e5, v_0));
            }
        }
    }
    out
}

#[test]
fn conditioning_never_increases_entropy() {
    for (ch, m) in eve_grid() {
        let rr = holevo_rr_report(&ch, &m).unwrap();
        let dr = holevo_dr_report(&ch, &m).unwrap();
        assert!(rr.s_conditional <= rr.s_e + 1e-9 * rr.s_e.max(1.0), "{ch:?} {m:?}");
        assert!(dr.s_conditional <= dr.s_e + 1e-9 * dr.s_e.max(1.0), "{ch:?} {m:?}");
    }
}

#[test]
fn dr_closed_form_matches_oracle_on_grid() {
    let mut worst = 0.0f64;
    for (ch, m) in eve_grid() {
        let closed = dr_conditional_spectrum_closed(&ch, &m).unwrap();
        let oracle = symplectic_spectrum_generic(eve_conditional_cm_dr(&ch, &m).unwrap().cm()).unwrap();
        worst = worst.max(closed.max_relative_difference(&oracle));
    }
    assert!(worst <= 1e-8, "{worst:e}");
}

#[test]
fn perfect_channel_leaks_nothing() {
    for &w in &[1.0, 2.0, 100.0, 1e4, 1e6] {
        for &v_s in &[0.0, 1.0, 1e3, 1e6] {
            for &v_0 in &[1.0, 10.0, 1e3, 1e6] {
                let (ch, m) = point(1.0, w, v_s, v_0);
                assert!(holevo_dr(&ch, &m).unwrap().abs() <= 1e-6, "dr W={w} Vs={v_s} V0={v_0}");
                assert!(holevo_rr(&ch, &m).unwrap().abs() <= 1e-6, "rr W={w} Vs={v_s} V0={v_0}");
            }
        }
    }
}

#[test]
fn no_signal_no_key() {
    // Eve learns nothing about Alice's (absent) encoding. Bob's outcome still
    // carries thermal noise correlated with Eve, so only the rate bound holds
    // for reverse reconciliation.
    for t in lin(0.0, 1.0, 11) {
        for &w in &[1.0, 2.0, 50.0] {
            for &v_0 in &[1.0, 10.0, 1e3] {
                let (ch, m) = point(t, w, 0.0, v_0);
                assert!(holevo_dr(&ch, &m).unwrap().abs() <= 1e-6);
                assert_eq!(mutual_information_ab(&ch, &m), 0.0);
                assert!(key_rate(Protocol::Reverse, &ch, &m).unwrap().rate <= 0.0);
            }
        }
    }
    let (ch, m) = point(0.6, 1.0, 0.0, 1.0);
    assert!(holevo_rr(&ch, &m).unwrap().abs() <= 1e-6);
}

#[test]
fn eve_spectrum_is_symmetric_in_role() {
    let ch = ChannelParams::new(0.4, 3.0).unwrap();
    let a = symplectic_spectrum_generic(eve_cm(7.0, 7.0, &ch).unwrap().cm()).unwrap();
    assert_eq!(a.nu().len(), 2);
    assert!(a.nu()[1] >= 1.0);
}

fn sign_changes(rates: &[f64]) -> usize {
    rates.windows(2).filter(|w| (w[0] > 0.0) != (w[1] > 0.0)).count()
}

#[test]
fn rate_crosses_zero_once_in_transmission() {
    for p in Protocol::ALL {
        for &v_0 in &[1.0, 10.0, 1e3] {
            let ts: Vec<f64> = lin(0.01, 1.0, 100).collect();
            let rates: Vec<f64> = ts
                .iter()
                .map(|&t| key_rate(p, &point(t, 1.0, 1e5, v_0).0, &point(t, 1.0, 1e5, v_0).1).unwrap().rate)
                .collect();
            assert!(sign_changes(&rates) <= 1, "{p} V0={v_0}");
            assert!(*rates.last().unwrap() > 0.0, "{p} V0={v_0}");
            for (k, w) in rates.windows(2).enumerate() {
                if w[1] > 0.0 {
                    assert!(w[1] > w[0], "{p} V0={v_0} T={}: {} after {}", ts[k + 1], w[1], w[0]);
                }
            }
        }
    }
}

#[test]
fn rate_crosses_zero_once_in_preparation_noise() {
    for p in Protocol::ALL {
        for t in lin(0.05, 0.95, 10) {
            let rates: Vec<f64> = log(1e-3, 1e4, 60)
                .map(|beta| {
                    let (ch, m) = point(t, 1.0, 1e5, 1.0 + beta);
                    key_rate(p, &ch, &m).unwrap().rate
                })
                .collect();
            assert!(sign_changes(&rates) <= 1, "{p} T={t}");
            assert!(!rates.windows(2).any(|w| w[0] <= 0.0 && w[1] > 0.0), "{p} T={t}: regains security");
            for w in rates.windows(2) {
                if w[0] > 0.0 {
                    assert!(w[1] < w[0], "{p} T={t}: {} after {}", w[1], w[0]);
                }
            }
        }
    }
}

#[test]
fn rate_is_not_monotone_where_insecure() {
    let rr =
        |t: f64| key_rate(Protocol::Reverse, &point(t, 1.0, 1e5, 10.0).0, &point(t, 1.0, 1e5, 10.0).1).unwrap().rate;
    let (a, b) = (rr(0.01), rr(0.0302));
    assert!((a + 0.054_914_379_762).abs() < 1e-9 && (b + 0.151_315_785_889).abs() < 1e-9, "{a} {b}");
    assert!(b < a);

    let dr = |beta: f64| {
        key_rate(Protocol::Direct, &point(0.05, 1.0, 1e5, 1.0 + beta).0, &point(0.05, 1.0, 1e5, 1.0 + beta).1)
            .unwrap()
            .rate
    };
    let (a, b) = (dr(0.0), dr(0.00174));
    assert!((a + 2.123_829_625_59).abs() < 1e-9 && (b + 2.122_700_973_17).abs() < 1e-9, "{a} {b}");
    assert!(b > a);
}

#[test]
fn dr_three_db_limit_for_every_carrier() {
    for &v_0 in &[1.0, 10.0, 1e2, 1e3, 1e4] {
        let (hi, m) = point(0.55, 1.0, 1e5, v_0);
        let (lo, _) = point(0.45, 1.0, 1e5, v_0);
        assert!(key_rate(Protocol::Direct, &hi, &m).unwrap().rate > 0.0);
        assert!(key_rate(Protocol::Direct, &lo, &m).unwrap().rate < 0.0);
    }
}

#[test]
fn opaque_channel_gives_no_key() {
    for p in Protocol::ALL {
        for &w in &[1.0, 5.0] {
            for &v_0 in &[1.0, 100.0] {
                let (ch, m) = point(0.0, w, 1e5, v_0);
                assert!(key_rate(p, &ch, &m).unwrap().rate <= 0.0);
            }
        }
    }
}
