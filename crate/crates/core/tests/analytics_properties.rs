use aoi_secrecy::analytics::{self, OutageConvention};
use aoi_secrecy::{ChannelParams, Policy, SecrecyThreshold, StationaryQuery};
use proptest::prelude::*;

fn eta(e: u32) -> SecrecyThreshold {
    SecrecyThreshold::new(e).unwrap()
}

/// Brute-force argmax of the objective over `p_tx = k / 1000`.
fn grid_argmax(c: ChannelParams, threshold: SecrecyThreshold, conv: OutageConvention) -> f64 {
    let mut best = (0.0, f64::NEG_INFINITY);
    for k in 1..=1000 {
        let x = k as f64 / 1000.0;
        let v = analytics::objective(c, Policy::new(x).unwrap(), threshold, conv).unwrap();
        if v > best.1 {
            best = (x, v);
        }
    }
    best.0
}

#[test]
fn optimizer_matches_grid_argmax() {
    for q in [0.1, 0.2, 0.25, 0.3, 0.5] {
        for e in [2, 4, 5, 8] {
            for conv in OutageConvention::ALL {
                let closed = analytics::optimal_ptx(q, eta(e), conv).unwrap();
                let a = grid_argmax(ChannelParams::new(0.3, q).unwrap(), eta(e), conv);
                let b = grid_argmax(ChannelParams::new(0.9, q).unwrap(), eta(e), conv);
                assert_eq!(a, b, "argmax depends on p at q={q} eta={e} {conv}");
                assert!((a - closed).abs() <= 1e-3 + 1e-12, "q={q} eta={e} {conv}: {a} vs {closed}");
            }
        }
    }
    let a = grid_argmax(ChannelParams::new(0.8, 0.25).unwrap(), eta(8), OutageConvention::PaperPrinted);
    assert!((a - 0.5).abs() <= 1e-3);
    let s = grid_argmax(ChannelParams::new(0.8, 0.25).unwrap(), eta(8), OutageConvention::StrictDefinition);
    assert!((s - 0.444444).abs() <= 1e-3);
}

#[test]
fn objective_is_unimodal_with_interior_peak() {
    let c = ChannelParams::new(0.8, 0.2).unwrap();
    let values: Vec<f64> = (1..=1000)
        .map(|k| {
            let tx = Policy::new(k as f64 / 1000.0).unwrap();
            analytics::objective(c, tx, eta(10), OutageConvention::PaperPrinted).unwrap()
        })
        .collect();
    let sign_changes = values
        .windows(3)
        .filter(|w| (w[1] - w[0]).signum() != (w[2] - w[1]).signum())
        .count();
    assert_eq!(sign_changes, 1);
    let peak = values.iter().cloned().fold(f64::MIN, f64::max);
    assert!(peak > values[0] && peak > values[999]);
    assert!(values[0] < 2e-3);
}

fn open_prob() -> impl Strategy<Value = f64> {
    0.01..=0.99f64
}

proptest! {
    #[test]
    fn mean_falls_and_outage_rises_with_ptx(
        p in open_prob(),
        q in open_prob(),
        e in 1u32..50,
        a in 0.01..=1.0f64,
        b in 0.01..=1.0f64,
    ) {
        prop_assume!((a - b).abs() > 1e-9);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let c = ChannelParams::new(p, q).unwrap();
        let (lo, hi) = (Policy::new(lo).unwrap(), Policy::new(hi).unwrap());
        let mean = |t| analytics::average_secrecy_age(c, t).unwrap().as_f64();
        prop_assert!(mean(hi) < mean(lo));
        for conv in OutageConvention::ALL {
            let out = |t| analytics::outage_probability(c, t, eta(e), conv).unwrap();
            prop_assert!(out(hi) >= out(lo));
        }
    }

    #[test]
    fn conventions_differ_by_one_gap_slot(p in open_prob(), q in open_prob(), tx in 0.01..=1.0f64, e in 2u32..200) {
        let c = ChannelParams::new(p, q).unwrap();
        let t = Policy::new(tx).unwrap();
        let printed = analytics::outage_probability(c, t, eta(e), OutageConvention::PaperPrinted).unwrap();
        let strict_prev = analytics::outage_probability(c, t, eta(e - 1), OutageConvention::StrictDefinition).unwrap();
        prop_assert!((printed - strict_prev).abs() <= 1e-15);
        let strict = analytics::outage_probability(c, t, eta(e), OutageConvention::StrictDefinition).unwrap();
        let pmf = analytics::secrecy_gap_pmf(e.into(), c, t).unwrap();
        prop_assert!(((strict - printed) - pmf).abs() <= 1e-14);
    }

    #[test]
    fn diagonal_balance(p in 0.0..=1.0f64, q in 0.0..=1.0f64, tx in 0.01..=1.0f64, i in 1u64..300, j in 1u64..300) {
        let c = ChannelParams::new(p, q).unwrap();
        let t = Policy::new(tx).unwrap();
        let stay = tx * (1.0 - q) * (1.0 - p) + 1.0 - tx;
        let here = analytics::stationary_pi(StationaryQuery::new(i, j).unwrap(), c, t);
        let next = analytics::stationary_pi(StationaryQuery::new(i + 1, j + 1).unwrap(), c, t);
        prop_assert!((next - here * stay).abs() <= 1e-14 * here.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn gap_law_is_geometric(p in open_prob(), q in open_prob(), tx in 0.01..=1.0f64, d in 1u64..500) {
        let c = ChannelParams::new(p, q).unwrap();
        let t = Policy::new(tx).unwrap();
        let next = analytics::secrecy_gap_pmf(d + 1, c, t).unwrap();
        prop_assume!(next > 1e-250);
        let r = next / analytics::secrecy_gap_pmf(d, c, t).unwrap();
        prop_assert!((r - (1.0 - tx * q)).abs() < 1e-12);
    }
}

#[test]
fn log_domain_power_for_huge_thresholds() {
    let c = ChannelParams::new(0.5, 1e-7).unwrap();
    let out = analytics::outage_probability(c, Policy::ALWAYS, eta(50_000_000), OutageConvention::StrictDefinition).unwrap();
    let expected = 1.0 - analytics::positive_gap_mass(c).unwrap() * (1.0 - 1e-7f64).powi(50_000_000);
    assert!((out - expected).abs() < 1e-12, "{out} vs {expected}");
}
