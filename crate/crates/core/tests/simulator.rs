use aoi_secrecy::analytics::{self, OutageConvention};
use aoi_secrecy::sim::{combine, estimate, run_replication, SimConfig};
use aoi_secrecy::{ChannelParams, Policy, SecrecyThreshold};

fn eta(e: u32) -> SecrecyThreshold {
    SecrecyThreshold::new(e).unwrap()
}

#[test]
fn mean_secrecy_age_within_three_standard_errors() {
    let c = ChannelParams::new(0.8, 0.2).unwrap();
    let cfg = SimConfig {
        horizon: 135_000,
        burn_in: 10_000,
        replications: 8,
        ..SimConfig::new(eta(5))
    };
    let est = estimate(c, Policy::ALWAYS, &cfg).unwrap();
    assert_eq!(est.slots_observed, 1_000_000);
    let se = est.mean_secrecy_age.standard_error().unwrap();
    assert!((est.mean_secrecy_age.estimate - 3.809524).abs() <= 3.0 * se);
}

#[test]
fn outage_estimate_adjudicates_convention() {
    let (c, tx) = (ChannelParams::new(0.8, 0.2).unwrap(), Policy::new(0.5).unwrap());
    let est = estimate(c, tx, &SimConfig::new(eta(5))).unwrap();
    let strict = analytics::outage_probability(c, tx, eta(5), OutageConvention::StrictDefinition).unwrap();
    let printed = analytics::outage_probability(c, tx, eta(5), OutageConvention::PaperPrinted).unwrap();
    assert_eq!(est.outage_estimate.covers(strict), Some(true));
    assert_eq!(est.outage_estimate.covers(printed), Some(false));
    // Fresh-state frequency is p_tx p q.
    assert!((est.fresh_frequency - 0.08).abs() < 5e-4);
}

#[test]
fn empirical_gap_law_matches_closed_form() {
    let (c, tx) = (ChannelParams::new(0.6, 0.3).unwrap(), Policy::new(0.7).unwrap());
    let cfg = SimConfig {
        horizon: 1_010_000,
        burn_in: 10_000,
        replications: 10,
        ..SimConfig::new(eta(3))
    };
    let stats: Vec<_> = (0..cfg.replications)
        .map(|k| run_replication(c, tx, &cfg, k).unwrap())
        .collect();
    for d in 1..=20u32 {
        let freqs: Vec<f64> = stats
            .iter()
            .map(|s| s.gap_counts[d as usize - 1] as f64 / s.slots as f64)
            .collect();
        let n = freqs.len() as f64;
        let mean = freqs.iter().sum::<f64>() / n;
        let sd = (freqs.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        let expected = analytics::secrecy_gap_pmf(d.into(), c, tx).unwrap();
        assert!((mean - expected).abs() <= 5.0 * sd / n.sqrt(), "d = {d}: {mean} vs {expected}");
    }
    let pooled = combine(&stats, cfg.threshold).unwrap();
    let expected = analytics::secrecy_gap_pmf(1, c, tx).unwrap();
    assert!((pooled.empirical_gap_pmf[&1] - expected).abs() < 2e-3);
    let total: f64 = pooled.empirical_gap_pmf.values().sum();
    assert!(total <= 1.0 + 1e-12);
}

#[test]
fn interval_shrinks_like_root_n() {
    let (c, tx) = (ChannelParams::new(0.5, 0.4).unwrap(), Policy::new(0.8).unwrap());
    let cfg = SimConfig {
        horizon: 11_000,
        burn_in: 1_000,
        replications: 256,
        ..SimConfig::new(eta(2))
    };
    let stats: Vec<_> = (0..cfg.replications)
        .map(|k| run_replication(c, tx, &cfg, k).unwrap())
        .collect();
    let half = combine(&stats[..128], cfg.threshold).unwrap();
    let full = combine(&stats, cfg.threshold).unwrap();
    let ratio = full.mean_secrecy_age.half_width.unwrap() / half.mean_secrecy_age.half_width.unwrap();
    let target = 1.0 / 2f64.sqrt();
    assert!((ratio - target).abs() <= 0.2 * target, "ratio {ratio}");
}

#[test]
fn combining_is_order_sensitive_only_through_indices() {
    let (c, tx) = (ChannelParams::new(0.5, 0.4).unwrap(), Policy::new(0.8).unwrap());
    let cfg = SimConfig {
        horizon: 20_000,
        burn_in: 100,
        replications: 6,
        ..SimConfig::new(eta(2))
    };
    let forward: Vec<_> = (0..6).map(|k| run_replication(c, tx, &cfg, k).unwrap()).collect();
    let mut backward: Vec<_> = (0..6).rev().map(|k| run_replication(c, tx, &cfg, k).unwrap()).collect();
    backward.sort_by_key(|s| s.index);
    assert_eq!(combine(&forward, cfg.threshold), combine(&backward, cfg.threshold));
    assert_eq!(combine(&forward, cfg.threshold).unwrap(), estimate(c, tx, &cfg).unwrap());
}
