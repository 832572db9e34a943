//! Seeded slot-level Monte Carlo.
//!
//! Replication `k` draws from a ChaCha8 stream keyed by `base_seed` with
//! stream number `k`, so any replication can be rerun in isolation and the
//! combined estimate does not depend on which worker ran what.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::SimError;
use crate::math::sqrt;
use crate::model::{AgeState, ChannelParams, Policy, SecrecyThreshold, SlotEvents};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Slots per replication, burn-in included.
    pub horizon: u64,
    /// Leading slots of each replication that are not measured.
    pub burn_in: u64,
    pub replications: u32,
    pub base_seed: u64,
    pub threshold: SecrecyThreshold,
    /// Largest secrecy gap kept in the histogram; larger gaps are only
    /// counted in aggregate.
    pub max_gap: u32,
}

impl SimConfig {
    pub const DEFAULT_HORIZON: u64 = 1_000_000;
    pub const DEFAULT_BURN_IN: u64 = 10_000;
    pub const DEFAULT_REPLICATIONS: u32 = 32;
    pub const DEFAULT_SEED: u64 = 0x5EC_A6E;
    pub const DEFAULT_MAX_GAP: u32 = 1024;

    pub fn new(threshold: SecrecyThreshold) -> Self {
        SimConfig {
            horizon: Self::DEFAULT_HORIZON,
            burn_in: Self::DEFAULT_BURN_IN,
            replications: Self::DEFAULT_REPLICATIONS,
            base_seed: Self::DEFAULT_SEED,
            threshold,
            max_gap: Self::DEFAULT_MAX_GAP,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.horizon == 0 {
            return Err(SimError::EmptyHorizon);
        }
        if self.burn_in >= self.horizon {
            return Err(SimError::BurnInTooLong {
                burn_in: self.burn_in,
                horizon: self.horizon,
            });
        }
        if self.replications == 0 {
            return Err(SimError::NoReplications);
        }
        // Ages start at 1 and grow by at most one per slot.
        if self.horizon >= u64::from(u32::MAX) {
            return Err(SimError::AgeOverflow { slots: self.horizon });
        }
        if self.threshold.get() > self.max_gap {
            return Err(SimError::ThresholdBeyondHistogram {
                threshold: self.threshold.get(),
                max_gap: self.max_gap,
            });
        }
        Ok(())
    }

    /// Measured slots per replication.
    pub fn measured_slots(&self) -> u64 {
        self.horizon - self.burn_in
    }
}

/// Random stream of replication `index`.
pub fn replication_rng(base_seed: u64, index: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(u64::from(index));
    rng
}

/// Accumulators of one replication over its measured slots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplicationStats {
    pub index: u32,
    pub slots: u64,
    pub secrecy_age_sum: u128,
    /// Slots with secrecy age 0.
    pub nonpositive_gap: u64,
    /// `gap_counts[d - 1]` counts slots with secrecy age `d`.
    pub gap_counts: Vec<u64>,
    /// Slots with secrecy age above the histogram range.
    pub gap_overflow: u64,
    /// Slots spent in the age pair `(1, 1)`.
    pub fresh_slots: u64,
}

impl ReplicationStats {
    pub fn mean_secrecy_age(&self) -> f64 {
        self.secrecy_age_sum as f64 / self.slots as f64
    }

    /// Fraction of slots with secrecy age at most `limit`, or `None` when
    /// `limit` is beyond the histogram.
    pub fn outage_frequency(&self, limit: u32) -> Option<f64> {
        if limit as usize > self.gap_counts.len() {
            return None;
        }
        let hits = self.nonpositive_gap + self.gap_counts[..limit as usize].iter().sum::<u64>();
        Some(hits as f64 / self.slots as f64)
    }
}

/// Simulates one replication from the fresh state `(1, 1)`.
pub fn run_replication(
    params: ChannelParams,
    policy: Policy,
    config: &SimConfig,
    index: u32,
) -> Result<ReplicationStats, SimError> {
    config.validate()?;
    let mut rng = replication_rng(config.base_seed, index);
    let mut state = AgeState::FRESH;
    for _ in 0..config.burn_in {
        state = state.advance(SlotEvents::draw(&mut rng, params, policy));
    }
    let mut stats = ReplicationStats {
        index,
        slots: config.measured_slots(),
        secrecy_age_sum: 0,
        nonpositive_gap: 0,
        gap_counts: vec![0; config.max_gap as usize],
        gap_overflow: 0,
        fresh_slots: 0,
    };
    for _ in 0..stats.slots {
        state = state.advance(SlotEvents::draw(&mut rng, params, policy));
        let gap = state.secrecy_age();
        stats.secrecy_age_sum += u128::from(gap);
        match gap {
            0 => stats.nonpositive_gap += 1,
            g if g <= config.max_gap => stats.gap_counts[g as usize - 1] += 1,
            _ => stats.gap_overflow += 1,
        }
        if state == AgeState::FRESH {
            stats.fresh_slots += 1;
        }
    }
    Ok(stats)
}

/// Point estimate with an optional 95% half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub estimate: f64,
    /// `None` with a single replication.
    pub half_width: Option<f64>,
}

impl Interval {
    /// Mean of `samples` with a normal-approximation 95% interval built from
    /// their sample standard deviation.
    pub fn from_samples(samples: &[f64]) -> Interval {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let half_width = (samples.len() > 1).then(|| {
            let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
            Z_95 * sqrt(var / n)
        });
        Interval {
            estimate: mean,
            half_width,
        }
    }

    pub fn covers(&self, value: f64) -> Option<bool> {
        self.half_width
            .map(|h| crate::math::abs(self.estimate - value) <= h)
    }

    /// Standard error implied by the half-width.
    pub fn standard_error(&self) -> Option<f64> {
        self.half_width.map(|h| h / Z_95)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimEstimate {
    pub threshold: SecrecyThreshold,
    pub mean_secrecy_age: Interval,
    /// Frequency of `secrecy_age <= threshold`.
    pub outage_estimate: Interval,
    /// Pooled frequency of each observed positive gap `d`.
    pub empirical_gap_pmf: BTreeMap<u32, f64>,
    /// Pooled frequency of the age pair `(1, 1)`.
    pub fresh_frequency: f64,
    pub slots_observed: u64,
    pub replications: u32,
}

/// Combines replications, in the order given, into one estimate.
pub fn combine(stats: &[ReplicationStats], threshold: SecrecyThreshold) -> Result<SimEstimate, SimError> {
    let first = stats.first().ok_or(SimError::NothingToCombine)?;
    let max_gap = first.gap_counts.len() as u32;
    let limit = threshold.get();
    let outages = stats
        .iter()
        .map(|s| s.outage_frequency(limit))
        .collect::<Option<Vec<_>>>()
        .ok_or(SimError::ThresholdBeyondHistogram { threshold: limit, max_gap })?;
    let means: Vec<f64> = stats.iter().map(ReplicationStats::mean_secrecy_age).collect();

    let slots: u64 = stats.iter().map(|s| s.slots).sum();
    let mut pooled = vec![0u64; max_gap as usize];
    for s in stats {
        for (acc, c) in pooled.iter_mut().zip(&s.gap_counts) {
            *acc += c;
        }
    }
    let empirical_gap_pmf = pooled
        .iter()
        .enumerate()
        .filter(|(_, c)| **c > 0)
        .map(|(k, c)| (k as u32 + 1, *c as f64 / slots as f64))
        .collect();
    let fresh: u64 = stats.iter().map(|s| s.fresh_slots).sum();

    Ok(SimEstimate {
        threshold,
        mean_secrecy_age: Interval::from_samples(&means),
        outage_estimate: Interval::from_samples(&outages),
        empirical_gap_pmf,
        fresh_frequency: fresh as f64 / slots as f64,
        slots_observed: slots,
        replications: stats.len() as u32,
    })
}

/// Runs all replications sequentially and combines them.
pub fn estimate(params: ChannelParams, policy: Policy, config: &SimConfig) -> Result<SimEstimate, SimError> {
    let stats = (0..config.replications)
        .map(|k| run_replication(params, policy, config, k))
        .collect::<Result<Vec<_>, _>>()?;
    combine(&stats, config.threshold)
}

/// One slot of a recorded trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotRecord {
    pub slot: u64,
    pub state: AgeState,
    pub events: SlotEvents,
}

/// Iterator over the states of replication `index`, starting at `(1, 1)`
/// in slot 0. Burn-in is not skipped.
pub struct Trajectory {
    params: ChannelParams,
    policy: Policy,
    rng: ChaCha8Rng,
    state: AgeState,
    slot: u64,
    events: SlotEvents,
}

impl Trajectory {
    pub fn new(params: ChannelParams, policy: Policy, base_seed: u64, index: u32) -> Self {
        Trajectory {
            params,
            policy,
            rng: replication_rng(base_seed, index),
            state: AgeState::FRESH,
            slot: 0,
            events: SlotEvents::default(),
        }
    }
}

impl Iterator for Trajectory {
    type Item = SlotRecord;

    fn next(&mut self) -> Option<SlotRecord> {
        let record = SlotRecord {
            slot: self.slot,
            state: self.state,
            events: self.events,
        };
        self.events = SlotEvents::draw(&mut self.rng, self.params, self.policy);
        self.state = self.state.checked_advance(self.events)?;
        self.slot += 1;
        Some(record)
    }
}
