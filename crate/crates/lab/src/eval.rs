//! Per-point evaluation by oracle and Monte Carlo, on a bounded worker pool.

use aoi_secrecy::oracle::{self, SteadyState, TruncatedChain};
use aoi_secrecy::sim::{self, Interval, ReplicationStats};
use aoi_secrecy::{ChannelParams, OracleError, Policy, SecrecyThreshold, SimError};
use rayon::prelude::*;

use crate::config::{OracleSettings, SimSettings};
use crate::LabError;

/// Power-iteration cap; far beyond what any admissible truncation needs.
const MAX_ITERATIONS: usize = 2_000_000;

pub struct Runner {
    pool: rayon::ThreadPool,
}

impl Runner {
    /// Pool with `workers` threads, or one per core.
    pub fn new(workers: Option<usize>) -> Result<Self, LabError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.unwrap_or(0))
            .build()
            .map_err(|e| LabError::Pool(e.to_string()))?;
        Ok(Runner { pool })
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// Maps `f` over `items` in parallel; results keep the input order.
    pub fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        self.pool.install(|| items.par_iter().map(f).collect())
    }

    /// Runs every replication at one point. Each replication owns its
    /// stream, so the result does not depend on the pool size.
    pub fn replications(
        &self,
        params: ChannelParams,
        policy: Policy,
        settings: &SimSettings,
        max_limit: u32,
    ) -> Result<McRun, SimError> {
        let threshold = SecrecyThreshold::new(max_limit.max(1)).expect("positive threshold");
        let config = settings.config(threshold, max_limit);
        config.validate()?;
        let stats = self.pool.install(|| {
            (0..config.replications)
                .into_par_iter()
                .map(|k| sim::run_replication(params, policy, &config, k))
                .collect::<Result<Vec<_>, _>>()
        })?;
        Ok(McRun { stats })
    }
}

/// Replication statistics at one parameter point.
#[derive(Debug, Clone)]
pub struct McRun {
    pub stats: Vec<ReplicationStats>,
}

impl McRun {
    pub fn mean_secrecy_age(&self) -> Interval {
        let means: Vec<f64> = self.stats.iter().map(ReplicationStats::mean_secrecy_age).collect();
        Interval::from_samples(&means)
    }

    /// Frequency of `secrecy_age <= limit` across replications.
    pub fn outage(&self, limit: u32) -> Interval {
        let freqs: Vec<f64> = self
            .stats
            .iter()
            .map(|s| s.outage_frequency(limit).expect("histogram sized for every limit"))
            .collect();
        Interval::from_samples(&freqs)
    }

    pub fn slots(&self) -> u64 {
        self.stats.iter().map(|s| s.slots).sum()
    }
}

/// Truncation used for one point.
pub fn truncation_for(params: ChannelParams, policy: Policy, settings: &OracleSettings) -> Result<u32, OracleError> {
    match settings.truncation {
        Some(n) => Ok(n),
        None => oracle::auto_truncation(
            params,
            policy,
            settings.probability_tail,
            settings.mean_tail,
            settings.min_truncation,
            settings.max_truncation,
        ),
    }
}

pub fn steady_state(params: ChannelParams, policy: Policy, settings: &OracleSettings) -> Result<SteadyState, OracleError> {
    let n = truncation_for(params, policy, settings)?;
    let chain = TruncatedChain::build(params, policy, n)?;
    oracle::steady_state(&chain, settings.tolerance, MAX_ITERATIONS)
}

/// Oracle figures at one point.
#[derive(Debug, Clone)]
pub struct OracleRun {
    pub steady: SteadyState,
    pub mean: f64,
    pub mean_bound: f64,
}

impl OracleRun {
    pub fn new(params: ChannelParams, policy: Policy, settings: &OracleSettings) -> Result<Self, OracleError> {
        let steady = steady_state(params, policy, settings)?;
        let report = oracle::oracle_metrics(&steady, SecrecyThreshold::new(1).expect("positive"));
        Ok(OracleRun {
            mean: report.average_secrecy_age.value,
            mean_bound: report.average_secrecy_age.error_bar().unwrap_or(f64::INFINITY),
            steady,
        })
    }

    pub fn outage(&self, limit: u32) -> f64 {
        oracle::oracle_outage_at(&self.steady, limit)
    }

    /// Error bound shared by every probability read off the oracle.
    pub fn probability_bound(&self) -> f64 {
        self.steady.boundary_mass()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_keeps_order() {
        let runner = Runner::new(Some(3)).unwrap();
        let items: Vec<u32> = (0..100).collect();
        assert_eq!(runner.map(&items, |x| x * 2), items.iter().map(|x| x * 2).collect::<Vec<_>>());
        assert_eq!(runner.workers(), 3);
    }

    #[test]
    fn replications_independent_of_pool_size() {
        let params = ChannelParams::new(0.6, 0.3).unwrap();
        let policy = Policy::new(0.7).unwrap();
        let settings = SimSettings {
            horizon: 20_000,
            burn_in: 100,
            replications: 6,
            seed: 42,
        };
        let a = Runner::new(Some(1)).unwrap().replications(params, policy, &settings, 5).unwrap();
        let b = Runner::new(Some(4)).unwrap().replications(params, policy, &settings, 5).unwrap();
        assert_eq!(a.stats, b.stats);
        assert_eq!(a.mean_secrecy_age(), b.mean_secrecy_age());
    }
}
