//! Numerical ground truth: the age chain truncated at `N` and solved by power
//! iteration.
//!
//! Ages above `N` are pinned at `N`. Every state with an age of at least `N`
//! in some coordinate behaves identically in that coordinate (reset or keep
//! growing), so the clamp is an exact lumping of the infinite chain: the
//! stationary mass of `(i, j)` with `i, j < N` is unaffected, and the boundary
//! states `i = N` or `j = N` carry exactly the tail mass. Metrics that look at
//! ages through the clamp are reported with a bound on the resulting error.
//!
//! The operator is built only from [`transition_distribution`] and never
//! consults the closed forms in [`crate::analytics`].

use alloc::vec;
use alloc::vec::Vec;

use crate::analytics::OutageConvention;
use crate::error::OracleError;
use crate::math::{abs, pow_n};
use crate::model::{transition_distribution, AgeState, ChannelParams, Policy, SecrecyThreshold};
use crate::report::{Figure, Provenance, SecrecyReport, Uncertainty};

const CLAMP_D: u8 = 1;
const CLAMP_E: u8 = 2;

/// Sparse row-stochastic operator over the ages `1..=N` in each coordinate.
///
/// Stored by incoming edges so one power-iteration step is a gather per
/// state.
#[derive(Debug, Clone)]
pub struct TruncatedChain {
    params: ChannelParams,
    policy: Policy,
    truncation: u32,
    in_offsets: Vec<usize>,
    in_sources: Vec<u32>,
    /// Index into `palette` per incoming edge.
    in_weights: Vec<u8>,
    in_clamps: Vec<u8>,
    /// Distinct transition probabilities; every entry comes from one of the
    /// four outcome products, so this stays tiny.
    palette: Vec<f64>,
    clamped_edges: usize,
    max_row_deviation: f64,
}

/// Tail bounds implied by a truncation level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBound {
    /// Stationary probability that either age reaches the boundary.
    pub probability: f64,
    /// Bound on the mean secrecy age lost to the clamp.
    pub mean_secrecy_age: f64,
}

/// Each age is marginally a renewal process resetting with probability
/// `p_tx p` (resp. `p_tx q`) per slot, so `P(age >= N) = (1 - rate)^(N-1)` and
/// the expected overshoot past `N` is `(1 - rate) / rate`.
pub fn tail_bound(params: ChannelParams, policy: Policy, truncation: u32) -> TailBound {
    let reset_d = policy.p_tx() * params.p();
    let reset_e = policy.p_tx() * params.q();
    let n = u64::from(truncation.max(1)) - 1;
    let beyond_d = pow_n(1.0 - reset_d, n);
    let beyond_e = pow_n(1.0 - reset_e, n);
    let mean = if reset_e > 0.0 {
        beyond_e * (1.0 - reset_e) / reset_e
    } else {
        f64::INFINITY
    };
    TailBound {
        probability: (beyond_d + beyond_e).min(1.0),
        mean_secrecy_age: mean,
    }
}

/// Smallest truncation in `min..=max` whose probability tail bound is at
/// most `max_probability` and whose mean tail bound is at most `max_mean`.
pub fn auto_truncation(
    params: ChannelParams,
    policy: Policy,
    max_probability: f64,
    max_mean: f64,
    min: u32,
    max: u32,
) -> Result<u32, OracleError> {
    (min.max(2)..=max)
        .find(|&n| {
            let b = tail_bound(params, policy, n);
            b.probability <= max_probability && b.mean_secrecy_age <= max_mean
        })
        .ok_or(OracleError::TruncationLimit {
            max,
            requested: max_probability.min(max_mean),
        })
}

impl TruncatedChain {
    pub fn build(params: ChannelParams, policy: Policy, truncation: u32) -> Result<Self, OracleError> {
        if truncation < 2 {
            return Err(OracleError::TruncationTooSmall(truncation));
        }
        let n = truncation as usize;
        let states = n * n;
        let mut forward: Vec<(u32, u32, f64, u8)> = Vec::with_capacity(4 * states);
        let mut indegree = vec![0usize; states];
        let mut clamped_edges = 0;
        let mut max_row_deviation = 0.0f64;
        for i in 1..=truncation {
            for j in 1..=truncation {
                let from = AgeState::new(i, j).expect("ages start at 1");
                let src = index(n, i, j) as u32;
                let mut row = 0.0;
                for &(to, prob) in &transition_distribution(from, params, policy) {
                    let mut flags = 0;
                    if to.delta_d() > truncation {
                        flags |= CLAMP_D;
                    }
                    if to.delta_e() > truncation {
                        flags |= CLAMP_E;
                    }
                    if flags != 0 {
                        clamped_edges += 1;
                    }
                    let dst = index(n, to.delta_d().min(truncation), to.delta_e().min(truncation));
                    indegree[dst] += 1;
                    forward.push((src, dst as u32, prob, flags));
                    row += prob;
                }
                max_row_deviation = max_row_deviation.max(abs(row - 1.0));
            }
        }

        let mut in_offsets = Vec::with_capacity(states + 1);
        in_offsets.push(0);
        for d in &indegree {
            in_offsets.push(in_offsets.last().unwrap() + d);
        }
        let edges = forward.len();
        let mut cursor = in_offsets.clone();
        let mut in_sources = vec![0u32; edges];
        let mut in_weights = vec![0u8; edges];
        let mut in_clamps = vec![0u8; edges];
        let mut palette: Vec<f64> = Vec::new();
        for (src, dst, prob, flags) in forward {
            let class = match palette.iter().position(|w| w.to_bits() == prob.to_bits()) {
                Some(k) => k,
                None => {
                    palette.push(prob);
                    palette.len() - 1
                }
            };
            let slot = &mut cursor[dst as usize];
            in_sources[*slot] = src;
            in_weights[*slot] = u8::try_from(class).expect("at most four distinct probabilities");
            in_clamps[*slot] = flags;
            *slot += 1;
        }

        Ok(TruncatedChain {
            params,
            policy,
            truncation,
            in_offsets,
            in_sources,
            in_weights,
            in_clamps,
            palette,
            clamped_edges,
            max_row_deviation,
        })
    }

    /// Builds the chain only if its [`tail_bound`] is within `max_tail`.
    pub fn build_with_tail_bound(
        params: ChannelParams,
        policy: Policy,
        truncation: u32,
        max_tail: f64,
    ) -> Result<Self, OracleError> {
        let bound = tail_bound(params, policy, truncation);
        let worst = bound.probability.max(bound.mean_secrecy_age);
        if worst > max_tail {
            return Err(OracleError::TailBoundNotMet {
                truncation,
                bound: worst,
                requested: max_tail,
            });
        }
        Self::build(params, policy, truncation)
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn params(&self) -> ChannelParams {
        self.params
    }

    pub fn policy(&self) -> Policy {
        self.policy
    }

    pub fn num_states(&self) -> usize {
        self.in_offsets.len() - 1
    }

    /// Number of transitions redirected to the boundary.
    pub fn clamped_edges(&self) -> usize {
        self.clamped_edges
    }

    /// Largest `|row sum - 1|` seen while building.
    pub fn max_row_deviation(&self) -> f64 {
        self.max_row_deviation
    }

    /// Row sums of the operator, recomputed from the stored edges.
    pub fn row_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.num_states()];
        for (src, w) in self.in_sources.iter().zip(&self.in_weights) {
            sums[*src as usize] += self.palette[*w as usize];
        }
        sums
    }

    /// Index of the age pair `(i, j)` in distribution vectors.
    pub fn state_index(&self, i: u32, j: u32) -> Option<usize> {
        let n = self.truncation;
        ((1..=n).contains(&i) && (1..=n).contains(&j)).then(|| index(n as usize, i, j))
    }

    /// One application `next = current * T`; returns the L1 residual
    /// `|next - current|_1`.
    fn step(&self, current: &[f64], next: &mut [f64]) -> f64 {
        let palette: [f64; 4] = core::array::from_fn(|k| self.palette.get(k).copied().unwrap_or(0.0));
        let mut residual = 0.0;
        for (s, (out, bounds)) in next.iter_mut().zip(self.in_offsets.windows(2)).enumerate() {
            let srcs = &self.in_sources[bounds[0]..bounds[1]];
            let classes = &self.in_weights[bounds[0]..bounds[1]];
            // Four partial sums: the (1, 1) row gathers from every state.
            let mut acc = [0.0f64; 4];
            let mut chunks = srcs.chunks_exact(4).zip(classes.chunks_exact(4));
            for (src4, cls4) in &mut chunks {
                for k in 0..4 {
                    acc[k] += current[src4[k] as usize] * palette[cls4[k] as usize & 3];
                }
            }
            let tail = srcs.len() / 4 * 4;
            for (src, cls) in srcs[tail..].iter().zip(&classes[tail..]) {
                acc[0] += current[*src as usize] * palette[*cls as usize & 3];
            }
            let total = (acc[0] + acc[1]) + (acc[2] + acc[3]);
            residual += abs(total - current[s]);
            *out = total;
        }
        residual
    }

    /// Per-slot probability flow through clamped transitions, split by
    /// coordinate.
    fn clamp_flow(&self, dist: &[f64]) -> (f64, f64) {
        let (mut d, mut e) = (0.0, 0.0);
        for ((src, w), flags) in self.in_sources.iter().zip(&self.in_weights).zip(&self.in_clamps) {
            let flow = dist[*src as usize] * self.palette[*w as usize];
            if flags & CLAMP_D != 0 {
                d += flow;
            }
            if flags & CLAMP_E != 0 {
                e += flow;
            }
        }
        (d, e)
    }
}

fn index(n: usize, i: u32, j: u32) -> usize {
    (i as usize - 1) * n + (j as usize - 1)
}

/// Converged stationary vector of a [`TruncatedChain`].
#[derive(Debug, Clone)]
pub struct SteadyState {
    params: ChannelParams,
    policy: Policy,
    truncation: u32,
    probs: Vec<f64>,
    iterations: usize,
    residual: f64,
    clamp_flow: (f64, f64),
}

/// Power iteration from the point mass on `(1, 1)` until the L1 residual of
/// one step is at most `tol`.
pub fn steady_state(chain: &TruncatedChain, tol: f64, max_iters: usize) -> Result<SteadyState, OracleError> {
    let mut init = vec![0.0; chain.num_states()];
    init[0] = 1.0;
    steady_state_from(chain, init, tol, max_iters)
}

/// Power iteration from a caller-supplied distribution.
pub fn steady_state_from(
    chain: &TruncatedChain,
    initial: Vec<f64>,
    tol: f64,
    max_iters: usize,
) -> Result<SteadyState, OracleError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(OracleError::BadTolerance(tol));
    }
    if initial.len() != chain.num_states() {
        return Err(OracleError::InitialLength {
            expected: chain.num_states(),
            got: initial.len(),
        });
    }
    let mut current = initial;
    let mut next = vec![0.0; current.len()];
    let mut residual = f64::INFINITY;
    for iteration in 1..=max_iters {
        residual = chain.step(&current, &mut next);
        core::mem::swap(&mut current, &mut next);
        if residual <= tol {
            let total: f64 = current.iter().sum();
            current.iter_mut().for_each(|x| *x /= total);
            let clamp_flow = chain.clamp_flow(&current);
            return Ok(SteadyState {
                params: chain.params,
                policy: chain.policy,
                truncation: chain.truncation,
                probs: current,
                iterations: iteration,
                residual,
                clamp_flow,
            });
        }
    }
    Err(OracleError::NotConverged {
        iterations: max_iters,
        residual,
    })
}

impl SteadyState {
    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    /// Stationary mass of `(i, j)`; zero outside `1..=N`.
    pub fn pi(&self, i: u32, j: u32) -> f64 {
        let n = self.truncation;
        if (1..=n).contains(&i) && (1..=n).contains(&j) {
            self.probs[index(n as usize, i, j)]
        } else {
            0.0
        }
    }

    /// Iterates `(i, j, probability)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        let n = self.truncation;
        self.probs.iter().enumerate().map(move |(k, p)| {
            let k = k as u32;
            (k / n + 1, k % n + 1, *p)
        })
    }

    /// Mass on states where either age sits at the boundary `N`.
    pub fn boundary_mass(&self) -> f64 {
        let n = self.truncation;
        self.entries()
            .filter(|(i, j, _)| *i == n || *j == n)
            .map(|(_, _, p)| p)
            .sum()
    }

    /// Mass on states where the eavesdropper's age sits at `N`.
    pub fn eavesdropper_boundary_mass(&self) -> f64 {
        let n = self.truncation;
        (1..=n).map(|i| self.pi(i, n)).sum()
    }

    /// Stationary per-slot flow through clamped transitions, as
    /// `(destination, eavesdropper)`.
    pub fn clamp_flow(&self) -> (f64, f64) {
        self.clamp_flow
    }
}

/// Evaluates the secrecy metrics by exhaustive summation over the truncated
/// support.
///
/// The outage figure is the probability of `secrecy_age <= threshold`. Its
/// error, and that of each gap probability, is bounded by the boundary mass.
/// The average secrecy age is a lower estimate; it misses at most the
/// expected overshoot of the eavesdropper's age past `N`.
pub fn oracle_metrics(steady: &SteadyState, threshold: SecrecyThreshold) -> SecrecyReport {
    let n = steady.truncation;
    let mut gap_pmf = vec![0.0; n as usize - 1];
    let mut mean = 0.0;
    let mut outage = 0.0;
    for (i, j, prob) in steady.entries() {
        let gap = j.saturating_sub(i);
        if gap == 0 {
            outage += prob;
            continue;
        }
        gap_pmf[gap as usize - 1] += prob;
        mean += f64::from(gap) * prob;
        if gap <= threshold.get() {
            outage += prob;
        }
    }

    let boundary = steady.boundary_mass();
    let reset_e = steady.policy.p_tx() * steady.params.q();
    let mean_bound = if reset_e > 0.0 {
        steady.eavesdropper_boundary_mass() * (1.0 - reset_e) / reset_e
    } else {
        f64::INFINITY
    };

    SecrecyReport {
        provenance: Provenance::Oracle {
            truncation: n,
            iterations: steady.iterations,
        },
        threshold,
        convention: OutageConvention::StrictDefinition,
        average_secrecy_age: Figure {
            value: mean,
            uncertainty: Uncertainty::TruncationBound(mean_bound),
        },
        outage_probability: Figure {
            value: outage.min(1.0),
            uncertainty: Uncertainty::TruncationBound(boundary),
        },
        gap_pmf,
    }
}

/// Probability of `secrecy_age <= limit` on the truncated support, for any
/// `limit` including zero.
pub fn oracle_outage_at(steady: &SteadyState, limit: u32) -> f64 {
    steady
        .entries()
        .filter(|(i, j, _)| j.saturating_sub(*i) <= limit)
        .map(|(_, _, p)| p)
        .sum::<f64>()
        .min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_tiny_truncation() {
        let c = ChannelParams::new(0.5, 0.5).unwrap();
        assert_eq!(
            TruncatedChain::build(c, Policy::ALWAYS, 1).unwrap_err(),
            OracleError::TruncationTooSmall(1)
        );
    }

    #[test]
    fn collapsed_chain_maps_everything_to_fresh() {
        let c = ChannelParams::new(1.0, 1.0).unwrap();
        let chain = TruncatedChain::build(c, Policy::ALWAYS, 2).unwrap();
        assert_eq!(chain.num_states(), 4);
        // All four states feed (1,1) and nothing else.
        assert_eq!(chain.in_offsets, vec![0, 4, 4, 4, 4]);
        assert_eq!(chain.palette, vec![1.0]);
        let ss = steady_state(&chain, 1e-14, 10).unwrap();
        assert_eq!(ss.pi(1, 1), 1.0);
        assert_eq!(ss.boundary_mass(), 0.0);
    }

    #[test]
    fn rows_are_stochastic() {
        let c = ChannelParams::new(0.3, 0.7).unwrap();
        let chain = TruncatedChain::build(c, Policy::new(0.6).unwrap(), 25).unwrap();
        assert!(chain.max_row_deviation() <= 1e-12);
        for s in chain.row_sums() {
            assert!((s - 1.0).abs() <= 1e-12);
        }
        assert!(chain.clamped_edges() > 0);
    }

    #[test]
    fn tail_bound_requests_are_enforced() {
        let c = ChannelParams::new(0.8, 0.2).unwrap();
        let tx = Policy::new(0.5).unwrap();
        assert!(matches!(
            TruncatedChain::build_with_tail_bound(c, tx, 20, 1e-8),
            Err(OracleError::TailBoundNotMet { truncation: 20, .. })
        ));
        let n = auto_truncation(c, tx, 1e-8, 1e-8, 2, 5000).unwrap();
        assert!(tail_bound(c, tx, n).mean_secrecy_age <= 1e-8);
        assert!(tail_bound(c, tx, n - 1).mean_secrecy_age > 1e-8);
        assert!(auto_truncation(c, tx, 1e-8, 1e-8, 2, 10).is_err());
        assert_eq!(auto_truncation(c, tx, 1.0, 1e6, 400, 5000), Ok(400));
    }

    #[test]
    fn non_convergence_is_reported() {
        let c = ChannelParams::new(0.1, 0.1).unwrap();
        let chain = TruncatedChain::build(c, Policy::new(0.2).unwrap(), 50).unwrap();
        match steady_state(&chain, 1e-14, 3) {
            Err(OracleError::NotConverged { iterations: 3, residual }) => assert!(residual > 1e-14),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(steady_state(&chain, 0.0, 3), Err(OracleError::BadTolerance(_))));
    }
}
