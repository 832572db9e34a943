//! Closed-form stationary analysis of the age chain.
//!
//! Writing `r_d = 1 - p_tx p`, `r_e = 1 - p_tx q` and
//! `a = p_tx (1-p)(1-q) + 1 - p_tx` (the probability that neither age
//! resets), the stationary law of the age pair `(i, j)` is
//!
//! ```text
//! pi(1,1) = p_tx p q
//! pi(k,1) = p_tx p * p_tx (1-p) q * r_d^(k-2)      k >= 2
//! pi(1,k) = p_tx q * p_tx (1-q) p * r_e^(k-2)      k >= 2
//! pi(i,j) = pi(i-j+1, 1) a^(j-1)                    i > j
//! pi(i,j) = pi(1, j-i+1) a^(i-1)                    j > i
//! pi(i,i) = pi(1,1) a^(i-1)
//! ```
//!
//! Grouping the upper triangle by the gap `d = j - i` gives a geometric
//! secrecy-gap law with ratio `r_e`, from which the average secrecy age and
//! the outage probability follow.

use core::fmt;
use core::str::FromStr;

use crate::error::AnalyticsError;
use crate::math::pow_n;
use crate::model::{ChannelParams, Policy, SecrecyThreshold};

/// Which event the outage closed form describes.
///
/// The outage event is `secrecy_age <= eta_th`. Summing the gap law over
/// `d >= eta_th + 1` gives the exponent `eta_th` ([`StrictDefinition`]); the
/// expression commonly quoted for this system carries exponent `eta_th - 1`
/// ([`PaperPrinted`]), which is the probability of `secrecy_age <= eta_th - 1`.
///
/// [`StrictDefinition`]: OutageConvention::StrictDefinition
/// [`PaperPrinted`]: OutageConvention::PaperPrinted
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum OutageConvention {
    PaperPrinted,
    #[default]
    StrictDefinition,
}

impl OutageConvention {
    pub const ALL: [OutageConvention; 2] = [Self::PaperPrinted, Self::StrictDefinition];

    pub fn label(self) -> &'static str {
        match self {
            Self::PaperPrinted => "paper",
            Self::StrictDefinition => "strict",
        }
    }

    /// Exponent of `(1 - p_tx q)` in the outage closed form.
    fn tail_exponent(self, threshold: SecrecyThreshold) -> u64 {
        let eta = u64::from(threshold.get());
        match self {
            Self::PaperPrinted => eta - 1,
            Self::StrictDefinition => eta,
        }
    }

    /// Largest secrecy age counted as an outage under this convention.
    pub fn outage_gap_limit(self, threshold: SecrecyThreshold) -> u32 {
        self.tail_exponent(threshold) as u32
    }
}

impl fmt::Display for OutageConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownConvention;

impl fmt::Display for UnknownConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("expected `paper` or `strict`")
    }
}

impl FromStr for OutageConvention {
    type Err = UnknownConvention;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "paper" | "paper_printed" | "printed" => Ok(Self::PaperPrinted),
            "strict" | "strict_definition" | "definition" => Ok(Self::StrictDefinition),
            _ => Err(UnknownConvention),
        }
    }
}

/// Index pair `(i, j)` of a stationary probability: destination age `i`,
/// eavesdropper age `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StationaryQuery {
    i: u64,
    j: u64,
}

impl StationaryQuery {
    pub fn new(i: u64, j: u64) -> Result<Self, AnalyticsError> {
        if i == 0 || j == 0 {
            return Err(AnalyticsError::ZeroIndex { i, j });
        }
        Ok(Self { i, j })
    }

    pub fn i(&self) -> u64 {
        self.i
    }

    pub fn j(&self) -> u64 {
        self.j
    }
}

/// Average secrecy age. Infinite when the eavesdropper never decodes
/// (`q = 0`) while the destination does.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeanAge {
    Finite(f64),
    Infinite,
}

impl MeanAge {
    pub fn as_f64(self) -> f64 {
        match self {
            MeanAge::Finite(v) => v,
            MeanAge::Infinite => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, MeanAge::Finite(_))
    }
}

struct Rates {
    tx: f64,
    p: f64,
    q: f64,
    /// Neither age resets.
    diag: f64,
    /// Destination age does not reset.
    row: f64,
    /// Eavesdropper age does not reset.
    col: f64,
}

impl Rates {
    fn new(params: ChannelParams, policy: Policy) -> Self {
        let (p, q, tx) = (params.p(), params.q(), policy.p_tx());
        Rates {
            tx,
            p,
            q,
            diag: tx * (1.0 - q) * (1.0 - p) + 1.0 - tx,
            row: tx * (1.0 - p) + 1.0 - tx,
            col: tx * (1.0 - q) + 1.0 - tx,
        }
    }

    /// `pi(k, 1)` for `k >= 2`.
    fn first_column(&self, k: u64) -> f64 {
        self.tx * self.p * self.tx * (1.0 - self.p) * self.q * pow_n(self.row, k - 2)
    }

    /// `pi(1, k)` for `k >= 2`.
    fn first_row(&self, k: u64) -> f64 {
        self.tx * self.q * self.tx * (1.0 - self.q) * self.p * pow_n(self.col, k - 2)
    }
}

/// `p + q - pq`: probability that a transmission reaches at least one
/// receiver.
fn any_decode(params: ChannelParams) -> Result<f64, AnalyticsError> {
    let (p, q) = (params.p(), params.q());
    if p == 0.0 && q == 0.0 {
        return Err(AnalyticsError::DegenerateChannel);
    }
    Ok(p + q - p * q)
}

/// Closed-form stationary probability of the age pair `(i, j)`.
pub fn stationary_pi(query: StationaryQuery, params: ChannelParams, policy: Policy) -> f64 {
    let r = Rates::new(params, policy);
    let (i, j) = (query.i, query.j);
    if i == j {
        r.tx * r.p * r.q * pow_n(r.diag, i - 1)
    } else if i > j {
        r.first_column(i - j + 1) * pow_n(r.diag, j - 1)
    } else {
        r.first_row(j - i + 1) * pow_n(r.diag, i - 1)
    }
}

/// Stationary probability that the destination age equals `i`.
pub fn row_sum(i: u64, params: ChannelParams, policy: Policy) -> Result<f64, AnalyticsError> {
    if i == 0 {
        return Err(AnalyticsError::ZeroIndex { i, j: 1 });
    }
    let reset = policy.p_tx() * params.p();
    Ok(reset * pow_n(1.0 - reset, i - 1))
}

/// Stationary probability that the eavesdropper age equals `j`.
pub fn col_sum(j: u64, params: ChannelParams, policy: Policy) -> Result<f64, AnalyticsError> {
    if j == 0 {
        return Err(AnalyticsError::ZeroIndex { i: 1, j });
    }
    let reset = policy.p_tx() * params.q();
    Ok(reset * pow_n(1.0 - reset, j - 1))
}

/// Stationary probability that the eavesdropper's age exceeds the
/// destination's by exactly `d >= 1` slots.
pub fn secrecy_gap_pmf(d: u64, params: ChannelParams, policy: Policy) -> Result<f64, AnalyticsError> {
    if d == 0 {
        return Err(AnalyticsError::ZeroGap(d));
    }
    let denom = any_decode(params)?;
    let (p, q, tx) = (params.p(), params.q(), policy.p_tx());
    Ok(tx * q * p * (1.0 - q) * pow_n(1.0 - tx * q, d - 1) / denom)
}

/// Stationary probability of a positive secrecy age, `p(1-q)/(p+q-pq)`.
/// It does not depend on the transmission probability.
pub fn positive_gap_mass(params: ChannelParams) -> Result<f64, AnalyticsError> {
    let denom = any_decode(params)?;
    Ok(params.p() * (1.0 - params.q()) / denom)
}

/// Average secrecy age `p(1-q) / (p_tx q (p+q-pq))`.
pub fn average_secrecy_age(params: ChannelParams, policy: Policy) -> Result<MeanAge, AnalyticsError> {
    let denom = any_decode(params)?;
    let (p, q, tx) = (params.p(), params.q(), policy.p_tx());
    if q == 0.0 {
        return Ok(MeanAge::Infinite);
    }
    Ok(MeanAge::Finite(p * (1.0 - q) / (tx * q * denom)))
}

/// Secrecy age outage probability under the chosen convention.
pub fn outage_probability(
    params: ChannelParams,
    policy: Policy,
    threshold: SecrecyThreshold,
    convention: OutageConvention,
) -> Result<f64, AnalyticsError> {
    let tail = positive_gap_mass(params)?;
    let ratio = 1.0 - policy.p_tx() * params.q();
    Ok(1.0 - tail * pow_n(ratio, convention.tail_exponent(threshold)))
}

/// Throughput-weighted secrecy objective `p_tx (1 - P_out(p_tx))`.
pub fn objective(
    params: ChannelParams,
    policy: Policy,
    threshold: SecrecyThreshold,
    convention: OutageConvention,
) -> Result<f64, AnalyticsError> {
    let outage = outage_probability(params, policy, threshold, convention)?;
    Ok(policy.p_tx() * (1.0 - outage))
}

/// Transmission probability maximizing [`objective`].
///
/// The objective is proportional to `x (1 - x q)^k` with `k` the convention's
/// tail exponent, maximized at `x = 1/(q (k + 1))` and clamped to 1. The
/// optimum does not depend on `p`. With `q = 0` the objective is increasing
/// and the optimum is 1.
pub fn optimal_ptx(
    q: f64,
    threshold: SecrecyThreshold,
    convention: OutageConvention,
) -> Result<f64, AnalyticsError> {
    // Validates q.
    ChannelParams::new(0.0, q)?;
    if q == 0.0 {
        return Ok(1.0);
    }
    let k = convention.tail_exponent(threshold) as f64;
    Ok((1.0 / (q * (k + 1.0))).min(1.0))
}
