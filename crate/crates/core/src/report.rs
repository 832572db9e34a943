//! Method-independent summary of the secrecy metrics at one operating point.

use alloc::vec::Vec;

use crate::analytics::{self, OutageConvention};
use crate::error::AnalyticsError;
use crate::model::{ChannelParams, Policy, SecrecyThreshold};

/// How a report was produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Provenance {
    ClosedForm,
    /// Power iteration on the chain truncated at `truncation`.
    Oracle { truncation: u32, iterations: usize },
    MonteCarlo { replications: u32, slots: u64 },
}

impl Provenance {
    pub fn label(&self) -> &'static str {
        match self {
            Provenance::ClosedForm => "closed_form",
            Provenance::Oracle { .. } => "oracle",
            Provenance::MonteCarlo { .. } => "monte_carlo",
        }
    }
}

/// Error attached to a reported number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Uncertainty {
    Exact,
    /// Bound on `|reported - true|` due to truncation.
    TruncationBound(f64),
    /// Half-width of a 95% confidence interval.
    ConfidenceHalfWidth(f64),
    /// A confidence interval needs at least two replications.
    Unavailable,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Figure {
    pub value: f64,
    pub uncertainty: Uncertainty,
}

impl Figure {
    pub fn exact(value: f64) -> Self {
        Figure {
            value,
            uncertainty: Uncertainty::Exact,
        }
    }

    /// Numeric error bar, if any. Zero for exact values.
    pub fn error_bar(&self) -> Option<f64> {
        match self.uncertainty {
            Uncertainty::Exact => Some(0.0),
            Uncertainty::TruncationBound(b) | Uncertainty::ConfidenceHalfWidth(b) => Some(b),
            Uncertainty::Unavailable => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SecrecyReport {
    pub provenance: Provenance,
    pub threshold: SecrecyThreshold,
    /// Convention of `outage_probability`. Oracle and Monte Carlo reports
    /// always measure the event `secrecy_age <= threshold`.
    pub convention: OutageConvention,
    pub average_secrecy_age: Figure,
    pub outage_probability: Figure,
    /// `gap_pmf[d - 1]` is the probability that the secrecy gap equals `d`.
    pub gap_pmf: Vec<f64>,
}

impl SecrecyReport {
    /// Closed-form report with the gap law listed up to `max_gap`.
    pub fn closed_form(
        params: ChannelParams,
        policy: Policy,
        threshold: SecrecyThreshold,
        convention: OutageConvention,
        max_gap: u32,
    ) -> Result<Self, AnalyticsError> {
        let mean = analytics::average_secrecy_age(params, policy)?;
        let outage = analytics::outage_probability(params, policy, threshold, convention)?;
        let gap_pmf = (1..=u64::from(max_gap))
            .map(|d| analytics::secrecy_gap_pmf(d, params, policy))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SecrecyReport {
            provenance: Provenance::ClosedForm,
            threshold,
            convention,
            average_secrecy_age: Figure::exact(mean.as_f64()),
            outage_probability: Figure::exact(outage),
            gap_pmf,
        })
    }
}
