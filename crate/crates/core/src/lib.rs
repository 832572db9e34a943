//! Age-of-information secrecy metrics for a source, a destination and a
//! passive eavesdropper sharing one slotted broadcast channel.
//!
//! The source generates a fresh status update every slot and transmits it
//! with a fixed probability. Each receiver's age resets to one when it
//! decodes a transmission and grows by one otherwise. The secrecy age is how
//! far the eavesdropper's age runs ahead of the destination's, and the
//! secrecy age outage probability is the stationary probability that this
//! lead does not exceed a target lag.
//!
//! The crate computes these quantities three independent ways:
//!
//! - [`analytics`]: closed-form stationary distribution, metrics and the
//!   optimal transmission probability;
//! - [`oracle`]: power iteration on a truncated copy of the two-dimensional
//!   age chain, built only from the one-slot transition law;
//! - [`sim`]: a seeded slot-level Monte Carlo engine with confidence
//!   intervals.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the command line
//! and multi-threaded execution live in the `aoi-secrecy-lab` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analytics;
mod error;
mod math;
pub mod model;
pub mod oracle;
pub mod report;
pub mod sim;

pub use analytics::{MeanAge, OutageConvention, StationaryQuery};
pub use error::{AnalyticsError, ModelError, OracleError, SimError};
pub use model::{AgeState, ChannelParams, Policy, SecrecyThreshold, SlotEvents, Successors};
pub use report::{Figure, Provenance, SecrecyReport, Uncertainty};
