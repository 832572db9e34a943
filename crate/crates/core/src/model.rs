//! Domain types and the one-slot transition law of the age pair.
//!
//! In every slot the source transmits with probability `p_tx`. A transmission
//! reaches the destination with probability `p` and the eavesdropper with
//! probability `q`, independently of each other. A receiver that decodes the
//! update has age 1 in the next slot; any other receiver ages by one.

use core::fmt;

use rand::Rng;

use crate::error::ModelError;

/// Per-slot success probabilities of the source→destination (`p`) and
/// source→eavesdropper (`q`) links.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    p: f64,
    q: f64,
}

fn check_probability(name: &'static str, value: f64) -> Result<f64, ModelError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(ModelError::ProbabilityOutOfRange { name, value })
    }
}

impl ChannelParams {
    pub fn new(p: f64, q: f64) -> Result<Self, ModelError> {
        Ok(Self {
            p: check_probability("p", p)?,
            q: check_probability("q", q)?,
        })
    }

    /// Destination success probability.
    pub fn p(&self) -> f64 {
        self.p
    }

    /// Eavesdropper success probability.
    pub fn q(&self) -> f64 {
        self.q
    }
}

/// Randomized stationary policy: transmit a fresh update with probability
/// `p_tx` in every slot, independently of everything else.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Policy {
    p_tx: f64,
}

impl Policy {
    /// Transmit in every slot.
    pub const ALWAYS: Policy = Policy { p_tx: 1.0 };

    pub fn new(p_tx: f64) -> Result<Self, ModelError> {
        if p_tx > 0.0 && p_tx <= 1.0 {
            Ok(Self { p_tx })
        } else {
            Err(ModelError::TransmitProbability(p_tx))
        }
    }

    pub fn p_tx(&self) -> f64 {
        self.p_tx
    }
}

/// Target information lag between eavesdropper and destination, in slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SecrecyThreshold(u32);

impl SecrecyThreshold {
    pub fn new(eta_th: u32) -> Result<Self, ModelError> {
        if eta_th == 0 {
            Err(ModelError::ZeroThreshold)
        } else {
            Ok(Self(eta_th))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl fmt::Display for SecrecyThreshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Instantaneous ages at the destination and the eavesdropper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AgeState {
    delta_d: u32,
    delta_e: u32,
}

impl AgeState {
    /// Both receivers hold the newest update.
    pub const FRESH: AgeState = AgeState {
        delta_d: 1,
        delta_e: 1,
    };

    pub fn new(delta_d: u32, delta_e: u32) -> Result<Self, ModelError> {
        if delta_d == 0 || delta_e == 0 {
            return Err(ModelError::ZeroAge { delta_d, delta_e });
        }
        Ok(Self { delta_d, delta_e })
    }

    pub fn delta_d(&self) -> u32 {
        self.delta_d
    }

    pub fn delta_e(&self) -> u32 {
        self.delta_e
    }

    /// `max(delta_e - delta_d, 0)`.
    pub fn secrecy_age(&self) -> u32 {
        self.delta_e.saturating_sub(self.delta_d)
    }

    /// Applies one slot's outcome.
    ///
    /// # Panics
    ///
    /// Panics if an age that does not reset would exceed `u32::MAX`.
    pub fn advance(self, events: SlotEvents) -> AgeState {
        self.checked_advance(events).expect("age counter overflow")
    }

    /// Like [`advance`](Self::advance), returning `None` on age overflow.
    pub fn checked_advance(self, events: SlotEvents) -> Option<AgeState> {
        let step = |age: u32, reset: bool| if reset { Some(1) } else { age.checked_add(1) };
        Some(AgeState {
            delta_d: step(self.delta_d, events.reaches_destination())?,
            delta_e: step(self.delta_e, events.reaches_eavesdropper())?,
        })
    }
}

impl fmt::Display for AgeState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.delta_d, self.delta_e)
    }
}

/// Free-function form of [`AgeState::secrecy_age`].
pub fn secrecy_age(state: AgeState) -> u32 {
    state.secrecy_age()
}

/// The random draws of one slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SlotEvents {
    pub transmitted: bool,
    pub destination_decoded: bool,
    pub eavesdropper_decoded: bool,
}

impl SlotEvents {
    pub fn reaches_destination(&self) -> bool {
        self.transmitted && self.destination_decoded
    }

    pub fn reaches_eavesdropper(&self) -> bool {
        self.transmitted && self.eavesdropper_decoded
    }

    /// Draws the transmit decision and, when the source transmits, the two
    /// independent reception indicators.
    pub fn draw<R: Rng + ?Sized>(rng: &mut R, params: ChannelParams, policy: Policy) -> Self {
        let transmitted = rng.gen::<f64>() < policy.p_tx;
        if !transmitted {
            return SlotEvents::default();
        }
        SlotEvents {
            transmitted,
            destination_decoded: rng.gen::<f64>() < params.p,
            eavesdropper_decoded: rng.gen::<f64>() < params.q,
        }
    }
}

/// Successor states of one age pair with their probabilities. Holds at most
/// four entries; zero-probability successors are dropped.
#[derive(Debug, Clone, Copy)]
pub struct Successors {
    entries: [(AgeState, f64); 4],
    len: usize,
}

impl Successors {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn as_slice(&self) -> &[(AgeState, f64)] {
        &self.entries[..self.len]
    }

    pub fn iter(&self) -> core::slice::Iter<'_, (AgeState, f64)> {
        self.as_slice().iter()
    }

    /// Probability of moving to `target` (zero when it is not a successor).
    pub fn probability_of(&self, target: AgeState) -> f64 {
        self.iter()
            .filter(|(s, _)| *s == target)
            .map(|(_, p)| *p)
            .sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.iter().map(|(_, p)| *p).sum()
    }
}

impl<'a> IntoIterator for &'a Successors {
    type Item = &'a (AgeState, f64);
    type IntoIter = core::slice::Iter<'a, (AgeState, f64)>;

    fn into_iter(self) -> Self::IntoIter {
        self.iter()
    }
}

/// Exact one-slot transition law from `state`.
///
/// From `(i, j)` the chain moves to `(1, 1)`, `(i+1, 1)`, `(1, j+1)` or
/// `(i+1, j+1)`. These four states are always distinct, so the only merging
/// needed is dropping outcomes of probability zero.
///
/// # Panics
///
/// Panics if an age of `u32::MAX` would have to grow.
pub fn transition_distribution(
    state: AgeState,
    params: ChannelParams,
    policy: Policy,
) -> Successors {
    let (p, q, tx) = (params.p, params.q, policy.p_tx);
    let next_d = state.delta_d.checked_add(1).expect("age counter overflow");
    let next_e = state.delta_e.checked_add(1).expect("age counter overflow");
    let candidates = [
        (AgeState::FRESH, tx * p * q),
        (AgeState { delta_d: next_d, delta_e: 1 }, tx * (1.0 - p) * q),
        (AgeState { delta_d: 1, delta_e: next_e }, tx * p * (1.0 - q)),
        (
            AgeState { delta_d: next_d, delta_e: next_e },
            tx * (1.0 - p) * (1.0 - q) + (1.0 - tx),
        ),
    ];
    let mut out = Successors {
        entries: [(AgeState::FRESH, 0.0); 4],
        len: 0,
    };
    for (s, prob) in candidates {
        if prob > 0.0 {
            out.entries[out.len] = (s, prob);
            out.len += 1;
        }
    }
    out
}

/// Draws the next state by simulating the slot's transmit and reception
/// events.
pub fn sample_slot<R: Rng + ?Sized>(
    state: AgeState,
    params: ChannelParams,
    policy: Policy,
    rng: &mut R,
) -> AgeState {
    state.advance(SlotEvents::draw(rng, params, policy))
}
