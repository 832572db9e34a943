use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{name} must be a probability in [0, 1], got {value}")]
    ProbabilityOutOfRange { name: &'static str, value: f64 },
    #[error("transmission probability must lie in (0, 1], got {0}")]
    TransmitProbability(f64),
    #[error("ages start at 1, got ({delta_d}, {delta_e})")]
    ZeroAge { delta_d: u32, delta_e: u32 },
    #[error("secrecy threshold must be at least 1 slot")]
    ZeroThreshold,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticsError {
    #[error("p = q = 0: neither receiver ever decodes, the chain has no stationary law")]
    DegenerateChannel,
    #[error("stationary indices start at 1, got ({i}, {j})")]
    ZeroIndex { i: u64, j: u64 },
    #[error("secrecy gap must be at least 1, got {0}")]
    ZeroGap(u64),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("truncation must be at least 2, got {0}")]
    TruncationTooSmall(u32),
    #[error("truncation {truncation} leaves tail mass up to {bound:e}, above the requested {requested:e}")]
    TailBoundNotMet { truncation: u32, bound: f64, requested: f64 },
    #[error("no truncation up to {max} meets tail bound {requested:e}")]
    TruncationLimit { max: u32, requested: f64 },
    #[error("power iteration did not converge in {iterations} iterations (L1 residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("initial distribution has {got} entries, chain has {expected} states")]
    InitialLength { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("horizon must be at least 1 slot")]
    EmptyHorizon,
    #[error("burn-in ({burn_in}) must be shorter than the horizon ({horizon})")]
    BurnInTooLong { burn_in: u64, horizon: u64 },
    #[error("at least one replication is required")]
    NoReplications,
    #[error("{slots} slots per replication could overflow the 32-bit age counters")]
    AgeOverflow { slots: u64 },
    #[error("threshold {threshold} exceeds the tracked gap range (max {max_gap})")]
    ThresholdBeyondHistogram { threshold: u32, max_gap: u32 },
    #[error("no replications to combine")]
    NothingToCombine,
}
