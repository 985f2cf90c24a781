use thiserror::Error;

/// Errors produced by the relay model, selection, and simulation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A signal vector is empty or its cached squared norm disagrees with its
    /// contents.
    #[error("invalid signal: {0}")]
    InvalidSignal(String),

    /// An operation over a relay subset was given an empty subset.
    #[error("relay selection is empty")]
    EmptySelection,

    /// All noise terms of an SNR denominator are zero, so the ratio is
    /// unbounded. Signalled as a distinct outcome instead of returning a
    /// sentinel value.
    #[error("SNR is unbounded: every noise term in the denominator is zero")]
    InfiniteSnr,

    /// A stated precondition of the operation does not hold for the inputs.
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    /// An SNR value outside [0, +inf) was supplied.
    #[error("invalid SNR value: {0}")]
    InvalidSnr(f64),

    /// A ranking or selection was asked for from an empty pool.
    #[error("relay pool is empty")]
    EmptyPool,

    /// More relays were requested than the pool contains.
    #[error("requested {requested} relays but the pool has {available}")]
    InsufficientRelays { requested: usize, available: usize },

    /// No power assignment can satisfy the minimum-power constraints within
    /// the total budget.
    #[error("infeasible power budget: {0}")]
    InfeasibleBudget(String),

    /// A configuration value violates a type invariant. The message names the
    /// offending field.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
