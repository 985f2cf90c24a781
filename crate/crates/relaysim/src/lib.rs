//! Deterministic simulator and optimization library for cooperative two-hop
//! relay communication.
//!
//! The crate models a source vehicle reaching a destination vehicle through
//! a subset of amplify-and-forward relays. It computes per-path and
//! combined-path SNR and channel capacity, selects relay subsets under
//! several policies, allocates a shared power budget under per-relay
//! minimums, and runs seeded capacity-versus-relay-count sweeps over
//! generated populations.
//!
//! Everything is deterministic: the signal model adds noise variances as
//! constants rather than sampling, and all random structure (populations,
//! arbitrary selections) derives from explicit 64-bit seeds through
//! ChaCha8 substreams (see [`seeds`]).

pub mod capacity;
pub mod channel;
mod error;
pub mod orchestrate;
pub mod population;
pub mod seeds;
pub mod selection;
pub mod sweep;
pub mod tol;

pub use error::{Error, Result};
