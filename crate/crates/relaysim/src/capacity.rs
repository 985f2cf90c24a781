//! SNR-to-capacity conversion and per-relay capacity ranking.
//!
//! Capacity follows the half-duplex AWGN form `0.5 * log2(1 + SNR)` in bits
//! per channel use, scaled to kbps by a configured bandwidth (1 kbps in the
//! reference scenarios). Ranking scores each relay as a one-relay combined
//! path — destination noise included — so the order reflects the real
//! end-to-end link rather than the noiseless per-path view.

use serde::Serialize;

use crate::channel::{combined_snr, DestinationNode, PathSnr, RelayNode, SourceSignal};
use crate::error::{Error, Result};

/// A channel capacity in bits per channel use and in kbps under the
/// configured bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapacityValue {
    pub bits_per_use: f64,
    pub kbps: f64,
}

impl CapacityValue {
    /// Marker for a relay whose individual SNR is unbounded; such relays
    /// sort ahead of every finite-capacity relay.
    pub(crate) fn unbounded() -> Self {
        Self { bits_per_use: f64::INFINITY, kbps: f64::INFINITY }
    }
}

/// `0.5 * log2(1 + snr)`, scaled to kbps by `bandwidth_kbps`.
pub fn capacity_from_snr(snr: PathSnr, bandwidth_kbps: f64) -> Result<CapacityValue> {
    if !(bandwidth_kbps > 0.0) || !bandwidth_kbps.is_finite() {
        return Err(Error::PreconditionViolated(format!(
            "bandwidth {bandwidth_kbps} kbps must be positive"
        )));
    }
    let bits_per_use = 0.5 * (1.0 + snr.value()).log2();
    Ok(CapacityValue { bits_per_use, kbps: bits_per_use * bandwidth_kbps })
}

/// Capacity of the combined path through a relay subset.
pub fn path_capacity(
    source: &SourceSignal,
    relays: &[RelayNode],
    dest: &DestinationNode,
    bandwidth_kbps: f64,
) -> Result<CapacityValue> {
    capacity_from_snr(combined_snr(source, relays, dest)?, bandwidth_kbps)
}

/// SNR of one relay treated as a complete single-relay path, destination
/// noise included. This is the quantity relays are ranked by.
pub fn individual_snr(
    source: &SourceSignal,
    relay: &RelayNode,
    dest: &DestinationNode,
) -> Result<PathSnr> {
    combined_snr(source, std::slice::from_ref(relay), dest)
}

/// Relay ids sorted by descending individual capacity, with the capacities
/// alongside.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedRelays {
    /// Relay ids, best first. Ties break toward the smaller id.
    pub order: Vec<u32>,
    /// Individual capacities parallel to `order` (non-increasing).
    pub capacities: Vec<CapacityValue>,
}

/// Rank a pool by descending individual capacity. Relays whose individual
/// SNR is unbounded sort first; ties break by ascending id so the order is
/// reproducible.
pub fn rank_relays(
    source: &SourceSignal,
    pool: &[RelayNode],
    dest: &DestinationNode,
    bandwidth_kbps: f64,
) -> Result<RankedRelays> {
    if pool.is_empty() {
        return Err(Error::EmptyPool);
    }
    let mut scored: Vec<(u32, f64, CapacityValue)> = Vec::with_capacity(pool.len());
    for relay in pool {
        let (snr, cap) = match individual_snr(source, relay, dest) {
            Ok(snr) => (snr.value(), capacity_from_snr(snr, bandwidth_kbps)?),
            Err(Error::InfiniteSnr) => (f64::INFINITY, CapacityValue::unbounded()),
            Err(other) => return Err(other),
        };
        scored.push((relay.id, snr, cap));
    }
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(RankedRelays {
        order: scored.iter().map(|s| s.0).collect(),
        capacities: scored.into_iter().map(|s| s.2).collect(),
    })
}
