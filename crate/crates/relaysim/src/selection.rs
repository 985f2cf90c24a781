//! Relay subset selection and budget-constrained power allocation.
//!
//! Three selection policies form a ladder:
//!
//! * [`select_uniform`] — a seeded arbitrary subset, total power split
//!   evenly;
//! * [`select_topk`] — the top-L relays by individual capacity, power split
//!   evenly;
//! * [`select_optimized`] — the top-L relays with per-relay powers tuned by
//!   [`allocate_power`] under per-relay minimums and an exact total budget.
//!
//! The allocator is a greedy quantized ascent: starting from the uniform
//! split (clipped up to the minimums when they bind), it repeatedly moves
//! quanta of power from the relay whose marginal capacity loss is smallest
//! to the relay whose marginal gain is largest, and certifies convergence
//! with a full transfer scan before stopping. The uniform start is itself a
//! candidate, so the optimized capacity never falls below the uniform one.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::capacity::{
    capacity_from_snr, individual_snr, path_capacity, rank_relays, CapacityValue,
};
use crate::channel::{DestinationNode, PathSnr, RelayNode, SourceSignal};
use crate::error::{Error, Result};
use crate::seeds;
use crate::tol;

/// How the powers of a selection were assigned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionScheme {
    /// Arbitrary subset, equal share of the budget per relay.
    UniformArbitrary,
    /// Ranked subset (best individual capacity first), equal share.
    UniformRanked,
    /// Ranked subset with optimized per-relay powers.
    Optimized,
}

/// An ordered relay subset with per-relay allocated powers summing to the
/// total budget.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelaySelection {
    /// Relay ids in selection order (ranked order for the ranked schemes).
    pub relay_ids: Vec<u32>,
    /// Allocated watts, parallel to `relay_ids`.
    pub powers: Vec<f64>,
    /// Total budget shared by the subset.
    pub total_power: f64,
    pub scheme: SelectionScheme,
}

impl RelaySelection {
    pub fn len(&self) -> usize {
        self.relay_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relay_ids.is_empty()
    }

    /// Check the structural invariants against the pool the selection was
    /// drawn from: distinct ids, budget conservation, and per-relay
    /// minimums.
    pub fn validate(&self, pool: &[RelayNode]) -> Result<()> {
        if self.relay_ids.len() != self.powers.len() {
            return Err(Error::InvalidConfig("ids and powers lengths differ".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for &id in &self.relay_ids {
            if !seen.insert(id) {
                return Err(Error::InvalidConfig(format!("relay id {id} selected twice")));
            }
        }
        let sum: f64 = self.powers.iter().sum();
        if !tol::eq(sum, self.total_power) {
            return Err(Error::InvalidConfig(format!(
                "allocated powers sum to {sum}, budget is {}",
                self.total_power
            )));
        }
        for (&id, &p) in self.relay_ids.iter().zip(&self.powers) {
            let relay = find_relay(pool, id)?;
            if p < relay.min_power - tol::ABS {
                return Err(Error::InvalidConfig(format!(
                    "relay {id} allocated {p} W below its minimum {}",
                    relay.min_power
                )));
            }
        }
        Ok(())
    }
}

/// Step size and iteration bound for the greedy power ascent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AllocationConfig {
    /// Transfer granularity in watts.
    pub quantum: f64,
    /// Maximum number of applied transfers.
    pub max_iters: usize,
}

impl AllocationConfig {
    pub fn new(quantum: f64, max_iters: usize) -> Result<Self> {
        if !(quantum > 0.0) || !quantum.is_finite() {
            return Err(Error::InvalidConfig(format!("quantum {quantum} must be positive")));
        }
        if max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        Ok(Self { quantum, max_iters })
    }

    /// Default granularity for a budget: one thousandth of the total power,
    /// with a generous transfer bound.
    pub fn for_budget(total_power: f64) -> Self {
        Self { quantum: total_power / 1000.0, max_iters: 1_000_000 }
    }
}

/// Result of a power-allocation run.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAllocation {
    pub selection: RelaySelection,
    /// Combined-path capacity of the returned allocation.
    pub capacity: CapacityValue,
    /// Whether the individual capacities of the selected relays, evaluated
    /// at the allocated powers, are still non-increasing along the selection
    /// order. Reported as a diagnostic, never enforced.
    pub capacity_ordering_held: bool,
}

/// Capacity chain comparison across the three selection policies.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub c_b3_kbps: f64,
    pub c_b2_kbps: f64,
    pub c_b1_mean_kbps: f64,
    /// `c_b3 >= c_b2` and `c_b2 >= c_b1_mean`, within tolerance.
    pub chain_holds: bool,
}

fn find_relay(pool: &[RelayNode], id: u32) -> Result<&RelayNode> {
    pool.iter()
        .find(|r| r.id == id)
        .ok_or_else(|| Error::PreconditionViolated(format!("relay id {id} not in pool")))
}

fn check_subset_request(pool: &[RelayNode], l: usize, total_power: f64) -> Result<()> {
    if l == 0 {
        return Err(Error::PreconditionViolated("subset size must be at least 1".into()));
    }
    if l > pool.len() {
        return Err(Error::InsufficientRelays { requested: l, available: pool.len() });
    }
    if !(total_power > 0.0) || !total_power.is_finite() {
        return Err(Error::PreconditionViolated(format!(
            "total power {total_power} W must be positive"
        )));
    }
    Ok(())
}

/// Evaluate the combined-path capacity of a selection, using the allocated
/// powers instead of the relays' own power fields.
pub fn selection_capacity(
    source: &SourceSignal,
    pool: &[RelayNode],
    selection: &RelaySelection,
    dest: &DestinationNode,
    bandwidth_kbps: f64,
) -> Result<CapacityValue> {
    let relays = resolve_with_powers(pool, selection)?;
    path_capacity(source, &relays, dest, bandwidth_kbps)
}

fn resolve_with_powers(pool: &[RelayNode], selection: &RelaySelection) -> Result<Vec<RelayNode>> {
    selection
        .relay_ids
        .iter()
        .zip(&selection.powers)
        .map(|(&id, &p)| {
            let mut relay = find_relay(pool, id)?.clone();
            relay.power = p;
            Ok(relay)
        })
        .collect()
}

/// Draw a seeded arbitrary subset of `l` relays and split the budget evenly.
///
/// A draw is feasible when the even share covers every chosen relay's
/// minimum power; infeasible draws are retried up to 100 times before
/// giving up with [`Error::InfeasibleBudget`].
pub fn select_uniform(
    pool: &[RelayNode],
    l: usize,
    total_power: f64,
    rng_seed: u64,
) -> Result<RelaySelection> {
    check_subset_request(pool, l, total_power)?;
    let share = total_power / l as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    const MAX_DRAWS: usize = 100;
    for _ in 0..MAX_DRAWS {
        let picks = rand::seq::index::sample(&mut rng, pool.len(), l);
        if picks.iter().all(|i| pool[i].min_power <= share + tol::ABS) {
            return Ok(RelaySelection {
                relay_ids: picks.iter().map(|i| pool[i].id).collect(),
                powers: vec![share; l],
                total_power,
                scheme: SelectionScheme::UniformArbitrary,
            });
        }
    }
    Err(Error::InfeasibleBudget(format!(
        "no subset of {l} relays fits the per-relay share {share} W after {MAX_DRAWS} draws"
    )))
}

/// Select the top `l` relays by individual capacity and split the budget
/// evenly. The selection order is the ranked order.
pub fn select_topk(
    source: &SourceSignal,
    pool: &[RelayNode],
    dest: &DestinationNode,
    l: usize,
    total_power: f64,
    bandwidth_kbps: f64,
) -> Result<RelaySelection> {
    check_subset_request(pool, l, total_power)?;
    let ranked = rank_relays(source, pool, dest, bandwidth_kbps)?;
    let chosen: Vec<u32> = ranked.order[..l].to_vec();
    let share = total_power / l as f64;
    for &id in &chosen {
        let relay = find_relay(pool, id)?;
        if relay.min_power > share + tol::ABS {
            return Err(Error::InfeasibleBudget(format!(
                "relay {id} needs at least {} W but the even share is {share} W",
                relay.min_power
            )));
        }
    }
    Ok(RelaySelection {
        relay_ids: chosen,
        powers: vec![share; l],
        total_power,
        scheme: SelectionScheme::UniformRanked,
    })
}

/// Uniform split clipped up to the minimum powers: relays whose minimum
/// exceeds the even share are pinned to their minimum and the remainder is
/// shared evenly among the rest. Equals the plain uniform split whenever no
/// minimum binds.
fn clipped_uniform(mins: &[f64], total_power: f64) -> Vec<f64> {
    let l = mins.len();
    let mut clamped = vec![false; l];
    loop {
        let reserved: f64 =
            mins.iter().zip(&clamped).filter(|(_, &c)| c).map(|(&m, _)| m).sum();
        let active = clamped.iter().filter(|&&c| !c).count();
        if active == 0 {
            return mins.to_vec();
        }
        let share = (total_power - reserved) / active as f64;
        let mut changed = false;
        for (i, &m) in mins.iter().enumerate() {
            if !clamped[i] && m > share + tol::ABS {
                clamped[i] = true;
                changed = true;
            }
        }
        if !changed {
            return mins
                .iter()
                .zip(&clamped)
                .map(|(&m, &c)| if c { m } else { share })
                .collect();
        }
    }
}

/// Incremental SNR bookkeeping for the greedy ascent. The combined SNR of
/// an allocation `q` is `(sum_w a_w sqrt(q_w))^2 * y_sq` over
/// `(sum_w b_w sqrt(q_w))^2 + dest_amp^2`, so a candidate transfer only
/// needs the two amplitude sums updated at the donor and recipient.
struct SnrTracker {
    coef_signal: Vec<f64>,
    coef_noise: Vec<f64>,
    dest_amp: f64,
    y_sq: f64,
    sum_signal: f64,
    sum_noise: f64,
}

impl SnrTracker {
    fn new(source: &SourceSignal, relays: &[RelayNode], dest: &DestinationNode) -> Self {
        let src_amp = source.power().sqrt();
        let coef_signal: Vec<f64> =
            relays.iter().map(|r| r.h_dst * src_amp * r.h_src).collect();
        let coef_noise: Vec<f64> = relays.iter().map(|r| r.h_dst * r.noise_var).collect();
        Self {
            coef_signal,
            coef_noise,
            dest_amp: relays.len() as f64 * dest.noise_var,
            y_sq: source.y_sq(),
            sum_signal: 0.0,
            sum_noise: 0.0,
        }
    }

    fn rebuild(&mut self, powers: &[f64]) {
        self.sum_signal = 0.0;
        self.sum_noise = 0.0;
        for (i, &q) in powers.iter().enumerate() {
            let x = q.sqrt();
            self.sum_signal += self.coef_signal[i] * x;
            self.sum_noise += self.coef_noise[i] * x;
        }
    }

    fn snr_of(&self, sum_signal: f64, sum_noise: f64) -> f64 {
        let denom = sum_noise * sum_noise + self.dest_amp * self.dest_amp;
        sum_signal * sum_signal * self.y_sq / denom
    }

    fn current(&self) -> f64 {
        self.snr_of(self.sum_signal, self.sum_noise)
    }

    /// SNR after replacing `q_i` by `q_i_new` (budget checks are the
    /// caller's business).
    fn after_change(&self, powers: &[f64], i: usize, q_i_new: f64) -> (f64, f64) {
        let dx = q_i_new.sqrt() - powers[i].sqrt();
        (self.sum_signal + self.coef_signal[i] * dx, self.sum_noise + self.coef_noise[i] * dx)
    }

    /// SNR after a transfer: donor `d` drops to `q_d_new`, recipient `r`
    /// rises to `q_r_new`.
    fn after_transfer(
        &self,
        powers: &[f64],
        d: usize,
        q_d_new: f64,
        r: usize,
        q_r_new: f64,
    ) -> f64 {
        let dxd = q_d_new.sqrt() - powers[d].sqrt();
        let dxr = q_r_new.sqrt() - powers[r].sqrt();
        let s = self.sum_signal + self.coef_signal[d] * dxd + self.coef_signal[r] * dxr;
        let n = self.sum_noise + self.coef_noise[d] * dxd + self.coef_noise[r] * dxr;
        self.snr_of(s, n)
    }

    fn apply_transfer(&mut self, powers: &mut [f64], d: usize, amount: f64, r: usize) {
        let q_d_new = powers[d] - amount;
        let q_r_new = powers[r] + amount;
        let dxd = q_d_new.sqrt() - powers[d].sqrt();
        let dxr = q_r_new.sqrt() - powers[r].sqrt();
        self.sum_signal += self.coef_signal[d] * dxd + self.coef_signal[r] * dxr;
        self.sum_noise += self.coef_noise[d] * dxd + self.coef_noise[r] * dxr;
        powers[d] = q_d_new;
        powers[r] = q_r_new;
    }
}

/// Candidate transfer sizes from a donor with `slack` watts above its
/// minimum: doubling multiples of the quantum, plus the full slack.
fn transfer_amounts(slack: f64, quantum: f64, out: &mut Vec<f64>) {
    out.clear();
    let kmax = ((slack / quantum) + 1e-9).floor() as u64;
    if kmax == 0 {
        return;
    }
    let mut k = 1u64;
    while k <= kmax {
        out.push(k as f64 * quantum);
        k *= 2;
    }
    let full = kmax as f64 * quantum;
    if *out.last().unwrap() < full {
        out.push(full);
    }
}

// Minimum relative improvement for a transfer to be accepted; guards the
// ascent against cycling on floating-point noise.
const IMPROVE_REL: f64 = 1e-12;

/// Tune the per-relay powers of a selection to maximize the combined-path
/// capacity, holding the selection and its order fixed.
///
/// Constraints: every relay keeps at least its minimum power and the powers
/// sum to the selection's total budget. The search starts from the uniform
/// split (clipped up to binding minimums) and ascends by quantized
/// transfers, so the returned capacity never falls below the feasible
/// uniform split's capacity.
pub fn allocate_power(
    source: &SourceSignal,
    pool: &[RelayNode],
    selection: &RelaySelection,
    dest: &DestinationNode,
    config: &AllocationConfig,
    bandwidth_kbps: f64,
) -> Result<PowerAllocation> {
    let relays = resolve_with_powers(pool, selection)?;
    let l = relays.len();
    if l == 0 {
        return Err(Error::EmptySelection);
    }
    let total_power = selection.total_power;
    let mins: Vec<f64> = relays.iter().map(|r| r.min_power).collect();
    let min_sum: f64 = mins.iter().sum();
    if min_sum > total_power + tol::ABS.max(tol::REL * total_power) {
        return Err(Error::InfeasibleBudget(format!(
            "minimum powers sum to {min_sum} W, budget is {total_power} W"
        )));
    }

    let mut powers = clipped_uniform(&mins, total_power);
    let mut tracker = SnrTracker::new(source, &relays, dest);
    tracker.rebuild(&powers);
    if relays.iter().all(|r| r.h_dst * r.noise_var == 0.0) && dest.noise_var == 0.0 {
        return Err(Error::InfiniteSnr);
    }

    let mut current = tracker.current();
    let mut amounts = Vec::new();
    let mut applied = 0usize;
    while applied < config.max_iters {
        let mut best_snr = current * (1.0 + IMPROVE_REL);
        let mut best_move: Option<(usize, f64, usize)> = None;

        // Cheap heuristic first: the donor losing least and the recipient
        // gaining most from a single quantum, probed at doubling sizes.
        let mut donor: Option<(usize, f64)> = None;
        let mut recipient: Option<(usize, f64)> = None;
        for i in 0..l {
            if powers[i] - mins[i] >= config.quantum - tol::ABS {
                let (s, n) = tracker.after_change(&powers, i, powers[i] - config.quantum);
                let snr = tracker.snr_of(s, n);
                if donor.map_or(true, |(_, v)| snr > v) {
                    donor = Some((i, snr));
                }
            }
            let (s, n) = tracker.after_change(&powers, i, powers[i] + config.quantum);
            let snr = tracker.snr_of(s, n);
            if recipient.map_or(true, |(_, v)| snr > v) {
                recipient = Some((i, snr));
            }
        }
        if let (Some((d, _)), Some((r, _))) = (donor, recipient) {
            if d != r {
                let slack = powers[d] - mins[d];
                transfer_amounts(slack, config.quantum, &mut amounts);
                for &amount in &amounts {
                    let snr = tracker.after_transfer(
                        &powers,
                        d,
                        powers[d] - amount,
                        r,
                        powers[r] + amount,
                    );
                    if snr > best_snr {
                        best_snr = snr;
                        best_move = Some((d, amount, r));
                    }
                }
            }
        }

        // Certificate scan: every (donor, recipient) pair at doubling sizes.
        // Convergence is declared only when this finds nothing.
        if best_move.is_none() {
            for d in 0..l {
                let slack = powers[d] - mins[d];
                transfer_amounts(slack, config.quantum, &mut amounts);
                if amounts.is_empty() {
                    continue;
                }
                for &amount in &amounts {
                    let q_d_new = powers[d] - amount;
                    for r in 0..l {
                        if r == d {
                            continue;
                        }
                        let snr =
                            tracker.after_transfer(&powers, d, q_d_new, r, powers[r] + amount);
                        if snr > best_snr {
                            best_snr = snr;
                            best_move = Some((d, amount, r));
                        }
                    }
                }
            }
        }

        match best_move {
            Some((d, amount, r)) => {
                tracker.apply_transfer(&mut powers, d, amount, r);
                applied += 1;
                if applied % 128 == 0 {
                    tracker.rebuild(&powers);
                }
                current = tracker.current();
            }
            None => break,
        }
    }

    let result = RelaySelection {
        relay_ids: selection.relay_ids.clone(),
        powers,
        total_power,
        scheme: SelectionScheme::Optimized,
    };
    // Report the capacity through the same evaluation path every other
    // scheme uses, not through the incremental tracker.
    let capacity = selection_capacity(source, pool, &result, dest, bandwidth_kbps)?;
    let capacity_ordering_held = ordering_held(source, pool, &result, dest)?;
    Ok(PowerAllocation { selection: result, capacity, capacity_ordering_held })
}

/// Whether the selected relays' individual capacities, at the allocated
/// powers, are non-increasing along the selection order.
fn ordering_held(
    source: &SourceSignal,
    pool: &[RelayNode],
    selection: &RelaySelection,
    dest: &DestinationNode,
) -> Result<bool> {
    let relays = resolve_with_powers(pool, selection)?;
    let mut prev = f64::INFINITY;
    for relay in &relays {
        let snr = if relay.power == 0.0 {
            0.0
        } else {
            match individual_snr(source, relay, dest) {
                Ok(snr) => snr.value(),
                Err(Error::InfiniteSnr) => f64::INFINITY,
                Err(other) => return Err(other),
            }
        };
        if !tol::geq(prev, snr) {
            return Ok(false);
        }
        prev = snr;
    }
    Ok(true)
}

/// Top-L selection followed by power optimization.
pub fn select_optimized(
    source: &SourceSignal,
    pool: &[RelayNode],
    dest: &DestinationNode,
    l: usize,
    total_power: f64,
    config: &AllocationConfig,
    bandwidth_kbps: f64,
) -> Result<PowerAllocation> {
    let ranked = select_topk(source, pool, dest, l, total_power, bandwidth_kbps)?;
    allocate_power(source, pool, &ranked, dest, config, bandwidth_kbps)
}

/// Run the three policies on one instance and compare their capacities.
/// The arbitrary-selection capacity is averaged over `b1_trials` seeded
/// draws derived from `rng_seed`.
#[allow(clippy::too_many_arguments)]
pub fn verify_capacity_chain(
    source: &SourceSignal,
    pool: &[RelayNode],
    dest: &DestinationNode,
    l: usize,
    total_power: f64,
    config: &AllocationConfig,
    bandwidth_kbps: f64,
    b1_trials: usize,
    rng_seed: u64,
) -> Result<ChainReport> {
    if b1_trials == 0 {
        return Err(Error::PreconditionViolated("b1_trials must be at least 1".into()));
    }
    let b2 = select_topk(source, pool, dest, l, total_power, bandwidth_kbps)?;
    let c_b2 = selection_capacity(source, pool, &b2, dest, bandwidth_kbps)?.kbps;
    let b3 = allocate_power(source, pool, &b2, dest, config, bandwidth_kbps)?;
    let c_b3 = b3.capacity.kbps;

    let mut b1_sum = 0.0;
    for trial in 0..b1_trials {
        let seed = seeds::derive_seed(rng_seed, &[seeds::STREAM_UNIFORM_DRAW, trial as u64]);
        let b1 = select_uniform(pool, l, total_power, seed)?;
        b1_sum += selection_capacity(source, pool, &b1, dest, bandwidth_kbps)?.kbps;
    }
    let c_b1_mean = b1_sum / b1_trials as f64;

    Ok(ChainReport {
        c_b3_kbps: c_b3,
        c_b2_kbps: c_b2,
        c_b1_mean_kbps: c_b1_mean,
        chain_holds: tol::geq(c_b3, c_b2) && tol::geq(c_b2, c_b1_mean),
    })
}

/// Exhaustive search over all quantum-aligned feasible splits of the budget
/// across the selection. Test oracle for the greedy ascent; practical only
/// for very small selections.
pub fn grid_search_allocation(
    source: &SourceSignal,
    pool: &[RelayNode],
    selection: &RelaySelection,
    dest: &DestinationNode,
    quantum: f64,
    bandwidth_kbps: f64,
) -> Result<(Vec<f64>, CapacityValue)> {
    let relays = resolve_with_powers(pool, selection)?;
    let l = relays.len();
    if l == 0 {
        return Err(Error::EmptySelection);
    }
    let total_q = (selection.total_power / quantum).round() as i64;
    let min_q: Vec<i64> = relays.iter().map(|r| (r.min_power / quantum).round() as i64).collect();
    let free = total_q - min_q.iter().sum::<i64>();
    if free < 0 {
        return Err(Error::InfeasibleBudget("minimum powers exceed the budget".into()));
    }

    let mut best_snr = -1.0;
    let mut best: Vec<f64> = Vec::new();
    let mut counts = vec![0i64; l];
    // Enumerate compositions of `free` quanta over `l` slots.
    fn walk(
        slot: usize,
        remaining: i64,
        counts: &mut Vec<i64>,
        min_q: &[i64],
        quantum: f64,
        source: &SourceSignal,
        relays: &[RelayNode],
        dest: &DestinationNode,
        best_snr: &mut f64,
        best: &mut Vec<f64>,
    ) {
        let l = counts.len();
        if slot == l - 1 {
            counts[slot] = remaining;
            let powers: Vec<f64> =
                counts.iter().zip(min_q).map(|(&k, &m)| (m + k) as f64 * quantum).collect();
            let mut snr_relays = relays.to_vec();
            for (relay, &p) in snr_relays.iter_mut().zip(&powers) {
                relay.power = p;
            }
            if let Ok(snr) = crate::channel::combined_snr(source, &snr_relays, dest) {
                if snr.value() > *best_snr {
                    *best_snr = snr.value();
                    *best = powers;
                }
            }
            return;
        }
        for k in 0..=remaining {
            counts[slot] = k;
            walk(
                slot + 1,
                remaining - k,
                counts,
                min_q,
                quantum,
                source,
                relays,
                dest,
                best_snr,
                best,
            );
        }
    }
    walk(
        0,
        free,
        &mut counts,
        &min_q,
        quantum,
        source,
        &relays,
        dest,
        &mut best_snr,
        &mut best,
    );

    let capacity = capacity_from_snr(PathSnr::new(best_snr)?, bandwidth_kbps)?;
    Ok((best, capacity))
}
