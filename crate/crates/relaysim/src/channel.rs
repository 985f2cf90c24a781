//! Two-hop relay signal model and SNR quantities.
//!
//! A source vehicle transmits a sensing vector through one or more
//! amplify-and-forward relays to a destination vehicle. The model is fully
//! deterministic: each hop scales the signal by `sqrt(power) * h` and adds
//! the hop's noise variance as a constant offset, so every quantity here is
//! an exact function of its inputs and tests reproduce bit-for-bit.
//!
//! Two SNR views exist for a relay subset:
//!
//! * [`combined_snr`] — the subset acts as one coherent path: amplitudes add
//!   across relays in both the signal and the relay-noise terms, and the
//!   destination contributes `L * noise_var` (one copy per relay
//!   transmission).
//! * [`sum_path_snr`] — each relay is scored as an isolated path (with zero
//!   destination noise) and the per-path SNRs are added.
//!
//! With zero destination noise the combined view never exceeds the summed
//! view; [`verify_snr_bound`] evaluates both sides together with the two
//! intermediate inequalities (a sum-of-squares bound and Cauchy–Schwarz)
//! that make the comparison hold.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol;

/// What kind of node is acting as the relay. Only a tag: all kinds share the
/// same signal model and differ through their coefficients and powers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelayKind {
    Vehicle,
    Uav,
    Mobile,
    FixedStation,
}

/// One cooperative relay: channel coefficients for both hops, transmit power
/// budget, minimum forwarding power, and the variance of its own noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelayNode {
    /// 1-based identifier, unique within a population.
    pub id: u32,
    pub kind: RelayKind,
    /// Channel coefficient of the source -> relay hop, in [0, 1].
    pub h_src: f64,
    /// Channel coefficient of the relay -> destination hop, in [0, 1].
    pub h_dst: f64,
    /// Transmit power in watts.
    pub power: f64,
    /// Minimum power this relay needs to forward at all, in watts.
    pub min_power: f64,
    /// Noise variance at the relay, in watts.
    pub noise_var: f64,
}

impl RelayNode {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.h_src) || !self.h_src.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "relay {}: h_src {} outside [0, 1]",
                self.id, self.h_src
            )));
        }
        if !(0.0..=1.0).contains(&self.h_dst) || !self.h_dst.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "relay {}: h_dst {} outside [0, 1]",
                self.id, self.h_dst
            )));
        }
        if !(self.power > 0.0) || !self.power.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "relay {}: power {} must be positive",
                self.id, self.power
            )));
        }
        if self.min_power < 0.0 || self.min_power > self.power {
            return Err(Error::InvalidConfig(format!(
                "relay {}: min_power {} outside [0, power={}]",
                self.id, self.min_power, self.power
            )));
        }
        if self.noise_var < 0.0 || !self.noise_var.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "relay {}: noise_var {} must be nonnegative",
                self.id, self.noise_var
            )));
        }
        Ok(())
    }
}

/// The transmitting vehicle's sensing vector and transmit power.
///
/// The squared Euclidean norm of the vector is cached at construction; the
/// SNR formulas consume the norm, the propagation operations consume the
/// vector elementwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceSignal {
    y: Vec<f64>,
    power: f64,
    y_sq: f64,
}

impl SourceSignal {
    /// Build from an explicit sensing vector.
    pub fn new(y: Vec<f64>, power: f64) -> Result<Self> {
        let y_sq = y.iter().map(|v| v * v).sum();
        Self::from_parts(y, power, y_sq)
    }

    /// Build a scalar (dimension-1) signal whose squared norm is `y_sq`.
    /// This is the canonical mode for the simulation scenarios.
    pub fn from_y_sq(y_sq: f64, power: f64) -> Result<Self> {
        if y_sq < 0.0 || !y_sq.is_finite() {
            return Err(Error::InvalidSignal(format!(
                "squared norm {y_sq} must be nonnegative and finite"
            )));
        }
        Self::new(vec![y_sq.sqrt()], power)
    }

    /// Build from pre-computed parts; the cached squared norm must agree
    /// with the vector within 1e-12 relative.
    pub fn from_parts(y: Vec<f64>, power: f64, y_sq: f64) -> Result<Self> {
        if y.is_empty() {
            return Err(Error::InvalidSignal("signal vector is empty".into()));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSignal("signal vector has non-finite entries".into()));
        }
        if !(power > 0.0) || !power.is_finite() {
            return Err(Error::InvalidSignal(format!("power {power} must be positive")));
        }
        let norm_sq: f64 = y.iter().map(|v| v * v).sum();
        if !tol::eq_rel(norm_sq, y_sq, 1e-12) {
            return Err(Error::InvalidSignal(format!(
                "cached squared norm {y_sq} disagrees with vector norm {norm_sq}"
            )));
        }
        Ok(Self { y, power, y_sq })
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    /// Squared Euclidean norm of the sensing vector.
    pub fn y_sq(&self) -> f64 {
        self.y_sq
    }

    /// Signal dimension.
    pub fn dim(&self) -> usize {
        self.y.len()
    }
}

/// The receiving vehicle; only its noise variance enters the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DestinationNode {
    pub noise_var: f64,
}

impl DestinationNode {
    pub fn new(noise_var: f64) -> Result<Self> {
        if noise_var < 0.0 || !noise_var.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "destination noise_var {noise_var} must be nonnegative"
            )));
        }
        Ok(Self { noise_var })
    }

    /// Destination with zero noise, the hypothesis under which the SNR upper
    /// bound is stated.
    pub fn noiseless() -> Self {
        Self { noise_var: 0.0 }
    }
}

/// A nonnegative, finite linear-scale SNR.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct PathSnr(f64);

impl PathSnr {
    pub fn new(value: f64) -> Result<Self> {
        if value < 0.0 || !value.is_finite() {
            return Err(Error::InvalidSnr(value));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub const ZERO: PathSnr = PathSnr(0.0);
}

/// Signal observed at the relay after the first hop:
/// `sqrt(source.power) * h_src * y + noise_var`, elementwise. The noise
/// variance itself is the additive term; nothing is sampled.
pub fn received_at_relay(source: &SourceSignal, relay: &RelayNode) -> Vec<f64> {
    let gain = source.power().sqrt() * relay.h_src;
    source.y().iter().map(|&v| gain * v + relay.noise_var).collect()
}

/// Signal observed at the destination after both hops through one relay:
/// `sqrt(relay.power) * h_dst * received_at_relay(..) + dest.noise_var`,
/// elementwise.
pub fn relayed_to_destination(
    source: &SourceSignal,
    relay: &RelayNode,
    dest: &DestinationNode,
) -> Vec<f64> {
    let gain = relay.power.sqrt() * relay.h_dst;
    received_at_relay(source, relay)
        .into_iter()
        .map(|v| gain * v + dest.noise_var)
        .collect()
}

/// Combined signal at the destination via a relay subset of size `L`: the
/// per-relay second-hop signals add, and the destination noise contributes
/// once per relay transmission (`L * noise_var`), elementwise.
pub fn combined_received(
    source: &SourceSignal,
    relays: &[RelayNode],
    dest: &DestinationNode,
) -> Result<Vec<f64>> {
    if relays.is_empty() {
        return Err(Error::EmptySelection);
    }
    let n = source.dim();
    let mut acc = vec![0.0; n];
    for relay in relays {
        let outer = relay.power.sqrt() * relay.h_dst;
        let inner = source.power().sqrt() * relay.h_src;
        for (slot, &v) in acc.iter_mut().zip(source.y()) {
            *slot += outer * (inner * v + relay.noise_var);
        }
    }
    let dest_noise = relays.len() as f64 * dest.noise_var;
    for slot in &mut acc {
        *slot += dest_noise;
    }
    Ok(acc)
}

/// Amplitude sums over a relay subset: the coherent signal term
/// `S = sum_g sqrt(q_g) h_dst_g sqrt(Q_src) h_src_g` and the relay-noise
/// term `T = sum_g sqrt(q_g) h_dst_g noise_var_g`.
fn amplitude_sums(source: &SourceSignal, relays: &[RelayNode]) -> (f64, f64) {
    let src_amp = source.power().sqrt();
    let mut signal = 0.0;
    let mut noise = 0.0;
    for relay in relays {
        let hop = relay.power.sqrt() * relay.h_dst;
        signal += hop * src_amp * relay.h_src;
        noise += hop * relay.noise_var;
    }
    (signal, noise)
}

/// SNR of the combined path through a relay subset:
///
/// ```text
///            S^2 * |y|^2
/// SNR = ----------------------     S, T as in `amplitude_sums`,
///        T^2 + (L * dn)^2          dn = destination noise variance
/// ```
///
/// Errors with [`Error::InfiniteSnr`] when the denominator is zero (every
/// relay noise term and the destination noise are all zero).
pub fn combined_snr(
    source: &SourceSignal,
    relays: &[RelayNode],
    dest: &DestinationNode,
) -> Result<PathSnr> {
    if relays.is_empty() {
        return Err(Error::EmptySelection);
    }
    let (signal, noise) = amplitude_sums(source, relays);
    let dest_noise = relays.len() as f64 * dest.noise_var;
    let denom = noise * noise + dest_noise * dest_noise;
    if denom == 0.0 {
        return Err(Error::InfiniteSnr);
    }
    PathSnr::new(signal * signal * source.y_sq() / denom)
}

/// Signal and noise amplitudes of one isolated path (destination noise
/// excluded): `U = sqrt(q) h_dst sqrt(Q_src) h_src |y|` and
/// `I = sqrt(q) h_dst noise_var`.
pub(crate) fn path_terms(source: &SourceSignal, relay: &RelayNode) -> (f64, f64) {
    let hop = relay.power.sqrt() * relay.h_dst;
    let u = (hop * source.power().sqrt() * relay.h_src).abs() * source.y_sq().sqrt();
    let i = (hop * relay.noise_var).abs();
    (u, i)
}

/// SNR of one relay viewed as an isolated path with zero destination noise:
/// `U^2 / I^2`. Requires `I > 0`; a zero noise amplitude (zero relay noise
/// variance, or a dead second hop) makes the ratio unbounded and is
/// signalled as [`Error::InfiniteSnr`].
pub fn single_path_snr(source: &SourceSignal, relay: &RelayNode) -> Result<PathSnr> {
    let (u, i) = path_terms(source, relay);
    if i == 0.0 {
        return Err(Error::InfiniteSnr);
    }
    PathSnr::new((u * u) / (i * i))
}

/// Sum of the isolated per-path SNRs over a relay list. The empty list sums
/// to zero; a zero noise amplitude on any path propagates
/// [`Error::InfiniteSnr`].
pub fn sum_path_snr(source: &SourceSignal, relays: &[RelayNode]) -> Result<PathSnr> {
    let mut total = 0.0;
    for relay in relays {
        total += single_path_snr(source, relay)?.value();
    }
    PathSnr::new(total)
}

/// One numeric inequality check inside a [`BoundReport`]; `holds` means
/// `lhs <= rhs` within the shared tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepCheck {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl StepCheck {
    fn leq(name: &'static str, lhs: f64, rhs: f64) -> Self {
        Self { name, lhs, rhs, holds: tol::leq(lhs, rhs) }
    }
}

/// Result of checking the combined-vs-summed SNR comparison on one instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    /// Combined-path SNR (zero destination noise).
    pub combined: f64,
    /// Sum of the isolated per-path SNRs.
    pub summed: f64,
    /// `combined <= summed` within the shared relative tolerance.
    pub holds: bool,
    /// The intermediate inequalities evaluated on the same instance, each
    /// normalized to `lhs <= rhs`.
    pub steps: Vec<StepCheck>,
}

/// Evaluate the combined-path SNR against the sum of per-path SNRs for the
/// same relay subset, along with the two intermediate inequalities that
/// drive the comparison:
///
/// * `sum_of_squares` — `sum I_w^2 <= (sum I_w)^2` for nonnegative `I_w`;
/// * `cauchy_schwarz` — `(sum u_w I_w)^2 <= (sum u_w^2)(sum I_w^2)` with
///   `u_w = U_w / I_w`.
///
/// The comparison is stated for a noiseless destination; a nonzero
/// destination noise variance is a precondition violation.
pub fn verify_snr_bound(
    source: &SourceSignal,
    relays: &[RelayNode],
    dest: &DestinationNode,
) -> Result<BoundReport> {
    if dest.noise_var != 0.0 {
        return Err(Error::PreconditionViolated(format!(
            "the SNR bound is stated for zero destination noise, got {}",
            dest.noise_var
        )));
    }
    if relays.is_empty() {
        return Err(Error::EmptySelection);
    }

    let combined = combined_snr(source, relays, dest)?.value();
    let summed = sum_path_snr(source, relays)?.value();

    let mut sum_i = 0.0;
    let mut sum_i_sq = 0.0;
    let mut sum_u_sq = 0.0;
    let mut sum_ui = 0.0;
    for relay in relays {
        let (big_u, big_i) = path_terms(source, relay);
        // sum_path_snr above already rejected I == 0.
        let u = big_u / big_i;
        sum_i += big_i;
        sum_i_sq += big_i * big_i;
        sum_u_sq += u * u;
        sum_ui += u * big_i;
    }

    let steps = vec![
        StepCheck::leq("sum_of_squares", sum_i_sq, sum_i * sum_i),
        StepCheck::leq("cauchy_schwarz", sum_ui * sum_ui, sum_u_sq * sum_i_sq),
    ];

    Ok(BoundReport { combined, summed, holds: tol::leq(combined, summed), steps })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn relay(id: u32, h_src: f64, h_dst: f64, power: f64, noise_var: f64) -> RelayNode {
        RelayNode {
            id,
            kind: RelayKind::Vehicle,
            h_src,
            h_dst,
            power,
            min_power: 0.0,
            noise_var,
        }
    }

    fn scalar_source(y: f64, power: f64) -> SourceSignal {
        SourceSignal::new(vec![y], power).unwrap()
    }

    #[test]
    fn received_identity_case() {
        let src = scalar_source(1.0, 1.0);
        let r = relay(1, 1.0, 1.0, 1.0, 0.0);
        assert_eq!(received_at_relay(&src, &r), vec![1.0]);
    }

    #[test]
    fn received_scales_and_offsets() {
        let src = scalar_source(1.0, 4.0);
        let r = relay(1, 0.5, 1.0, 1.0, 1.0);
        assert_eq!(received_at_relay(&src, &r), vec![2.0]);
    }

    #[test]
    fn received_elementwise_on_vectors() {
        let src = SourceSignal::new(vec![1.0, -1.0], 2.0).unwrap();
        let r = relay(1, 0.9, 1.0, 1.0, 1.0);
        let got = received_at_relay(&src, &r);
        assert!((got[0] - 2.2727922061357857).abs() < 1e-15, "got {:?}", got);
        assert!((got[1] - -0.2727922061357857).abs() < 1e-15, "got {:?}", got);
    }

    #[test]
    fn relayed_identity_chain() {
        let src = scalar_source(1.0, 1.0);
        let r = relay(1, 1.0, 1.0, 1.0, 0.0);
        let dest = DestinationNode::noiseless();
        assert_eq!(relayed_to_destination(&src, &r, &dest), vec![1.0]);
    }

    #[test]
    fn relayed_two_hop_chain() {
        let src = scalar_source(1.0, 1.0);
        let r = relay(1, 1.0, 0.5, 4.0, 1.0);
        let dest = DestinationNode::new(1.0).unwrap();
        // sqrt(4) * 0.5 * (1 + 1) + 1
        assert_eq!(relayed_to_destination(&src, &r, &dest), vec![3.0]);
    }

    #[test]
    fn relayed_general_values() {
        let src = scalar_source(1.0, 15.0);
        let r = relay(1, 0.9, 0.5, 20.0, 1.0);
        let dest = DestinationNode::new(2.0).unwrap();
        let got = relayed_to_destination(&src, &r, &dest);
        // sqrt(20)*0.5*(sqrt(15)*0.9 + 1) + 2, evaluated independently.
        assert!((got[0] - 12.030296611559738).abs() < 1e-12, "got {:?}", got);
    }

    #[test]
    fn combined_single_relay_degenerates() {
        let src = scalar_source(0.7, 3.0);
        let r = relay(1, 0.8, 0.4, 12.0, 1.5);
        let dest = DestinationNode::new(0.5).unwrap();
        let combined = combined_received(&src, &[r.clone()], &dest).unwrap();
        let direct = relayed_to_destination(&src, &r, &dest);
        for (a, b) in combined.iter().zip(&direct) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn combined_is_linear_in_identical_relays() {
        let src = scalar_source(1.0, 2.0);
        let r = relay(1, 0.6, 0.3, 9.0, 1.0);
        let dest = DestinationNode::noiseless();
        let one = combined_received(&src, &[r.clone()], &dest).unwrap();
        let two = combined_received(&src, &[r.clone(), r], &dest).unwrap();
        assert!((two[0] - 2.0 * one[0]).abs() < 1e-12);
    }

    #[test]
    fn combined_two_relay_values() {
        let src = scalar_source(2.0_f64.sqrt(), 15.0);
        let r = relay(1, 0.9, 0.5, 20.0, 1.0);
        let dest = DestinationNode::new(1.0).unwrap();
        let got = combined_received(&src, &[r.clone(), r], &dest).unwrap();
        // 2 * sqrt(20)*0.5*(sqrt(15)*0.9*sqrt(2) + 1) + 2*1, evaluated
        // independently.
        assert!((got[0] - 28.517543640048185).abs() < 1e-12, "got {:?}", got);
    }

    #[test]
    fn combined_rejects_empty_selection() {
        let src = scalar_source(1.0, 1.0);
        let dest = DestinationNode::noiseless();
        assert_eq!(combined_received(&src, &[], &dest), Err(Error::EmptySelection));
        assert_eq!(combined_snr(&src, &[], &dest).unwrap_err(), Error::EmptySelection);
    }

    #[test]
    fn combined_snr_unit_case() {
        let src = scalar_source(1.0, 1.0);
        let r = relay(1, 1.0, 1.0, 1.0, 1.0);
        let dest = DestinationNode::noiseless();
        let snr = combined_snr(&src, &[r], &dest).unwrap();
        assert_eq!(snr.value(), 1.0);
    }

    #[test]
    fn combined_snr_two_identical_relays() {
        let src = SourceSignal::from_y_sq(2.0, 15.0).unwrap();
        let r = relay(1, 0.9, 0.5, 20.0, 1.0);
        let dest = DestinationNode::new(1.0).unwrap();
        let snr = combined_snr(&src, &[r.clone(), r], &dest).unwrap();
        // 486 / 24
        assert!((snr.value() - 20.25).abs() < 1e-12, "got {}", snr.value());
    }

    #[test]
    fn combined_snr_zero_signal() {
        let src = scalar_source(1.0, 1e-300);
        let r = relay(1, 0.0, 0.5, 20.0, 1.0);
        let dest = DestinationNode::new(1.0).unwrap();
        // h_src = 0 kills the numerator while the denominator stays positive.
        let snr = combined_snr(&src, &[r], &dest).unwrap();
        assert_eq!(snr.value(), 0.0);
    }

    #[test]
    fn combined_snr_all_zero_noise_is_unbounded() {
        let src = scalar_source(1.0, 1.0);
        let r = relay(1, 0.5, 0.5, 4.0, 0.0);
        let dest = DestinationNode::noiseless();
        assert_eq!(combined_snr(&src, &[r], &dest).unwrap_err(), Error::InfiniteSnr);
    }

    #[test]
    fn single_path_unit_case() {
        let src = scalar_source(1.0, 1.0);
        let r = relay(1, 1.0, 1.0, 1.0, 1.0);
        assert_eq!(single_path_snr(&src, &r).unwrap().value(), 1.0);
    }

    #[test]
    fn single_path_reference_values() {
        let src = SourceSignal::from_y_sq(2.0, 15.0).unwrap();
        let r = relay(1, 0.9, 0.5, 20.0, 1.0);
        let snr = single_path_snr(&src, &r).unwrap();
        assert!((snr.value() - 24.3).abs() < 1e-12, "got {}", snr.value());
    }

    #[test]
    fn single_path_blocked_first_hop() {
        let src = scalar_source(1.0, 5.0);
        let r = relay(1, 0.0, 0.5, 20.0, 1.0);
        assert_eq!(single_path_snr(&src, &r).unwrap().value(), 0.0);
    }

    #[test]
    fn single_path_zero_noise_is_unbounded() {
        let src = scalar_source(1.0, 5.0);
        let r = relay(1, 0.5, 0.5, 20.0, 0.0);
        assert_eq!(single_path_snr(&src, &r).unwrap_err(), Error::InfiniteSnr);
    }

    #[test]
    fn sum_path_matches_single_and_doubles() {
        let src = SourceSignal::from_y_sq(2.0, 15.0).unwrap();
        let r = relay(1, 0.9, 0.5, 20.0, 1.0);
        let single = single_path_snr(&src, &r).unwrap().value();
        let one = sum_path_snr(&src, &[r.clone()]).unwrap().value();
        let two = sum_path_snr(&src, &[r.clone(), r]).unwrap().value();
        assert_eq!(one, single);
        assert!((two - 48.6).abs() < 1e-12, "got {two}");
    }

    #[test]
    fn sum_path_empty_list_is_zero() {
        let src = scalar_source(1.0, 1.0);
        assert_eq!(sum_path_snr(&src, &[]).unwrap().value(), 0.0);
    }

    #[test]
    fn bound_single_path_is_equality() {
        let src = SourceSignal::from_y_sq(2.0, 15.0).unwrap();
        let r = relay(1, 0.9, 0.5, 20.0, 1.0);
        let report = verify_snr_bound(&src, &[r], &DestinationNode::noiseless()).unwrap();
        assert!(report.holds);
        assert!((report.combined - report.summed).abs() < 1e-12 * report.summed);
        assert!(report.steps.iter().all(|s| s.holds));
    }

    #[test]
    fn bound_two_identical_relays() {
        let src = SourceSignal::from_y_sq(2.0, 15.0).unwrap();
        let r = relay(1, 0.9, 0.5, 20.0, 1.0);
        let report =
            verify_snr_bound(&src, &[r.clone(), r], &DestinationNode::noiseless()).unwrap();
        assert!((report.combined - 24.3).abs() < 1e-12, "combined {}", report.combined);
        assert!((report.summed - 48.6).abs() < 1e-12, "summed {}", report.summed);
        assert!(report.holds);
        assert!(report.steps.iter().all(|s| s.holds));
    }

    #[test]
    fn bound_requires_noiseless_destination() {
        let src = scalar_source(1.0, 1.0);
        let r = relay(1, 0.5, 0.5, 4.0, 1.0);
        let dest = DestinationNode::new(1.0).unwrap();
        assert!(matches!(
            verify_snr_bound(&src, &[r], &dest),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn source_signal_validates() {
        assert!(SourceSignal::new(vec![], 1.0).is_err());
        assert!(SourceSignal::new(vec![1.0], 0.0).is_err());
        assert!(SourceSignal::from_parts(vec![1.0, 1.0], 1.0, 2.0).is_ok());
        assert!(SourceSignal::from_parts(vec![1.0, 1.0], 1.0, 2.5).is_err());
    }

    #[test]
    fn relay_node_validates() {
        let mut r = relay(1, 0.5, 0.5, 10.0, 1.0);
        assert!(r.validate().is_ok());
        r.min_power = 11.0;
        assert!(r.validate().is_err());
        r.min_power = 0.0;
        r.h_src = 1.5;
        assert!(r.validate().is_err());
    }
}
