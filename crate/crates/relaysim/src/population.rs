//! Seeded generation of relay populations.
//!
//! A population is described generatively: channel coefficients are drawn
//! from motion-conditioned intervals discretized on an arithmetic grid with
//! step `d`, relay powers are constant or uniform in a range, and relay
//! noise follows either a constant or an every-third-relay pattern. Every
//! attribute of relay `g` comes from a dedicated substream of the
//! population's seed, so a population is a pure function of its spec and
//! relays can be regenerated independently of one another.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{RelayKind, RelayNode};
use crate::error::{Error, Result};
use crate::seeds;

/// A closed real interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo - 1e-12 && v <= self.hi + 1e-12
    }

    fn validate(&self, name: &str) -> Result<()> {
        if !self.lo.is_finite() || !self.hi.is_finite() || self.lo > self.hi {
            return Err(Error::InvalidConfig(format!(
                "{name}: interval [{}, {}] is not well-ordered",
                self.lo, self.hi
            )));
        }
        Ok(())
    }

    fn validate_unit(&self, name: &str) -> Result<()> {
        self.validate(name)?;
        if self.lo < 0.0 || self.hi > 1.0 {
            return Err(Error::InvalidConfig(format!(
                "{name}: interval [{}, {}] must lie within [0, 1]",
                self.lo, self.hi
            )));
        }
        Ok(())
    }
}

/// Coefficient intervals for one motion direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopIntervals {
    /// Source -> relay coefficient range.
    pub h_src: Interval,
    /// Relay -> destination coefficient range.
    pub h_dst: Interval,
}

/// Relay transmit power: one shared constant or uniform in a range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelayPowerSpec {
    Constant(f64),
    Uniform { lo: f64, hi: f64 },
}

impl RelayPowerSpec {
    /// Mean relay power implied by the spec (midpoint for a range).
    pub fn mean(&self) -> f64 {
        match *self {
            RelayPowerSpec::Constant(w) => w,
            RelayPowerSpec::Uniform { lo, hi } => 0.5 * (lo + hi),
        }
    }
}

/// Relay noise variance pattern over the 1-based relay index `g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoisePattern {
    Constant(f64),
    /// `regular` for g = 1, 2 (mod 3); `every_third` for g = 0 (mod 3).
    Mod3 { regular: f64, every_third: f64 },
}

impl NoisePattern {
    pub fn variance_for(&self, g: u32) -> f64 {
        match *self {
            NoisePattern::Constant(v) => v,
            NoisePattern::Mod3 { regular, every_third } => {
                if g % 3 == 0 {
                    every_third
                } else {
                    regular
                }
            }
        }
    }
}

/// Seeded generative description of a relay population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationSpec {
    /// Number of relays to generate.
    pub n_total: usize,
    /// Master seed; every drawn attribute derives from it.
    pub seed: u64,
    /// Coefficient intervals when the relay moves toward the source.
    pub toward_source: HopIntervals,
    /// Coefficient intervals when the relay moves toward the destination.
    pub toward_destination: HopIntervals,
    /// Arithmetic grid step for coefficient draws.
    pub d: f64,
    pub relay_power: RelayPowerSpec,
    pub relay_noise: NoisePattern,
    /// Probability that a relay moves toward the source.
    pub motion_split: f64,
}

impl PopulationSpec {
    /// Check all invariants. Returns human-readable warnings for conditions
    /// that are legal but degenerate (a grid step wider than its interval
    /// collapses the grid to the lower endpoint).
    pub fn validate(&self) -> Result<Vec<String>> {
        if self.n_total == 0 {
            return Err(Error::InvalidConfig("n_total must be at least 1".into()));
        }
        if !(self.d > 0.0) || !self.d.is_finite() {
            return Err(Error::InvalidConfig(format!("d = {} must be positive", self.d)));
        }
        if !(0.0..=1.0).contains(&self.motion_split) {
            return Err(Error::InvalidConfig(format!(
                "motion_split = {} must lie within [0, 1]",
                self.motion_split
            )));
        }
        self.toward_source.h_src.validate_unit("toward_source.h_src")?;
        self.toward_source.h_dst.validate_unit("toward_source.h_dst")?;
        self.toward_destination.h_src.validate_unit("toward_destination.h_src")?;
        self.toward_destination.h_dst.validate_unit("toward_destination.h_dst")?;
        match self.relay_power {
            RelayPowerSpec::Constant(w) => {
                if !(w > 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "relay_power: constant {w} W must be positive"
                    )));
                }
            }
            RelayPowerSpec::Uniform { lo, hi } => {
                if !(lo > 0.0) || lo > hi || !hi.is_finite() {
                    return Err(Error::InvalidConfig(format!(
                        "relay_power: range [{lo}, {hi}] W must be positive and well-ordered"
                    )));
                }
            }
        }
        match self.relay_noise {
            NoisePattern::Constant(v) if v < 0.0 => {
                return Err(Error::InvalidConfig(format!(
                    "relay_noise: variance {v} must be nonnegative"
                )));
            }
            NoisePattern::Mod3 { regular, every_third } if regular < 0.0 || every_third < 0.0 => {
                return Err(Error::InvalidConfig(
                    "relay_noise: variances must be nonnegative".into(),
                ));
            }
            _ => {}
        }

        let mut warnings = Vec::new();
        for (name, interval) in [
            ("toward_source.h_src", self.toward_source.h_src),
            ("toward_source.h_dst", self.toward_source.h_dst),
            ("toward_destination.h_src", self.toward_destination.h_src),
            ("toward_destination.h_dst", self.toward_destination.h_dst),
        ] {
            if self.d > interval.width() {
                warnings.push(format!(
                    "{name}: grid step d = {} exceeds the interval width {}; \
                     the grid degenerates to {{{}}}",
                    self.d,
                    interval.width(),
                    interval.lo
                ));
            }
        }
        Ok(warnings)
    }

    /// Same spec with a different seed; sweeps use this to derive per-trial
    /// populations.
    pub fn with_seed(&self, seed: u64) -> Self {
        let mut spec = self.clone();
        spec.seed = seed;
        spec
    }
}

/// Number of points on the arithmetic grid `{lo, lo+d, ..., <= hi}`.
pub fn grid_len(interval: Interval, d: f64) -> usize {
    ((interval.width() / d) + 1e-9).floor() as usize + 1
}

fn draw_from_grid(rng: &mut impl Rng, interval: Interval, d: f64) -> f64 {
    let n = grid_len(interval, d);
    let idx = rng.gen_range(0..n);
    (interval.lo + idx as f64 * d).min(interval.hi)
}

/// Whether `v` lies on the grid `{lo, lo+d, ...}` of `interval` (within
/// floating-point slack) and inside the interval.
pub fn on_grid(v: f64, interval: Interval, d: f64) -> bool {
    if !interval.contains(v) {
        return false;
    }
    let steps = ((v - interval.lo) / d).round();
    (interval.lo + steps * d - v).abs() <= 1e-9
}

/// Generate the population described by `spec`. Fully determined by
/// `spec.seed`: relay `g` draws its motion direction, both coefficients,
/// and its power (in that order) from the substream
/// `(seed, STREAM_RELAY, g)`.
pub fn generate_population(spec: &PopulationSpec) -> Result<Vec<RelayNode>> {
    spec.validate()?;
    let mut relays = Vec::with_capacity(spec.n_total);
    for g in 1..=spec.n_total as u32 {
        let mut rng = seeds::substream(spec.seed, &[seeds::STREAM_RELAY, g as u64]);
        let toward_source = rng.gen::<f64>() < spec.motion_split;
        let intervals =
            if toward_source { &spec.toward_source } else { &spec.toward_destination };
        let h_src = draw_from_grid(&mut rng, intervals.h_src, spec.d);
        let h_dst = draw_from_grid(&mut rng, intervals.h_dst, spec.d);
        let power = match spec.relay_power {
            RelayPowerSpec::Constant(w) => w,
            RelayPowerSpec::Uniform { lo, hi } => rng.gen_range(lo..=hi),
        };
        relays.push(RelayNode {
            id: g,
            kind: RelayKind::Vehicle,
            h_src,
            h_dst,
            power,
            min_power: 0.0,
            noise_var: spec.relay_noise.variance_for(g),
        });
    }
    Ok(relays)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(v: f64) -> Interval {
        Interval::new(v, v)
    }

    fn spec() -> PopulationSpec {
        PopulationSpec {
            n_total: 100,
            seed: 42,
            toward_source: HopIntervals {
                h_src: Interval::new(0.8, 0.95),
                h_dst: Interval::new(0.0, 0.65),
            },
            toward_destination: HopIntervals {
                h_src: Interval::new(0.75, 0.9),
                h_dst: Interval::new(0.0, 0.7),
            },
            d: 0.001,
            relay_power: RelayPowerSpec::Constant(20.0),
            relay_noise: NoisePattern::Constant(1.0),
            motion_split: 0.5,
        }
    }

    #[test]
    fn degenerate_spec_is_fully_determined() {
        let spec = PopulationSpec {
            n_total: 1,
            seed: 3,
            toward_source: HopIntervals { h_src: point(0.8), h_dst: point(0.4) },
            toward_destination: HopIntervals { h_src: point(0.8), h_dst: point(0.4) },
            d: 0.001,
            relay_power: RelayPowerSpec::Constant(20.0),
            relay_noise: NoisePattern::Constant(1.0),
            motion_split: 0.5,
        };
        let pop = generate_population(&spec).unwrap();
        assert_eq!(pop.len(), 1);
        assert_eq!(pop[0].id, 1);
        assert_eq!(pop[0].h_src, 0.8);
        assert_eq!(pop[0].h_dst, 0.4);
        assert_eq!(pop[0].power, 20.0);
        assert_eq!(pop[0].noise_var, 1.0);
    }

    #[test]
    fn coefficients_lie_on_their_grids() {
        let spec = spec();
        let pop = generate_population(&spec).unwrap();
        assert_eq!(pop.len(), 100);
        for relay in &pop {
            relay.validate().unwrap();
            let src_ok = on_grid(relay.h_src, spec.toward_source.h_src, spec.d)
                || on_grid(relay.h_src, spec.toward_destination.h_src, spec.d);
            let dst_ok = on_grid(relay.h_dst, spec.toward_source.h_dst, spec.d)
                || on_grid(relay.h_dst, spec.toward_destination.h_dst, spec.d);
            assert!(src_ok, "relay {} h_src {} off-grid", relay.id, relay.h_src);
            assert!(dst_ok, "relay {} h_dst {} off-grid", relay.id, relay.h_dst);
        }
    }

    #[test]
    fn direction_pairs_coefficients_consistently() {
        // A relay's two coefficients must come from the same direction's
        // intervals. Make the directions disjoint on h_src to tell them
        // apart.
        let spec = PopulationSpec {
            toward_source: HopIntervals {
                h_src: Interval::new(0.8, 0.95),
                h_dst: Interval::new(0.0, 0.1),
            },
            toward_destination: HopIntervals {
                h_src: Interval::new(0.2, 0.35),
                h_dst: Interval::new(0.5, 0.7),
            },
            ..spec()
        };
        let pop = generate_population(&spec).unwrap();
        for relay in &pop {
            if spec.toward_source.h_src.contains(relay.h_src) {
                assert!(spec.toward_source.h_dst.contains(relay.h_dst));
            } else {
                assert!(spec.toward_destination.h_src.contains(relay.h_src));
                assert!(spec.toward_destination.h_dst.contains(relay.h_dst));
            }
        }
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let spec = spec();
        let a = generate_population(&spec).unwrap();
        let b = generate_population(&spec).unwrap();
        assert_eq!(a, b);
        let c = generate_population(&spec.with_seed(43)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn mod3_noise_pattern_is_exact() {
        let spec = PopulationSpec {
            relay_noise: NoisePattern::Mod3 { regular: 1.0, every_third: 0.0 },
            ..spec()
        };
        let pop = generate_population(&spec).unwrap();
        for relay in &pop {
            let expected = if relay.id % 3 == 0 { 0.0 } else { 1.0 };
            assert_eq!(relay.noise_var, expected, "relay {}", relay.id);
        }
    }

    #[test]
    fn uniform_power_stays_in_range() {
        let spec = PopulationSpec {
            relay_power: RelayPowerSpec::Uniform { lo: 10.0, hi: 25.0 },
            ..spec()
        };
        let pop = generate_population(&spec).unwrap();
        assert!(pop.iter().all(|r| (10.0..=25.0).contains(&r.power)));
        assert_eq!(spec.relay_power.mean(), 17.5);
    }

    #[test]
    fn misordered_interval_is_rejected_by_name() {
        let spec = PopulationSpec {
            toward_source: HopIntervals {
                h_src: Interval::new(0.9, 0.8),
                h_dst: Interval::new(0.0, 0.65),
            },
            ..spec()
        };
        let err = spec.validate().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("toward_source.h_src"), "error must name the interval: {msg}");
    }

    #[test]
    fn wide_grid_step_warns_but_generates() {
        let spec = PopulationSpec { d: 0.9, ..spec() };
        let warnings = spec.validate().unwrap();
        assert!(!warnings.is_empty());
        let pop = generate_population(&spec).unwrap();
        // Degenerate grids collapse to the interval's lower endpoint.
        for relay in &pop {
            assert!(relay.h_src == 0.8 || relay.h_src == 0.75, "h_src {}", relay.h_src);
            assert_eq!(relay.h_dst, 0.0);
        }
    }

    #[test]
    fn grid_len_counts_endpoints() {
        assert_eq!(grid_len(Interval::new(0.8, 0.95), 0.001), 151);
        assert_eq!(grid_len(Interval::new(0.0, 0.7), 0.004), 176);
        assert_eq!(grid_len(Interval::new(0.5, 0.5), 0.01), 1);
    }
}
