//! Capacity-versus-relay-count sweeps over seeded populations.
//!
//! A sweep evaluates a set of selection algorithms on `trials` independently
//! generated populations and tabulates the mean combined-path capacity for
//! each subset size `L`. All randomness derives from the population spec's
//! master seed, so a sweep is reproducible cell by cell regardless of
//! evaluation order. Per-cell failures mark the cell invalid instead of
//! aborting the sweep.

use serde::{Deserialize, Serialize};

use crate::channel::{DestinationNode, RelayNode, SourceSignal};
use crate::error::{Error, Result};
use crate::population::{generate_population, PopulationSpec};
use crate::seeds;
use crate::selection::{
    select_optimized, select_topk, select_uniform, selection_capacity, AllocationConfig,
    RelaySelection, SelectionScheme,
};
use crate::tol;

/// How the total budget for a subset of size `L` is formed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TotalPowerRule {
    /// `L x` the mean relay power of the population spec, so a uniform
    /// split reproduces the population's per-relay power.
    MeanRelayPower,
    /// `L x` an explicit per-relay wattage.
    PerRelayWatts(f64),
}

/// Scenario-level parameters shared by every cell of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    /// Source transmit power in watts.
    pub source_power: f64,
    /// Squared norm of the sensing vector.
    pub y_sq: f64,
    /// Destination noise variance in watts.
    pub dest_noise_var: f64,
    pub bandwidth_kbps: f64,
    pub total_power_rule: TotalPowerRule,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.source_power > 0.0) || !self.source_power.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "scenario.source_power {} W must be positive",
                self.source_power
            )));
        }
        if self.y_sq < 0.0 || !self.y_sq.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "scenario.y_sq {} must be nonnegative",
                self.y_sq
            )));
        }
        if self.dest_noise_var < 0.0 || !self.dest_noise_var.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "scenario.dest_noise_var {} must be nonnegative",
                self.dest_noise_var
            )));
        }
        if !(self.bandwidth_kbps > 0.0) || !self.bandwidth_kbps.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "scenario.bandwidth_kbps {} must be positive",
                self.bandwidth_kbps
            )));
        }
        if let TotalPowerRule::PerRelayWatts(w) = self.total_power_rule {
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "scenario.total_power_rule watts {w} must be positive"
                )));
            }
        }
        Ok(())
    }

    pub fn source_signal(&self) -> Result<SourceSignal> {
        SourceSignal::from_y_sq(self.y_sq, self.source_power)
    }

    pub fn destination(&self) -> Result<DestinationNode> {
        DestinationNode::new(self.dest_noise_var)
    }

    /// Total budget for a subset of size `l`.
    pub fn total_power(&self, l: usize, spec: &PopulationSpec) -> f64 {
        let per_relay = match self.total_power_rule {
            TotalPowerRule::MeanRelayPower => spec.relay_power.mean(),
            TotalPowerRule::PerRelayWatts(w) => w,
        };
        per_relay * l as f64
    }
}

/// The selection algorithms a sweep can tabulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    /// Ranked selection with optimized power allocation.
    ProposedB3,
    /// Ranked selection with a uniform split.
    TopkB2,
    /// Seeded arbitrary selection with a uniform split.
    UniformB1,
    /// Baseline: top relays by two-hop fading product, uniform split.
    MaxFading,
    /// Baseline: top relays by their own power draw, uniform split.
    MaxPower,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::ProposedB3,
        Algorithm::TopkB2,
        Algorithm::UniformB1,
        Algorithm::MaxFading,
        Algorithm::MaxPower,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Algorithm::ProposedB3 => "proposed_b3",
            Algorithm::TopkB2 => "topk_b2",
            Algorithm::UniformB1 => "uniform_b1",
            Algorithm::MaxFading => "max_fading",
            Algorithm::MaxPower => "max_power",
        }
    }
}

/// Top-L relays by the two-hop fading product `h_src * h_dst`, budget split
/// evenly. Ties break by ascending id.
pub fn baseline_max_fading(
    pool: &[RelayNode],
    l: usize,
    total_power: f64,
) -> Result<RelaySelection> {
    baseline_by_key(pool, l, total_power, |r| r.h_src * r.h_dst)
}

/// Top-L relays by their own power field (the sort key only; capacity is
/// evaluated at the same even split as the other uniform schemes, so the
/// comparison isolates the selection policy). Ties break by ascending id.
pub fn baseline_max_power(
    pool: &[RelayNode],
    l: usize,
    total_power: f64,
) -> Result<RelaySelection> {
    baseline_by_key(pool, l, total_power, |r| r.power)
}

fn baseline_by_key(
    pool: &[RelayNode],
    l: usize,
    total_power: f64,
    key: impl Fn(&RelayNode) -> f64,
) -> Result<RelaySelection> {
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
    let mut order: Vec<&RelayNode> = pool.iter().collect();
    order.sort_by(|a, b| key(b).total_cmp(&key(a)).then(a.id.cmp(&b.id)));
    let share = total_power / l as f64;
    for relay in &order[..l] {
        if relay.min_power > share + tol::ABS {
            return Err(Error::InfeasibleBudget(format!(
                "relay {} needs at least {} W but the even share is {share} W",
                relay.id, relay.min_power
            )));
        }
    }
    Ok(RelaySelection {
        relay_ids: order[..l].iter().map(|r| r.id).collect(),
        powers: vec![share; l],
        total_power,
        scheme: SelectionScheme::UniformRanked,
    })
}

/// One tabulated cell: the mean capacity in kbps, or the reason the cell
/// could not be evaluated.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CellValue {
    Valid(f64),
    Invalid(String),
}

impl CellValue {
    pub fn value(&self) -> Option<f64> {
        match self {
            CellValue::Valid(v) => Some(*v),
            CellValue::Invalid(_) => None,
        }
    }
}

/// One row of a sweep: a subset size and the per-algorithm mean capacities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub l: usize,
    pub cells: Vec<CellValue>,
}

/// Tabulated capacity-versus-relay-count curves, with the full generative
/// description echoed for provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    /// Algorithm labels, parallel to each row's cells.
    pub labels: Vec<String>,
    pub rows: Vec<SweepRow>,
    pub trials: usize,
    pub master_seed: u64,
    pub population: PopulationSpec,
    pub scenario: ScenarioConfig,
}

impl SweepResult {
    /// The mean capacity for `(l, algorithm)`, if that cell is valid.
    pub fn cell(&self, l: usize, algorithm: Algorithm) -> Option<f64> {
        let col = self.labels.iter().position(|lab| lab == algorithm.label())?;
        let row = self.rows.iter().find(|r| r.l == l)?;
        row.cells[col].value()
    }
}

/// Capacity margin of the proposed scheme over one baseline at one subset
/// size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginRow {
    pub l: usize,
    pub baseline: String,
    pub margin_kbps: f64,
}

/// A full five-algorithm sweep plus the per-L margins of the proposed
/// scheme over every other algorithm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonResult {
    pub sweep: SweepResult,
    pub margins: Vec<MarginRow>,
}

fn evaluate_cell(
    algorithm: Algorithm,
    source: &SourceSignal,
    pool: &[RelayNode],
    dest: &DestinationNode,
    l: usize,
    total_power: f64,
    bandwidth: f64,
    b1_seed: u64,
) -> Result<f64> {
    let capacity = match algorithm {
        Algorithm::ProposedB3 => {
            let config = AllocationConfig::for_budget(total_power);
            select_optimized(source, pool, dest, l, total_power, &config, bandwidth)?.capacity
        }
        Algorithm::TopkB2 => {
            let sel = select_topk(source, pool, dest, l, total_power, bandwidth)?;
            selection_capacity(source, pool, &sel, dest, bandwidth)?
        }
        Algorithm::UniformB1 => {
            let sel = select_uniform(pool, l, total_power, b1_seed)?;
            selection_capacity(source, pool, &sel, dest, bandwidth)?
        }
        Algorithm::MaxFading => {
            let sel = baseline_max_fading(pool, l, total_power)?;
            selection_capacity(source, pool, &sel, dest, bandwidth)?
        }
        Algorithm::MaxPower => {
            let sel = baseline_max_power(pool, l, total_power)?;
            selection_capacity(source, pool, &sel, dest, bandwidth)?
        }
    };
    Ok(capacity.kbps)
}

/// Run the sweep: for every `l` in `l_values` and every algorithm, the mean
/// capacity over `trials` populations derived from the spec's seed.
pub fn sweep_capacity(
    spec: &PopulationSpec,
    scenario: &ScenarioConfig,
    l_values: &[usize],
    algorithms: &[Algorithm],
    trials: usize,
) -> Result<SweepResult> {
    spec.validate()?;
    scenario.validate()?;
    if trials == 0 {
        return Err(Error::PreconditionViolated("trials must be at least 1".into()));
    }
    if l_values.is_empty() {
        return Err(Error::PreconditionViolated("the sweep needs at least one L".into()));
    }
    if let Some(&bad) = l_values.iter().find(|&&l| l == 0 || l > spec.n_total) {
        return Err(Error::PreconditionViolated(format!(
            "L = {bad} outside [1, n_total = {}]",
            spec.n_total
        )));
    }

    let source = scenario.source_signal()?;
    let dest = scenario.destination()?;
    let bandwidth = scenario.bandwidth_kbps;

    let mut sums = vec![vec![0.0f64; algorithms.len()]; l_values.len()];
    let mut failures: Vec<Vec<Option<String>>> = vec![vec![None; algorithms.len()]; l_values.len()];

    for trial in 0..trials {
        let pop_seed =
            seeds::derive_seed(spec.seed, &[seeds::STREAM_POPULATION, trial as u64]);
        let pool = generate_population(&spec.with_seed(pop_seed))?;
        for (li, &l) in l_values.iter().enumerate() {
            let total_power = scenario.total_power(l, spec);
            for (ai, &algorithm) in algorithms.iter().enumerate() {
                if failures[li][ai].is_some() {
                    continue;
                }
                let b1_seed = seeds::derive_seed(
                    spec.seed,
                    &[seeds::STREAM_UNIFORM_DRAW, trial as u64, l as u64],
                );
                match evaluate_cell(
                    algorithm,
                    &source,
                    &pool,
                    &dest,
                    l,
                    total_power,
                    bandwidth,
                    b1_seed,
                ) {
                    Ok(kbps) => sums[li][ai] += kbps,
                    Err(err) => {
                        failures[li][ai] =
                            Some(format!("trial {trial}: {err}"));
                    }
                }
            }
        }
    }

    let rows = l_values
        .iter()
        .enumerate()
        .map(|(li, &l)| SweepRow {
            l,
            cells: algorithms
                .iter()
                .enumerate()
                .map(|(ai, _)| match &failures[li][ai] {
                    Some(msg) => CellValue::Invalid(msg.clone()),
                    None => CellValue::Valid(sums[li][ai] / trials as f64),
                })
                .collect(),
        })
        .collect();

    Ok(SweepResult {
        labels: algorithms.iter().map(|a| a.label().to_string()).collect(),
        rows,
        trials,
        master_seed: spec.seed,
        population: spec.clone(),
        scenario: scenario.clone(),
    })
}

/// Sweep all five algorithms and tabulate the per-L margin of the proposed
/// scheme over each of the others.
pub fn compare_algorithms(
    spec: &PopulationSpec,
    scenario: &ScenarioConfig,
    l_values: &[usize],
    trials: usize,
) -> Result<ComparisonResult> {
    let sweep = sweep_capacity(spec, scenario, l_values, &Algorithm::ALL, trials)?;
    let mut margins = Vec::new();
    for row in &sweep.rows {
        let proposed = match row.cells[0].value() {
            Some(v) => v,
            None => continue,
        };
        for (label, cell) in sweep.labels.iter().zip(&row.cells).skip(1) {
            if let Some(v) = cell.value() {
                margins.push(MarginRow {
                    l: row.l,
                    baseline: label.clone(),
                    margin_kbps: proposed - v,
                });
            }
        }
    }
    Ok(ComparisonResult { sweep, margins })
}
