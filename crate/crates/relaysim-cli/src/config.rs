//! Experiment configuration files.
//!
//! Configs are TOML with four sections: `[population]` (the generative
//! relay description), `[scenario]` (source, destination, bandwidth, and
//! the total-power rule), optional `[sweep]` (subset sizes and trial
//! count), and optional `[experiment]` (experiment-specific knobs such as
//! the grid steps swept by the fig3 scenario). Unknown keys are rejected,
//! defaults are filled in, and the fully resolved configuration is echoed
//! into every run manifest.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use relaysim::population::{
    HopIntervals, Interval, NoisePattern, PopulationSpec, RelayPowerSpec,
};
use relaysim::sweep::{ScenarioConfig, TotalPowerRule};

/// CLI-level error with a process exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Unreadable, unparsable, or invariant-violating configuration. Exit 2.
    Config(String),
    /// The scenario cannot be run as parameterized. Exit 3.
    Infeasible(String),
    /// Anything else, including internal invariant violations. Exit 4.
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Infeasible(msg) => write!(f, "infeasible scenario: {msg}"),
            CliError::Internal(msg) => write!(f, "internal error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<relaysim::Error> for CliError {
    fn from(err: relaysim::Error) -> Self {
        match err {
            relaysim::Error::InvalidConfig(_) => CliError::Config(err.to_string()),
            relaysim::Error::InfeasibleBudget(_)
            | relaysim::Error::InsufficientRelays { .. } => CliError::Infeasible(err.to_string()),
            _ => CliError::Internal(err.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Internal(format!("i/o: {err}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(err: csv::Error) -> Self {
        CliError::Internal(format!("csv: {err}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Subset sizes and trial count for a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepParams {
    pub l_min: usize,
    pub l_max: usize,
    pub l_step: usize,
    pub trials: usize,
}

impl SweepParams {
    pub fn l_values(&self) -> Vec<usize> {
        (self.l_min..=self.l_max).step_by(self.l_step).collect()
    }
}

/// Experiment-specific knobs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentParams {
    /// Grid steps swept by the fig3 experiment (one labeled curve each).
    pub d_values: Vec<f64>,
    /// Source powers swept by the fig4 experiment.
    pub source_powers: Vec<f64>,
    /// Destination count for the orchestrate experiment.
    pub destinations: usize,
}

/// A fully resolved experiment configuration with defaults filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub population: PopulationSpec,
    pub scenario: ScenarioConfig,
    pub sweep: SweepParams,
    pub experiment: ExperimentParams,
}

/// Where the config came from, for the manifest.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigMeta {
    pub path: String,
    pub sha256: String,
}

/// A loaded config plus its provenance and any validation warnings.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub meta: ConfigMeta,
    pub warnings: Vec<String>,
}

// ---------------------------------------------------------------------------
// Raw TOML shapes
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    population: RawPopulation,
    scenario: RawScenario,
    sweep: Option<RawSweep>,
    experiment: Option<RawExperiment>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPopulation {
    n_total: usize,
    d: f64,
    motion_split: Option<f64>,
    toward_source: RawHops,
    toward_destination: RawHops,
    relay_power: RawRelayPower,
    relay_noise: RawRelayNoise,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHops {
    h_src: [f64; 2],
    h_dst: [f64; 2],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRelayPower {
    constant: Option<f64>,
    uniform: Option<[f64; 2]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRelayNoise {
    constant: Option<f64>,
    mod3: Option<RawMod3>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMod3 {
    regular: f64,
    every_third: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    source_power: f64,
    y_sq: f64,
    dest_noise_var: f64,
    bandwidth_kbps: Option<f64>,
    total_power_rule: Option<RawPowerRule>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawPowerRule {
    Name(String),
    PerRelay {
        #[serde(rename = "per-relay-watts")]
        watts: f64,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    l_min: Option<usize>,
    l_max: Option<usize>,
    l_step: Option<usize>,
    trials: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    d_values: Option<Vec<f64>>,
    source_powers: Option<Vec<f64>>,
    destinations: Option<usize>,
}

fn interval(name: &str, pair: [f64; 2]) -> CliResult<Interval> {
    if pair[0] > pair[1] {
        return Err(CliError::Config(format!(
            "{name}: interval [{}, {}] is not well-ordered",
            pair[0], pair[1]
        )));
    }
    Ok(Interval::new(pair[0], pair[1]))
}

fn convert(raw: RawConfig) -> CliResult<ExperimentConfig> {
    let relay_power = match (raw.population.relay_power.constant, raw.population.relay_power.uniform)
    {
        (Some(w), None) => RelayPowerSpec::Constant(w),
        (None, Some([lo, hi])) => RelayPowerSpec::Uniform { lo, hi },
        _ => {
            return Err(CliError::Config(
                "population.relay_power: set exactly one of `constant` or `uniform`".into(),
            ))
        }
    };
    let relay_noise = match (raw.population.relay_noise.constant, raw.population.relay_noise.mod3) {
        (Some(v), None) => NoisePattern::Constant(v),
        (None, Some(m)) => {
            NoisePattern::Mod3 { regular: m.regular, every_third: m.every_third }
        }
        _ => {
            return Err(CliError::Config(
                "population.relay_noise: set exactly one of `constant` or `mod3`".into(),
            ))
        }
    };
    let population = PopulationSpec {
        n_total: raw.population.n_total,
        seed: 0, // filled in from the command line at run time
        toward_source: HopIntervals {
            h_src: interval("population.toward_source.h_src", raw.population.toward_source.h_src)?,
            h_dst: interval("population.toward_source.h_dst", raw.population.toward_source.h_dst)?,
        },
        toward_destination: HopIntervals {
            h_src: interval(
                "population.toward_destination.h_src",
                raw.population.toward_destination.h_src,
            )?,
            h_dst: interval(
                "population.toward_destination.h_dst",
                raw.population.toward_destination.h_dst,
            )?,
        },
        d: raw.population.d,
        relay_power,
        relay_noise,
        motion_split: raw.population.motion_split.unwrap_or(0.5),
    };

    let total_power_rule = match raw.scenario.total_power_rule {
        None => TotalPowerRule::MeanRelayPower,
        Some(RawPowerRule::Name(name)) if name == "mean-relay-power" => {
            TotalPowerRule::MeanRelayPower
        }
        Some(RawPowerRule::Name(name)) => {
            return Err(CliError::Config(format!(
                "scenario.total_power_rule: unknown rule `{name}` \
                 (expected \"mean-relay-power\" or {{ per-relay-watts = <w> }})"
            )))
        }
        Some(RawPowerRule::PerRelay { watts }) => TotalPowerRule::PerRelayWatts(watts),
    };
    let scenario = ScenarioConfig {
        source_power: raw.scenario.source_power,
        y_sq: raw.scenario.y_sq,
        dest_noise_var: raw.scenario.dest_noise_var,
        bandwidth_kbps: raw.scenario.bandwidth_kbps.unwrap_or(1.0),
        total_power_rule,
    };

    let sweep_raw = raw.sweep.unwrap_or(RawSweep {
        l_min: None,
        l_max: None,
        l_step: None,
        trials: None,
    });
    let sweep = SweepParams {
        l_min: sweep_raw.l_min.unwrap_or(1),
        l_max: sweep_raw.l_max.unwrap_or_else(|| population.n_total.min(20)),
        l_step: sweep_raw.l_step.unwrap_or(1),
        trials: sweep_raw.trials.unwrap_or(100),
    };

    let experiment_raw = raw.experiment.unwrap_or(RawExperiment {
        d_values: None,
        source_powers: None,
        destinations: None,
    });
    let experiment = ExperimentParams {
        d_values: experiment_raw.d_values.unwrap_or_else(|| vec![population.d]),
        source_powers: experiment_raw
            .source_powers
            .unwrap_or_else(|| vec![scenario.source_power]),
        destinations: experiment_raw.destinations.unwrap_or(3),
    };

    Ok(ExperimentConfig { population, scenario, sweep, experiment })
}

fn validate(config: &ExperimentConfig) -> CliResult<Vec<String>> {
    let warnings = config.population.validate().map_err(|e| CliError::Config(e.to_string()))?;
    config.scenario.validate().map_err(|e| CliError::Config(e.to_string()))?;

    let sweep = &config.sweep;
    if sweep.l_min == 0 || sweep.l_min > sweep.l_max {
        return Err(CliError::Config(format!(
            "sweep: l_min {} and l_max {} must satisfy 1 <= l_min <= l_max",
            sweep.l_min, sweep.l_max
        )));
    }
    if sweep.l_max > config.population.n_total {
        return Err(CliError::Config(format!(
            "sweep.l_max {} exceeds population.n_total {}",
            sweep.l_max, config.population.n_total
        )));
    }
    if sweep.l_step == 0 {
        return Err(CliError::Config("sweep.l_step must be at least 1".into()));
    }
    if sweep.trials == 0 {
        return Err(CliError::Config("sweep.trials must be at least 1".into()));
    }
    if config.experiment.d_values.is_empty() {
        return Err(CliError::Config("experiment.d_values must not be empty".into()));
    }
    if config.experiment.d_values.iter().any(|&d| !(d > 0.0)) {
        return Err(CliError::Config("experiment.d_values entries must be positive".into()));
    }
    if config.experiment.source_powers.is_empty()
        || config.experiment.source_powers.iter().any(|&q| !(q > 0.0))
    {
        return Err(CliError::Config(
            "experiment.source_powers entries must be positive".into(),
        ));
    }
    if config.experiment.destinations == 0 {
        return Err(CliError::Config("experiment.destinations must be at least 1".into()));
    }
    Ok(warnings)
}

/// Load, parse, and validate a config file. Parse errors carry the TOML
/// line/column diagnostics; invariant violations name the offending field.
pub fn load_config(path: &Path) -> CliResult<LoadedConfig> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|e| CliError::Config(format!("{} is not UTF-8: {e}", path.display())))?;
    let raw: RawConfig = toml::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let config = convert(raw)?;
    let warnings = validate(&config)?;
    let sha256 = format!("{:x}", Sha256::digest(&bytes));
    Ok(LoadedConfig {
        config,
        meta: ConfigMeta { path: path.display().to_string(), sha256 },
        warnings,
    })
}
