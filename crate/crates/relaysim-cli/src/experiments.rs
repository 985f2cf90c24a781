//! Named experiments: sweep scenarios, the bound and chain checks, and the
//! multi-destination orchestration, each serialized to CSV with a JSON run
//! manifest alongside.
//!
//! All CSV output is deterministic for a fixed (config, seed, version):
//! rows are written in a fixed order and floats are rendered with Rust's
//! shortest round-trip formatting.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::Rng;
use serde::Serialize;

use relaysim::channel::{verify_snr_bound, DestinationNode, RelayKind, RelayNode, SourceSignal};
use relaysim::orchestrate::{orchestrate_multi_destination, DestinationSpec, LRule};
use relaysim::population::{generate_population, PopulationSpec};
use relaysim::seeds;
use relaysim::selection::{verify_capacity_chain, AllocationConfig};
use relaysim::sweep::{compare_algorithms, sweep_capacity, Algorithm, CellValue, ScenarioConfig};

use crate::config::{CliError, CliResult, ConfigMeta, ExperimentConfig};

/// Substream tags for the experiment driver (disjoint from the library's).
const STREAM_BOUND: u64 = 0x100;
const STREAM_CHAIN_POP: u64 = 0x101;
const STREAM_CHAIN_B1: u64 = 0x102;

/// The named experiments the CLI can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Experiment {
    /// Capacity vs relay count for each configured grid step `d`.
    Fig3,
    /// Capacity vs relay count for each configured source power.
    Fig4,
    /// Five-algorithm comparison plus margin table.
    Fig5,
    /// Per-population capacity ordering of the three selection policies.
    ChainCheck,
    /// Combined-vs-summed SNR comparison on random instances.
    BoundCheck,
    /// Multi-destination selection for one time slot.
    Orchestrate,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Fig3 => "fig3",
            Experiment::Fig4 => "fig4",
            Experiment::Fig5 => "fig5",
            Experiment::ChainCheck => "chain-check",
            Experiment::BoundCheck => "bound-check",
            Experiment::Orchestrate => "orchestrate",
        }
    }
}

/// Everything needed to trace an output row back to its run.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub scenario: String,
    pub config_path: String,
    pub config_sha256: String,
    pub master_seed: u64,
    pub tool_version: String,
    pub timestamp_utc: String,
    pub output_dir: String,
    /// "cli" when `--out` was used directly, "env:RELAYSIM_OUT" when the
    /// environment variable overrode it.
    pub output_dir_source: String,
    pub outputs: Vec<String>,
    /// The fully resolved configuration, defaults included, with the
    /// effective master seed substituted into the population spec.
    pub effective_config: ExperimentConfig,
    pub warnings: Vec<String>,
}

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn csv_writer(path: &Path) -> CliResult<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(CliError::from)
}

struct SweepRowOut {
    l: usize,
    label: String,
    cell: CellValue,
}

fn write_sweep_csv(
    path: &Path,
    rows: &[SweepRowOut],
    trials: usize,
    seed: u64,
) -> CliResult<()> {
    let mut writer = csv_writer(path)?;
    writer.write_record(["L", "label", "mean_capacity_kbps", "trials", "seed"])?;
    for row in rows {
        let value = match &row.cell {
            CellValue::Valid(v) => fmt_f64(*v),
            CellValue::Invalid(_) => "invalid".to_string(),
        };
        writer.write_record([
            row.l.to_string(),
            row.label.clone(),
            value,
            trials.to_string(),
            seed.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

fn flatten_sweep(sweep: &relaysim::sweep::SweepResult, suffix: &str) -> Vec<SweepRowOut> {
    let mut rows = Vec::new();
    for row in &sweep.rows {
        for (label, cell) in sweep.labels.iter().zip(&row.cells) {
            rows.push(SweepRowOut {
                l: row.l,
                label: format!("{label}{suffix}"),
                cell: cell.clone(),
            });
        }
    }
    rows
}

fn run_fig3(
    config: &ExperimentConfig,
    seed: u64,
    out_dir: &Path,
) -> CliResult<Vec<String>> {
    let algorithms = [Algorithm::ProposedB3, Algorithm::TopkB2];
    let l_values = config.sweep.l_values();
    let mut rows = Vec::new();
    for &d in &config.experiment.d_values {
        let spec = PopulationSpec { d, seed, ..config.population.clone() };
        let sweep =
            sweep_capacity(&spec, &config.scenario, &l_values, &algorithms, config.sweep.trials)?;
        rows.extend(flatten_sweep(&sweep, &format!("[d={d}]")));
    }
    write_sweep_csv(&out_dir.join("sweep.csv"), &rows, config.sweep.trials, seed)?;
    Ok(vec!["sweep.csv".into()])
}

fn run_fig4(
    config: &ExperimentConfig,
    seed: u64,
    out_dir: &Path,
) -> CliResult<Vec<String>> {
    let algorithms = [Algorithm::ProposedB3, Algorithm::TopkB2];
    let l_values = config.sweep.l_values();
    let spec = PopulationSpec { seed, ..config.population.clone() };
    let mut rows = Vec::new();
    for &q_src in &config.experiment.source_powers {
        let scenario = ScenarioConfig { source_power: q_src, ..config.scenario.clone() };
        let sweep = sweep_capacity(&spec, &scenario, &l_values, &algorithms, config.sweep.trials)?;
        rows.extend(flatten_sweep(&sweep, &format!("[q_src={q_src}W]")));
    }
    write_sweep_csv(&out_dir.join("sweep.csv"), &rows, config.sweep.trials, seed)?;
    Ok(vec!["sweep.csv".into()])
}

fn run_fig5(
    config: &ExperimentConfig,
    seed: u64,
    out_dir: &Path,
) -> CliResult<Vec<String>> {
    let spec = PopulationSpec { seed, ..config.population.clone() };
    let comparison =
        compare_algorithms(&spec, &config.scenario, &config.sweep.l_values(), config.sweep.trials)?;
    let rows = flatten_sweep(&comparison.sweep, "");
    write_sweep_csv(&out_dir.join("sweep.csv"), &rows, config.sweep.trials, seed)?;

    let mut writer = csv_writer(&out_dir.join("margins.csv"))?;
    writer.write_record(["L", "baseline_label", "margin_kbps"])?;
    for margin in &comparison.margins {
        writer.write_record([
            margin.l.to_string(),
            margin.baseline.clone(),
            fmt_f64(margin.margin_kbps),
        ])?;
    }
    writer.flush()?;
    Ok(vec!["sweep.csv".into(), "margins.csv".into()])
}

/// Subset sizes exercised by the chain check, clipped to the population.
fn chain_l_values(n_total: usize) -> Vec<usize> {
    [2usize, 4, 8, 12, 16].into_iter().filter(|&l| l <= n_total).collect()
}

fn run_chain_check(
    config: &ExperimentConfig,
    seed: u64,
    out_dir: &Path,
) -> CliResult<Vec<String>> {
    let source = config.scenario.source_signal()?;
    let dest = config.scenario.destination()?;
    let l_values = chain_l_values(config.population.n_total);
    if l_values.is_empty() {
        return Err(CliError::Infeasible(format!(
            "population of {} relays is too small for the chain check",
            config.population.n_total
        )));
    }

    let path = out_dir.join("chain.csv");
    let mut writer = csv_writer(&path)?;
    writer.write_record([
        "population",
        "L",
        "c_b3_kbps",
        "c_b2_kbps",
        "c_b1_mean_kbps",
        "chain_holds",
    ])?;
    for trial in 0..config.sweep.trials {
        let pop_seed = seeds::derive_seed(seed, &[STREAM_CHAIN_POP, trial as u64]);
        let pool = generate_population(&config.population.with_seed(pop_seed))?;
        for &l in &l_values {
            let total = config.scenario.total_power(l, &config.population);
            let report = verify_capacity_chain(
                &source,
                &pool,
                &dest,
                l,
                total,
                &AllocationConfig::for_budget(total),
                config.scenario.bandwidth_kbps,
                200,
                seeds::derive_seed(seed, &[STREAM_CHAIN_B1, trial as u64, l as u64]),
            )?;
            writer.write_record([
                trial.to_string(),
                l.to_string(),
                fmt_f64(report.c_b3_kbps),
                fmt_f64(report.c_b2_kbps),
                fmt_f64(report.c_b1_mean_kbps),
                report.chain_holds.to_string(),
            ])?;
        }
    }
    writer.flush()?;
    Ok(vec!["chain.csv".into()])
}

/// One random instance for the bound check, drawn from its own substream.
pub fn bound_instance(seed: u64, index: u64, y_sq: f64) -> (SourceSignal, Vec<RelayNode>) {
    let mut rng = seeds::substream(seed, &[STREAM_BOUND, index]);
    let l = rng.gen_range(1..=20usize);
    let source_power = rng.gen_range(1.0..=25.0);
    let source = SourceSignal::from_y_sq(y_sq, source_power).expect("valid source");
    let relays = (1..=l as u32)
        .map(|id| RelayNode {
            id,
            kind: RelayKind::Vehicle,
            h_src: rng.gen_range(0.01..=1.0),
            h_dst: rng.gen_range(0.01..=1.0),
            power: rng.gen_range(1.0..=25.0),
            min_power: 0.0,
            // Strictly positive: 2 * (1 - u) with u in [0, 1).
            noise_var: 2.0 * (1.0 - rng.gen::<f64>()),
        })
        .collect();
    (source, relays)
}

fn run_bound_check(
    config: &ExperimentConfig,
    seed: u64,
    out_dir: &Path,
) -> CliResult<Vec<String>> {
    let path = out_dir.join("bound.csv");
    let mut writer = csv_writer(&path)?;
    writer.write_record([
        "instance",
        "L",
        "combined_snr",
        "summed_snr",
        "holds",
        "sum_of_squares_lhs",
        "sum_of_squares_rhs",
        "sum_of_squares_holds",
        "cauchy_schwarz_lhs",
        "cauchy_schwarz_rhs",
        "cauchy_schwarz_holds",
    ])?;
    let dest = DestinationNode::noiseless();
    for instance in 0..config.sweep.trials {
        let (source, relays) = bound_instance(seed, instance as u64, config.scenario.y_sq);
        let report = verify_snr_bound(&source, &relays, &dest)?;
        let mut record = vec![
            instance.to_string(),
            relays.len().to_string(),
            fmt_f64(report.combined),
            fmt_f64(report.summed),
            report.holds.to_string(),
        ];
        for step in &report.steps {
            record.push(fmt_f64(step.lhs));
            record.push(fmt_f64(step.rhs));
            record.push(step.holds.to_string());
        }
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(vec!["bound.csv".into()])
}

fn run_orchestrate(
    config: &ExperimentConfig,
    seed: u64,
    out_dir: &Path,
) -> CliResult<Vec<String>> {
    let spec = PopulationSpec { seed, ..config.population.clone() };
    let destinations: Vec<DestinationSpec> = (1..=config.experiment.destinations as u64)
        .map(|id| {
            DestinationNode::new(config.scenario.dest_noise_var)
                .map(|node| DestinationSpec { id, node })
        })
        .collect::<Result<_, _>>()?;
    let rule = LRule::BestInRange { lo: config.sweep.l_min, hi: config.sweep.l_max };
    let outcomes = orchestrate_multi_destination(&spec, &config.scenario, &destinations, &rule)?;

    let path = out_dir.join("orchestrate.csv");
    let mut writer = csv_writer(&path)?;
    writer.write_record([
        "destination",
        "status",
        "chosen_l",
        "capacity_kbps",
        "relay_ids",
        "powers_w",
    ])?;
    for outcome in &outcomes {
        match &outcome.link {
            Ok(link) => {
                let ids = link
                    .selection
                    .relay_ids
                    .iter()
                    .fold(String::new(), |mut acc, id| {
                        if !acc.is_empty() {
                            acc.push(';');
                        }
                        let _ = write!(acc, "{id}");
                        acc
                    });
                let powers = link.selection.powers.iter().fold(String::new(), |mut acc, p| {
                    if !acc.is_empty() {
                        acc.push(';');
                    }
                    let _ = write!(acc, "{p}");
                    acc
                });
                writer.write_record([
                    outcome.dest_id.to_string(),
                    "ok".to_string(),
                    link.l.to_string(),
                    fmt_f64(link.capacity_kbps),
                    ids,
                    powers,
                ])?;
            }
            Err(err) => {
                writer.write_record([
                    outcome.dest_id.to_string(),
                    format!("invalid: {err}"),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                ])?;
            }
        }
    }
    writer.flush()?;
    Ok(vec!["orchestrate.csv".into()])
}

/// Where the output directory came from.
#[derive(Debug, Clone)]
pub struct OutputDir {
    pub path: PathBuf,
    pub source: String,
}

impl OutputDir {
    /// Resolve the output directory: the `RELAYSIM_OUT` environment
    /// variable overrides the command-line value when set.
    pub fn resolve(cli_value: &Path) -> Self {
        match std::env::var_os("RELAYSIM_OUT") {
            Some(dir) if !dir.is_empty() => OutputDir {
                path: PathBuf::from(dir),
                source: "env:RELAYSIM_OUT".to_string(),
            },
            _ => OutputDir { path: cli_value.to_path_buf(), source: "cli".to_string() },
        }
    }
}

/// Run one experiment end to end: execute, write CSVs, then write
/// `manifest.json`. Hard configuration errors abort before any output file
/// is created.
pub fn run_experiment(
    experiment: Experiment,
    config: &ExperimentConfig,
    meta: &ConfigMeta,
    warnings: &[String],
    seed: u64,
    out: &OutputDir,
) -> CliResult<RunManifest> {
    std::fs::create_dir_all(&out.path)?;
    let outputs = match experiment {
        Experiment::Fig3 => run_fig3(config, seed, &out.path)?,
        Experiment::Fig4 => run_fig4(config, seed, &out.path)?,
        Experiment::Fig5 => run_fig5(config, seed, &out.path)?,
        Experiment::ChainCheck => run_chain_check(config, seed, &out.path)?,
        Experiment::BoundCheck => run_bound_check(config, seed, &out.path)?,
        Experiment::Orchestrate => run_orchestrate(config, seed, &out.path)?,
    };

    let mut effective_config = config.clone();
    effective_config.population.seed = seed;
    let timestamp_utc = time::OffsetDateTime::now_utc()
        .format(&time::format_description::well_known::Rfc3339)
        .unwrap_or_else(|_| "unknown".to_string());
    let manifest = RunManifest {
        scenario: experiment.name().to_string(),
        config_path: meta.path.clone(),
        config_sha256: meta.sha256.clone(),
        master_seed: seed,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp_utc,
        output_dir: out.path.display().to_string(),
        output_dir_source: out.source.clone(),
        outputs,
        effective_config,
        warnings: warnings.to_vec(),
    };
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CliError::Internal(format!("manifest serialization: {e}")))?;
    std::fs::write(out.path.join("manifest.json"), json)?;
    Ok(manifest)
}

/// Best-effort machine-readable failure record next to the outputs.
pub fn write_failure_record(out_dir: &Path, err: &CliError) {
    #[derive(Serialize)]
    struct FailureRecord<'a> {
        error: String,
        exit_code: i32,
        kind: &'a str,
    }
    let record = FailureRecord {
        error: err.to_string(),
        exit_code: err.exit_code(),
        kind: match err {
            CliError::Config(_) => "config",
            CliError::Infeasible(_) => "infeasible",
            CliError::Internal(_) => "internal",
        },
    };
    if std::fs::create_dir_all(out_dir).is_ok() {
        if let Ok(json) = serde_json::to_string_pretty(&record) {
            let _ = std::fs::write(out_dir.join("failure.json"), json);
        }
    }
}
