use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use relaysim_cli::config::{load_config, CliError};
use relaysim_cli::experiments::{run_experiment, write_failure_record, Experiment, OutputDir};

/// Deterministic cooperative-relay capacity experiments.
#[derive(Parser)]
#[command(name = "relaysim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named experiment and write CSV results plus a run manifest.
    Run {
        /// Which experiment to run.
        #[arg(value_enum)]
        experiment: Experiment,
        /// Path to the TOML configuration file.
        #[arg(long)]
        config: PathBuf,
        /// Master seed; every random draw derives from it.
        #[arg(long)]
        seed: u64,
        /// Output directory (created if missing). The RELAYSIM_OUT
        /// environment variable overrides this when set.
        #[arg(long)]
        out: PathBuf,
        /// Override the config's trial count.
        #[arg(long)]
        trials: Option<usize>,
        /// Override the config's smallest subset size.
        #[arg(long)]
        l_min: Option<usize>,
        /// Override the config's largest subset size.
        #[arg(long)]
        l_max: Option<usize>,
        /// Override the config's subset-size step.
        #[arg(long)]
        l_step: Option<usize>,
    },
    /// Load and validate a configuration file, echoing the effective
    /// values.
    Validate {
        /// Path to the TOML configuration file.
        #[arg(long)]
        config: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), (CliError, Option<PathBuf>)> {
    match cli.command {
        Command::Run { experiment, config, seed, out, trials, l_min, l_max, l_step } => {
            let out = OutputDir::resolve(&out);
            let mut loaded = load_config(&config).map_err(|e| (e, Some(out.path.clone())))?;
            if let Some(trials) = trials {
                loaded.config.sweep.trials = trials;
            }
            if let Some(l_min) = l_min {
                loaded.config.sweep.l_min = l_min;
            }
            if let Some(l_max) = l_max {
                loaded.config.sweep.l_max = l_max;
            }
            if let Some(l_step) = l_step {
                loaded.config.sweep.l_step = l_step;
            }
            let sweep = &loaded.config.sweep;
            if sweep.l_min == 0 || sweep.l_min > sweep.l_max || sweep.l_step == 0 {
                return Err((
                    CliError::Config(format!(
                        "subset sizes l_min {} / l_max {} / l_step {} are not well-formed",
                        sweep.l_min, sweep.l_max, sweep.l_step
                    )),
                    Some(out.path.clone()),
                ));
            }
            if sweep.l_max > loaded.config.population.n_total {
                return Err((
                    CliError::Config(format!(
                        "l_max {} exceeds the population size {}",
                        sweep.l_max, loaded.config.population.n_total
                    )),
                    Some(out.path.clone()),
                ));
            }
            if sweep.trials == 0 {
                return Err((
                    CliError::Config("trials must be at least 1".into()),
                    Some(out.path.clone()),
                ));
            }

            for warning in &loaded.warnings {
                eprintln!("warning: {warning}");
            }
            let manifest = run_experiment(
                experiment,
                &loaded.config,
                &loaded.meta,
                &loaded.warnings,
                seed,
                &out,
            )
            .map_err(|e| (e, Some(out.path.clone())))?;
            println!(
                "{}: wrote {} and manifest.json to {}",
                manifest.scenario,
                manifest.outputs.join(", "),
                manifest.output_dir
            );
            Ok(())
        }
        Command::Validate { config } => {
            let loaded = load_config(&config).map_err(|e| (e, None))?;
            for warning in &loaded.warnings {
                eprintln!("warning: {warning}");
            }
            let echo = serde_json::to_string_pretty(&loaded.config)
                .map_err(|e| (CliError::Internal(e.to_string()), None))?;
            println!("{echo}");
            println!("ok: {} (sha256 {})", loaded.meta.path, loaded.meta.sha256);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err((err, out_dir)) => {
            eprintln!("{err}");
            if let Some(dir) = out_dir {
                write_failure_record(&dir, &err);
            }
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
