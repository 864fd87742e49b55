use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use vecsim::harness::{
    compare_policies, oracle_check, output_root, run_experiment, write_csv, ExperimentSpec, Manifest, Mode,
};
use vecsim::learner::TrainerConfig;
use vecsim::policy::PolicyKind;

/// Speed-aware task offloading simulator with multi-agent training.
#[derive(Parser)]
#[command(name = "vecsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment file (TOML). Built-in defaults when omitted.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Output directory; overrides VECSIM_OUT and the file's `output_dir`.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Comma-separated seeds, e.g. `0,1,2`.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
}

#[derive(Subcommand)]
enum Command {
    /// Train the learned policy at every sweep point and seed, then evaluate it.
    Train {
        #[command(flatten)]
        common: Common,
        /// Full-size networks and episode count.
        #[arg(long)]
        full_scale: bool,
        /// Override the number of training episodes.
        #[arg(long)]
        episodes: Option<usize>,
    },
    /// Evaluate policies (al, av, rd, edg, learned) and write metrics.
    Evaluate {
        #[command(flatten)]
        common: Common,
        /// Comma-separated policies; defaults to the file's list.
        #[arg(long, value_delimiter = ',')]
        policy: Option<Vec<PolicyKind>>,
    },
    /// Paired per-seed comparison of policies against a baseline.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "learned,al,av,edg")]
        policy: Vec<PolicyKind>,
        #[arg(long, default_value = "rd")]
        baseline: PolicyKind,
    },
    /// Check the baselines against the exhaustive optimizer on small random cells.
    OracleCheck {
        #[arg(long, default_value_t = 200)]
        instances: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print an experiment file with every key at its default value.
    DefaultConfig,
}

fn load_spec(common: &Common) -> Result<(ExperimentSpec, PathBuf)> {
    let mut spec = match &common.config {
        Some(path) => ExperimentSpec::load(path)?,
        None => ExperimentSpec::default(),
    };
    if let Some(seeds) = &common.seeds {
        spec.seeds = seeds.clone();
    }
    let root = match &common.out {
        Some(out) => out.clone(),
        None => output_root(&spec.output_dir),
    };
    Ok((spec, root))
}

fn report(manifest: &Manifest, root: &Path) -> ExitCode {
    for run in &manifest.runs {
        match &run.error {
            None => println!("ok      {} {} seed {}", run.point, run.policy, run.seed),
            Some(e) => println!("FAILED  {} {} seed {}: {e}", run.point, run.policy, run.seed),
        }
    }
    println!("manifest: {}", root.join("manifest.json").display());
    if manifest.has_failures() {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Train {
            common,
            full_scale,
            episodes,
        } => {
            let (mut spec, root) = load_spec(&common)?;
            if full_scale {
                spec.trainer = TrainerConfig {
                    seed: spec.trainer.seed,
                    ..TrainerConfig::full_scale()
                };
            }
            if let Some(n) = episodes {
                spec.trainer.episodes = n;
            }
            let manifest = run_experiment(&spec, &root, Mode::Train)?;
            Ok(report(&manifest, &root))
        }
        Command::Evaluate { common, policy } => {
            let (mut spec, root) = load_spec(&common)?;
            if let Some(p) = policy {
                spec.policies = p;
            }
            let manifest = run_experiment(&spec, &root, Mode::Evaluate)?;
            Ok(report(&manifest, &root))
        }
        Command::Compare {
            common,
            policy,
            baseline,
        } => {
            let (spec, root) = load_spec(&common)?;
            let points: Vec<String> = spec.points().into_iter().map(|p| p.label).collect();
            let table = compare_policies(&root, &points, &spec.seeds, &policy, baseline)?;
            let path = root.join(format!("comparison_vs_{baseline}.csv"));
            write_csv(&path, &table.rows).with_context(|| path.display().to_string())?;
            println!(
                "{:<16} {:<8} {:>14} {:>14} {:>10} {:>10}",
                "point", "policy", "energy_j", "delta_j", "delay", "viol"
            );
            for r in &table.rows {
                println!(
                    "{:<16} {:<8} {:>14.6e} {:>14.6e} {:>10.2} {:>10.3}  ({}/{} seeds not worse)",
                    r.point,
                    r.policy,
                    r.energy_j,
                    r.delta_energy_j,
                    r.delay_ttis,
                    r.violation_rate,
                    r.energy_not_worse,
                    r.seeds
                );
            }
            println!("written: {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::OracleCheck { instances, seed } => {
            let r = oracle_check(instances, seed);
            println!(
                "{} instances, {} feasible, {} baseline decisions compared, {} single-vehicle greedy checks",
                r.instances, r.feasible, r.comparisons, r.single_vehicle_checked
            );
            for line in r.dominance_failures.iter().chain(&r.greedy_mismatches) {
                println!("FAILED  {line}");
            }
            if !r.passed() {
                bail!("oracle check failed");
            }
            println!("ok");
            Ok(ExitCode::SUCCESS)
        }
        Command::DefaultConfig => {
            print!("{}", ExperimentSpec::default().to_toml_string());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
