//! Monte Carlo benchmark runner for the waveform designs.
//!
//! Subcommands: `run` a TOML scenario, `reproduce` a named preset,
//! `validate` a scenario without running it, `list-presets`. The worker
//! count comes from the BENCH_WORKERS environment variable; output is
//! deterministic for a fixed (config, seed) regardless of workers.

mod config;
mod presets;
mod runner;
mod summary;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use config::ScenarioConfig;
use presets::{preset, PRESET_IDS};
use runner::{run_scenario, write_csv, write_timings_csv, RefEntry};

#[derive(Parser)]
#[command(name = "bench-cli", about = "Monte Carlo benchmark runner for multi-sine power-transfer waveform designs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a TOML scenario file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides the config's `out`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named preset.
    Reproduce {
        #[arg(long)]
        preset: String,
        /// Override the preset's trial count.
        #[arg(long)]
        trials: Option<usize>,
        /// Override the preset's seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a scenario file and report every problem.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// List the available presets.
    ListPresets,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out } => {
            let text = fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let scenario = ScenarioConfig::parse(&text).context("parsing scenario")?;
            let out_dir = out
                .or_else(|| scenario.out.clone())
                .unwrap_or_else(|| PathBuf::from("bench-results"));
            execute(&scenario, "run", &[], &out_dir)
        }
        Command::Reproduce {
            preset: id,
            trials,
            seed,
            out,
        } => {
            let Some(mut p) = preset(&id) else {
                bail!(
                    "unknown preset {id:?}; available: {}",
                    PRESET_IDS.join(", ")
                );
            };
            if let Some(t) = trials {
                p.config.trials = t;
            }
            if let Some(s) = seed {
                p.config.seed = s;
            }
            let out_dir = out.unwrap_or_else(|| PathBuf::from(format!("bench-results/{id}")));
            println!("# {}: {}", p.id, p.description);
            execute(&p.config, p.id, &p.refs, &out_dir)
        }
        Command::Validate { config } => {
            let text = fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let scenario = ScenarioConfig::parse(&text).context("parsing scenario")?;
            let errors = scenario.validation_errors();
            if errors.is_empty() {
                println!("ok: {} algorithms over {} sweep points, {} trials",
                    scenario.algorithms.len(),
                    runner::expand_points(&scenario).len(),
                    scenario.trials);
                Ok(())
            } else {
                for e in &errors {
                    eprintln!("error: {e}");
                }
                bail!("{} validation error(s)", errors.len());
            }
        }
        Command::ListPresets => {
            for id in PRESET_IDS {
                let p = preset(id).expect("listed preset exists");
                println!("{:8}  {}", p.id, p.description);
            }
            Ok(())
        }
    }
}

fn execute(
    scenario: &ScenarioConfig,
    preset_name: &str,
    refs: &[RefEntry],
    out_dir: &Path,
) -> Result<()> {
    let (rows, summary) = run_scenario(scenario, preset_name, refs)?;
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))?;

    let csv_path = out_dir.join("results.csv");
    let mut csv_buf = Vec::new();
    write_csv(&rows, &mut csv_buf)?;
    fs::write(&csv_path, &csv_buf)?;

    let timing_path = out_dir.join("timings.csv");
    let mut timing_buf = Vec::new();
    write_timings_csv(&rows, &mut timing_buf)?;
    fs::write(&timing_path, &timing_buf)?;

    let json_path = out_dir.join("summary.json");
    fs::write(&json_path, serde_json::to_vec_pretty(&summary)?)?;

    println!(
        "wrote {} rows to {} (+ timings, summary)",
        rows.len(),
        csv_path.display()
    );
    for p in &summary.points {
        let reference = p
            .reference
            .as_ref()
            .map(|r| format!("  [{} {} = {:.4e}]", r.metric, "reference", r.value))
            .unwrap_or_default();
        println!(
            "{:28} {:12} m={:<3} n={:<3} k={:<2} d={:<5} {}  min {:.6e} [{:.3e}, {:.3e}]  sum {:.6e}{}",
            p.algorithm,
            p.variant,
            p.m,
            p.n,
            p.k,
            p.distance_m,
            p.budget,
            p.mean_vout_min,
            p.ci_vout_min[0],
            p.ci_vout_min[1],
            p.mean_vout_sum,
            reference
        );
    }
    Ok(())
}
