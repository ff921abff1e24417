//! Argument parsing and subcommand dispatch.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use dispersive::presets::PRESETS;

use crate::config::{ScenarioConfig, KEYS};
use crate::error::{CliError, EXIT_OK, EXIT_VERIFICATION};
use crate::files::{read_trajectory, write_trajectory, Run};
use crate::ini::Ini;
use crate::{scenario, transform, verify};

#[derive(Debug, Parser)]
#[command(name = "dispflow", version, about = "Dispersive geometric flows, Hasimoto transforms and their verification")]
pub struct Cli {
    /// Scenario file of `key = value` lines with optional [section] headers.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Output directory; overrides output.dir.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Sets one key after the config file is read; repeatable.
    #[arg(long = "override", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,

    /// Seed for randomized presets; overrides the seed key.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,

    /// Log progress to stderr.
    #[arg(long, short, global = true)]
    pub verbose: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve the configured initial data and write trajectory files.
    Evolve,
    /// Write q (and ψ for filaments) along a trajectory directory.
    Transform {
        /// Directory written by `evolve`; defaults to the output directory.
        input: Option<PathBuf>,
    },
    /// Run the enabled checks and write report.json and summary.txt.
    Verify,
    /// List the initial-data presets.
    Presets,
    /// List the configuration keys.
    Keys,
}

pub fn load_config(cli: &Cli) -> Result<ScenarioConfig, CliError> {
    let mut ini = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(format!("reading config {}", path.display()), e))?;
            Ini::parse(&text).map_err(|e| CliError::Config(format!("{}: {}", path.display(), strip_prefix(&e))))?
        }
        None => Ini::default(),
    };
    for pair in &cli.overrides {
        ini.apply_override(pair)?;
    }
    if let Some(seed) = cli.seed {
        ini.apply_override(&format!("seed={seed}"))?;
    }
    let mut cfg = ScenarioConfig::from_ini(&ini)?;
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    Ok(cfg)
}

fn strip_prefix(e: &CliError) -> String {
    match e {
        CliError::Config(m) => m.clone(),
        other => other.to_string(),
    }
}

pub fn presets_text() -> String {
    PRESETS.iter().map(|(name, doc)| format!("{name:<20} {doc}\n")).collect()
}

pub fn keys_text() -> String {
    KEYS.iter().map(|(key, doc)| format!("{key:<28} {doc}\n")).collect()
}

fn transform_dir(input: &Path, out: &Path) -> Result<(), CliError> {
    let (meta, run) = read_trajectory(input)?;
    let s = transform::transform(&meta, &run, out)?;
    println!(
        "wrote q for {} snapshots of {} points to {} (max ||q|^2 - g(u_x,u_x)| {:.3e}{})",
        s.snapshots,
        s.points,
        out.display(),
        s.modulus_gap,
        if s.flags.gauge_uncertain { ", gauge-uncertain" } else { "" }
    );
    if let Some(psi) = &s.psi {
        if psi.undefined.is_empty() {
            println!("wrote psi for every snapshot");
        } else {
            println!(
                "psi omitted for {} snapshots where the Frenet frame is undefined (see transform.json)",
                psi.undefined.len()
            );
        }
    }
    Ok(())
}

/// Runs one subcommand and returns the exit code.
pub fn run(cli: &Cli) -> Result<i32, CliError> {
    match &cli.command {
        Command::Presets => {
            print!("{}", presets_text());
            Ok(EXIT_OK)
        }
        Command::Keys => {
            print!("{}", keys_text());
            Ok(EXIT_OK)
        }
        Command::Evolve => {
            let cfg = load_config(cli)?;
            let (meta, run) = scenario::run(&cfg)?;
            write_trajectory(&cfg.output_dir, &meta, &run)?;
            let drift = match &run {
                Run::Map(t) => t.energy_drift(),
                Run::Filament(t) => {
                    let e0 = t.diagnostics[0].energy;
                    let scale = if e0 == 0.0 { 1.0 } else { e0.abs() };
                    t.diagnostics.iter().map(|d| (d.energy - e0).abs() / scale).fold(0.0, f64::max)
                }
            };
            println!(
                "wrote {} snapshots of {} points to {} (dt {:.6e}, relative energy drift {:.3e})",
                run.times().len(),
                run.grid().len(),
                cfg.output_dir.display(),
                meta.dt,
                drift
            );
            Ok(EXIT_OK)
        }
        Command::Transform { input } => {
            let out_given = cli.out.clone();
            let input = match input {
                Some(dir) => dir.clone(),
                None => load_config(cli)?.output_dir,
            };
            let out = out_given.unwrap_or_else(|| input.clone());
            transform_dir(&input, &out)?;
            Ok(EXIT_OK)
        }
        Command::Verify => {
            let cfg = load_config(cli)?;
            let outcome = verify::verify(&cfg, &cfg.output_dir)?;
            print!("{}", outcome.summary());
            Ok(if outcome.passed { EXIT_OK } else { EXIT_VERIFICATION })
        }
    }
}
