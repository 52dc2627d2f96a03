use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use hhgqo_core::config::RunConfig;
use hhgqo_core::oracle;
use hhgqo_core::pipeline::{Pipeline, RunManifest, Stage};
use hhgqo_core::Error;

/// Quantum-optical HHG in two-centre molecules: batch runner.
#[derive(Debug, Parser)]
#[command(name = "hhgqo", version, about)]
struct Cli {
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides run.output_dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweep points (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Trace cache directory (overrides run.cache_dir).
    #[arg(long, global = true, env = "HHGQO_CACHE")]
    cache: Option<PathBuf>,
    /// Seed for randomized checks (overrides run.seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Propagate the molecule and cache the dipole traces.
    Dipole,
    /// Per-mode photon numbers from cached traces.
    Spectrum,
    /// Wigner maps and Wigner maxima from cached traces.
    Wigner,
    /// Entropies and negativity bounds from cached traces.
    Entangle,
    /// Every stage, producing traces when needed.
    Run,
    /// Recompute a reference example with the dense oracle.
    Oracle {
        /// Case identifier; omit to list the available cases.
        #[arg(long)]
        case: Option<String>,
    },
    /// Check a configuration file without running anything.
    ValidateConfig,
}

fn load_config(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.run.seed = seed;
    }
    Ok(cfg)
}

fn pipeline(cli: &Cli) -> Result<Pipeline, Error> {
    let cfg = load_config(cli)?;
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.run.output_dir));
    let cache = cli.cache.clone().unwrap_or_else(|| PathBuf::from(&cfg.run.cache_dir));
    Pipeline::new(cfg, out, cache)
}

fn report(m: &RunManifest, out: &std::path::Path) {
    for f in &m.outputs {
        println!("{}  {}", &f.sha256[..16], out.join(&f.path).display());
    }
    for v in m.validity.iter().filter(|v| !v.perturbative || !v.truncation_ok) {
        eprintln!(
            "warning: R = {:.3}, N_mol = {}: N_a = {:.3e}, max|mu_ab|/max|mu_bb| = {:.3} outside the first-order regime",
            v.r_au, v.n_mol, v.norm_na, v.truncation.peak_ratio
        );
    }
}

fn execute(cli: &Cli) -> Result<(), Error> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("cannot start {n} threads: {e}")))?;
    }
    let stage = match &cli.command {
        Command::ValidateConfig => {
            let cfg = load_config(cli)?;
            println!("OK: config {} is valid", cfg.hash());
            return Ok(());
        }
        Command::Oracle { case } => {
            let seed = load_config(cli)?.run.seed;
            match case {
                None => oracle::CASE_IDS.iter().for_each(|id| println!("{id}")),
                Some(id) => {
                    let r = oracle::run_case(id, seed)?;
                    let json = serde_json::json!({
                        "id": r.id,
                        "description": r.description,
                        "expected": r.expected,
                        "oracle": r.oracle,
                        "abs_diff": r.abs_diff(),
                    });
                    println!("{}", serde_json::to_string_pretty(&json).expect("plain JSON"));
                }
            }
            return Ok(());
        }
        Command::Dipole => Some(Stage::Dipole),
        Command::Spectrum => Some(Stage::Spectrum),
        Command::Wigner => Some(Stage::Wigner),
        Command::Entangle => Some(Stage::Entangle),
        Command::Run => None,
    };
    let p = pipeline(cli)?;
    let manifest = match stage {
        Some(s) => p.run_stage(s)?,
        None => p.run()?,
    };
    report(&manifest, &p.out_dir);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 3 })
        }
    }
}
