use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use log::{error, info, warn};

use schwinger::experiment::{
    cmd_bench_cost, cmd_sweep_dh, cmd_thermalize, cmd_tune_acceptance, ExperimentConfig, ResultTable,
};
use schwinger::integrators::MicroSteps;

#[derive(Parser, Debug)]
#[command(name = "schwinger", version, about = "HMC integrator experiments for the 2D Schwinger model")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Flat `key = value` config; missing keys take the desk or paper-scale defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// 32×32 lattice with 200 samples instead of 8×8 with 50.
    #[arg(long, global = true)]
    paper_scale: bool,

    /// Micro step = macro step / R in the nested schemes.
    #[arg(long, global = true, conflicts_with = "micro_per_call")]
    micro_ratio: Option<f64>,

    /// Fixed number of micro steps per inner call.
    #[arg(long, global = true)]
    micro_per_call: Option<usize>,

    /// Output path: the gauge file for `thermalize`, the CSV otherwise.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Thermalize from a cold start and write the gauge configuration.
    Thermalize,
    /// Mean |ΔH| against step size for every scheme.
    SweepDh,
    /// Inversion cost against achieved |ΔH|, ranked at fixed accuracy targets.
    BenchCost,
    /// Bisect the step size of each scheme to the target acceptance rate.
    TuneAcceptance,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let base = if cli.paper_scale {
        ExperimentConfig::paper()
    } else {
        ExperimentConfig::desk()
    };
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path, &base)?,
        None => base,
    };
    if let Some(seed) = cli.seed {
        cfg.hmc.seed = seed;
    }
    if let Some(r) = cli.micro_ratio {
        cfg.hmc.micro = MicroSteps::Ratio(r);
    }
    if let Some(m) = cli.micro_per_call {
        cfg.hmc.micro = MicroSteps::PerCall(m);
    }
    if let (Command::Thermalize, Some(out)) = (cli.command, &cli.out) {
        cfg.gauge_file = out.clone();
    }
    if let MicroSteps::Ratio(r) = cfg.hmc.micro {
        info!("micro step = h/{r}: {} micro steps per inner call of the nested schemes", (0.5 * r).round());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_table(table: &ResultTable, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => {
            table.save(path).with_context(|| format!("writing {}", path.display()))?;
            info!("wrote {}", path.display());
        }
        None => print!("{}", table.to_csv()?),
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = load_config(cli)?;
    let table = match cli.command {
        Command::Thermalize => {
            let th = cmd_thermalize(&cfg)?;
            println!(
                "{}: plaquette {:.6}, acceptance {:.3}",
                cfg.gauge_file.display(),
                th.plaquettes.last().copied().unwrap_or(1.0),
                th.acceptance
            );
            return Ok(());
        }
        Command::SweepDh => cmd_sweep_dh(&cfg)?,
        Command::BenchCost => cmd_bench_cost(&cfg)?,
        Command::TuneAcceptance => cmd_tune_acceptance(&cfg)?,
    };
    write_table(&table, cli.out.as_ref())?;
    let failed = table.rows.iter().filter(|r| r.is_failed()).count();
    if failed > 0 {
        warn!("{failed} cells failed; see the CSV footer");
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e:#}");
            ExitCode::FAILURE
        }
    }
}
