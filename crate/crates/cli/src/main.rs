mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::Overrides;

/// Junctionless vertical nanowire FET: I-V curves, inverter transients,
/// cell metrics, parameter fitting and λ-rule footprints.
///
/// Every command writes its outputs plus a `manifest.json` into `--out`.
/// Exit status: 0 on success, 1 for bad input, 2 when a numerical procedure
/// fails.
#[derive(Debug, Parser)]
#[command(name = "vnwfet", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Overrides,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate drain current over a V_GS x V_DS grid.
    Iv(IvArgs),
    /// Transient simulation of an inverter cell or a netlist file.
    Sim(SimArgs),
    /// Static, dynamic and fanout metrics over NF and fanout lists.
    Metrics,
    /// Fit model-card parameters to measured I-V data.
    Fit(FitArgs),
    /// Compare inverter footprints under λ rules.
    Footprint,
}

#[derive(Debug, Args)]
struct IvArgs {
    /// Gate sweep as START:STOP:STEP, volts.
    #[arg(long, default_value = "0.5:-1:-0.01", allow_hyphen_values = true)]
    vgs: String,
    /// Drain biases, volts.
    #[arg(long, value_delimiter = ',', default_value = "-0.05,-1", allow_hyphen_values = true)]
    vds: Vec<f64>,
}

#[derive(Debug, Args)]
struct SimArgs {
    /// JSON netlist; without it an inverter cell is built from the flags.
    #[arg(long)]
    netlist: Option<PathBuf>,
    /// Stop time for netlist runs, seconds.
    #[arg(long)]
    tstop: Option<f64>,
}

#[derive(Debug, Args)]
struct FitArgs {
    /// I-V data, CSV with header `vgs_v,vds_v,id_a`.
    #[arg(long)]
    data: PathBuf,
    /// Fit specification JSON.
    #[arg(long, conflicts_with = "params")]
    spec: Option<PathBuf>,
    /// Free parameters with default bounds, e.g. `eta,mu0`.
    #[arg(long, value_delimiter = ',')]
    params: Vec<String>,
    /// log_current, linear or mixed.
    #[arg(long)]
    weighting: Option<String>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
