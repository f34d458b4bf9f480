//! Command-line driver: one subcommand per experiment family, each taking
//! an optional TOML config file plus individual flag overrides.
//!
//! Precedence, lowest to highest: built-in experiment defaults, then the
//! config file, then flags. The effective configuration is echoed into the
//! `.meta.json` sidecar written next to every output CSV.

use clap::{Args, Parser, Subcommand};
use nqs_lab::harness::{
    execute, load_partial_config, Experiment, PartialSweepConfig, SweepConfig,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "nqs-lab",
    version,
    about = "Ensemble experiments linking deep random networks' order-to-chaos \
             transition with the entanglement scaling of the quantum states \
             they parameterize"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mean-field phase diagram over a σ_w grid (q*, c*, χ, ξ_c per point).
    MeanfieldSweep(CommonArgs),
    /// Ensemble half-chain entropy versus σ_w for several depths.
    EntanglementSweep(CommonArgs),
    /// Ensemble half-chain entropy versus system size for several σ_w.
    ScalingSweep(CommonArgs),
    /// Ensemble ⟨H⟩ and ⟨H²⟩ of a J1–J2 chain versus σ_w.
    EnergySweep(CommonArgs),
    /// Layerwise correlation of wide sampled networks against theory.
    CorrelationCheck(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// TOML config file; keys mirror the sweep configuration fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// σ_w grid as comma-separated values (replaces the default grid).
    #[arg(long = "sigma-w", value_delimiter = ',', num_args = 1..)]
    sigma_w: Option<Vec<f64>>,
    /// System sizes as comma-separated even integers.
    #[arg(long = "L", value_delimiter = ',', num_args = 1..)]
    l: Option<Vec<usize>>,
    /// Network depths as comma-separated integers.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    mu: Option<Vec<usize>>,
    /// Hidden width factor (width = round(alpha · L)).
    #[arg(long)]
    alpha: Option<f64>,
    /// Realizations per grid point (paper-fidelity preset: 1000).
    #[arg(long)]
    realizations: Option<usize>,
    /// Master seed for the whole sweep.
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path.
    #[arg(long)]
    out: Option<String>,
    /// Bias scale σ_b for the mean-field legs.
    #[arg(long = "sigma-b")]
    sigma_b: Option<f64>,
    /// Also dump every per-realization value to <out>.samples.csv.
    #[arg(long)]
    dump_samples: bool,
    /// Append standard-error columns to the ensemble CSVs.
    #[arg(long)]
    standard_error: bool,
}

impl CommonArgs {
    fn into_config(self, experiment: Experiment) -> Result<SweepConfig, nqs_lab::Error> {
        let mut cfg = SweepConfig::default_for(experiment);
        if let Some(path) = &self.config {
            cfg.apply(load_partial_config(path)?);
            // The experiment is fixed by the subcommand; a file key saying
            // otherwise would silently run the wrong sweep.
            if cfg.experiment != experiment {
                return Err(nqs_lab::Error::Config(format!(
                    "config file selects a different experiment than the subcommand ({:?})",
                    cfg.experiment
                )));
            }
        }
        cfg.apply(PartialSweepConfig {
            sigma_w_grid: self.sigma_w,
            l_list: self.l,
            mu_list: self.mu,
            alpha: self.alpha,
            n_realizations: self.realizations,
            master_seed: self.seed,
            sigma_b: self.sigma_b,
            output_path: self.out,
            dump_samples: self.dump_samples.then_some(true),
            standard_error: self.standard_error.then_some(true),
            ..PartialSweepConfig::default()
        });
        Ok(cfg)
    }
}

fn run() -> Result<(), nqs_lab::Error> {
    let cli = Cli::parse();
    let (experiment, args) = match cli.command {
        Command::MeanfieldSweep(a) => (Experiment::MeanFieldSweep, a),
        Command::EntanglementSweep(a) => (Experiment::EntanglementSweep, a),
        Command::ScalingSweep(a) => (Experiment::ScalingSweep, a),
        Command::EnergySweep(a) => (Experiment::EnergySweep, a),
        Command::CorrelationCheck(a) => (Experiment::CorrelationCheck, a),
    };
    let cfg = args.into_config(experiment)?;
    let summary = execute(&cfg)?;
    println!(
        "wrote {} ({} rows) and {}",
        summary.output_path, summary.rows, summary.sidecar_path
    );
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
