//! Command-line entry point.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sps_sim::config::{Budget, ConfigFile, GridSpec, RunConfig};
use sps_sim::error::{SimError, EXIT_CONFIG, EXIT_OK, EXIT_VALIDATION_FAILED};
use sps_sim::figures::{run_figure, FigureId};
use sps_sim::sweep::{run_sweep, SweepOutput, SweepSpec};
use sps_sim::validate::{self, Suite};
use sps_sim::{analysis, Result};

#[derive(Debug, Parser)]
#[command(name = "sps-sim", version, about = "Single-photon source simulations: figures, validation and sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every command. Rates are `rate / 2π` in GHz.
#[derive(Debug, Args)]
struct Common {
    /// Emitter-cavity coupling g0/2π (GHz).
    #[arg(long)]
    g0: Option<f64>,
    /// Cavity decay rate κ/2π (GHz).
    #[arg(long)]
    kappa: Option<f64>,
    /// Emitter side-decay rate γ/2π (GHz).
    #[arg(long)]
    gamma: Option<f64>,
    /// Pure dephasing rate γp/2π (GHz).
    #[arg(long = "gamma-p")]
    gamma_p: Option<f64>,
    /// Emitter-cavity detuning in units of g0.
    #[arg(long = "delta-over-g0", allow_hyphen_values = true)]
    delta_over_g0: Option<f64>,
    /// Axis override `min:max:points`, in ns for time axes and GHz for frequency axes.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<GridSpec>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    budget: Option<Budget>,
    /// JSON file with any of the above settings; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Common {
    fn resolve(self) -> Result<RunConfig> {
        let flags = ConfigFile {
            g0_ghz: self.g0,
            kappa_ghz: self.kappa,
            gamma_ghz: self.gamma,
            gamma_p_ghz: self.gamma_p,
            delta_over_g0: self.delta_over_g0,
            seed: self.seed,
            out: self.out,
            budget: self.budget,
            grid: self.grid,
        };
        RunConfig::resolve(self.config.as_deref(), flags)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reproduce one figure: fig2, fig3, fig5, fig6 or fig7.
    Figure {
        id: FigureId,
        #[command(flatten)]
        common: Common,
    },
    /// Run a validation suite: all, coherent, dephasing, spectra or roots.
    Validate {
        suite: Suite,
        #[command(flatten)]
        common: Common,
    },
    /// Tabulate one output quantity over the values of one parameter.
    Sweep {
        /// `name=v1,v2,...` with name one of gamma_p, delta, g0, kappa, gamma.
        #[arg(long = "vary", allow_hyphen_values = true)]
        vary: Vec<SweepSpec>,
        /// eta_q, splittings or fwhm.
        #[arg(long)]
        output: SweepOutput,
        #[command(flatten)]
        common: Common,
    },
    /// Side and forward spectra with the splitting report.
    Spectra {
        /// Divide each channel by its total emitted probability.
        #[arg(long)]
        normalized: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Populations and cumulative emission probabilities over time.
    Dynamics {
        /// Also run a Monte Carlo ensemble of this many trajectories.
        #[arg(long = "monte-carlo")]
        monte_carlo: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("SPS_SIM_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| SimError::config(format!("SPS_SIM_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| SimError::config(format!("cannot configure thread pool: {e}")))
}

fn run(cli: Cli) -> Result<u8> {
    configure_threads()?;
    match cli.command {
        Command::Figure { id, common } => {
            let cfg = common.resolve()?;
            let m = run_figure(id, &cfg)?;
            println!("{id}: wrote {} files to {}", m.files.len() + 1, cfg.out.display());
        }
        Command::Validate { suite, common } => {
            let cfg = common.resolve()?;
            let report = validate::run(suite, cfg.params, cfg.budget, cfg.seed);
            print!("{}", report.table());
            let mut out = sps_sim::output::ArtifactWriter::new(&cfg.out)?;
            let path = out.json(&format!("validate_{suite}.json"), &report)?;
            println!("report: {}", path.display());
            return Ok(if report.ok() { EXIT_OK } else { EXIT_VALIDATION_FAILED });
        }
        Command::Sweep { vary, output, common } => {
            let cfg = common.resolve()?;
            run_sweep(&cfg, &vary, output)?;
            println!("sweep: wrote {}", cfg.out.join("sweep.csv").display());
        }
        Command::Spectra { normalized, common } => {
            let cfg = common.resolve()?;
            analysis::run_spectra(&cfg, normalized)?;
            println!("spectra: wrote {}", cfg.out.join("spectra.csv").display());
        }
        Command::Dynamics { monte_carlo, common } => {
            let cfg = common.resolve()?;
            analysis::run_dynamics(&cfg, monte_carlo)?;
            println!("dynamics: wrote {}", cfg.out.join("dynamics.csv").display());
        }
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
