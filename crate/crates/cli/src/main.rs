use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use wfc_cli::config::{ExperimentConfig, SeedSpec};
use wfc_cli::{experiments, RunError};

/// Wavefunction completion experiments: reconstruct ground states of 1D
/// local Hamiltonians from random partial samples of their amplitudes.
#[derive(Parser)]
#[command(name = "wfc", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: current directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for independent cells.
    #[arg(long)]
    workers: Option<usize>,
    /// Override the config's base seed (mask/instance seeds).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Ground-state singular-value spectra across the central cut.
    Spectra(RunArgs),
    /// Entanglement vs the phase of one unsampled coefficient.
    PhaseSweep(RunArgs),
    /// Exponential fit of two-coefficient completion errors vs system size.
    AlphaFit(RunArgs),
    /// One tensor-completion run with a full convergence trace.
    Complete(RunArgs),
    /// Fidelity error over a (size x rate x seed) grid.
    SweepRates(RunArgs),
    /// SVT vs matrix vs tensor completion on identical masks.
    CompareMethods(RunArgs),
    /// Exact per-coefficient minimization vs the completion algorithm.
    ExactVsAlg(RunArgs),
    /// Solve a ground state and save it as WFC1 + JSON sidecar.
    GenState(RunArgs),
    /// Inspect a WFC1 or WFM1 file.
    Info {
        /// File to inspect.
        path: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Info { path } => experiments::info::run(path).map(|text| println!("{text}")),
        Command::Spectra(a) => dispatch(a, "spectra", experiments::spectra::run),
        Command::PhaseSweep(a) => dispatch(a, "phase-sweep", experiments::phase_sweep::run),
        Command::AlphaFit(a) => dispatch(a, "alpha-fit", experiments::alpha_fit::run),
        Command::Complete(a) => dispatch(a, "complete", experiments::complete::run),
        Command::SweepRates(a) => dispatch(a, "sweep-rates", experiments::sweep_rates::run),
        Command::CompareMethods(a) => dispatch(a, "compare-methods", experiments::compare_methods::run),
        Command::ExactVsAlg(a) => dispatch(a, "exact-vs-alg", experiments::exact_vs_alg::run),
        Command::GenState(a) => dispatch(a, "gen-state", experiments::gen_state::run),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wfc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(
    args: &RunArgs,
    name: &str,
    run: fn(&ExperimentConfig, &std::path::Path) -> Result<Vec<PathBuf>, RunError>,
) -> Result<(), RunError> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    cfg.check_experiment_tag(name)?;
    if let Some(w) = args.workers {
        cfg.workers = Some(w);
    }
    if let Some(seed) = args.seed {
        override_base_seed(&mut cfg, seed);
    }
    let out_dir = args.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let files = run(&cfg, &out_dir)?;
    for f in files {
        println!("{}", f.display());
    }
    Ok(())
}

/// `--seed` re-bases whichever seed list the experiment draws its instances
/// from, keeping list lengths intact.
fn override_base_seed(cfg: &mut ExperimentConfig, seed: u64) {
    let rebase = |spec: &mut Option<SeedSpec>| {
        if let Some(s) = spec {
            let count = s.resolve().len().max(1);
            *spec = Some(SeedSpec::Range { base: seed, count });
        } else {
            *spec = Some(SeedSpec::Range { base: seed, count: 1 });
        }
    };
    match cfg.experiment.as_deref() {
        Some("compare-methods") | Some("phase-sweep") | Some("alpha-fit") => {
            rebase(&mut cfg.ham_seeds)
        }
        _ => rebase(&mut cfg.mask_seeds),
    }
}
