use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fda_secrecy::config::Experiment;
use fda_secrecy::{execute, CliError};

#[derive(Parser)]
#[command(
    name = "fda-secrecy",
    version,
    about = "Secrecy experiments for artificial-noise directional modulation over frequency diverse arrays"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ergodic secrecy capacity versus Bob's SNR at a fixed Eve location.
    EscSweep(Common),
    /// Correlation magnitude between Bob's and Eve's steering vectors over a grid.
    Heatmap(Common),
    /// Region-averaged secrecy versus the power split for several array sizes.
    AlphaSweep(Common),
    /// Monte Carlo secrecy against its large-array limit.
    Asymptotic(Common),
    /// Continuous against discrete random allocation, averaged over the region.
    MgfCompare(Common),
    /// Power split maximizing region-averaged secrecy.
    OptimizeAlpha(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Overrides the config's `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, args) = match cli.command {
        Command::EscSweep(a) => (Experiment::EscSweep, a),
        Command::Heatmap(a) => (Experiment::Heatmap, a),
        Command::AlphaSweep(a) => (Experiment::AlphaSweep, a),
        Command::Asymptotic(a) => (Experiment::Asymptotic, a),
        Command::MgfCompare(a) => (Experiment::MgfCompare, a),
        Command::OptimizeAlpha(a) => (Experiment::OptimizeAlpha, a),
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.threads {
        if n == 0 {
            return fail(CliError::Config("`--threads` must be >= 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => return fail(CliError::Runtime(format!("cannot start worker threads: {e}"))),
    };
    match pool.install(|| execute(experiment, &args.config, &args.out, args.seed)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("fda-secrecy: {e}");
    ExitCode::from(e.exit_code() as u8)
}
