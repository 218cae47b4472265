use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pipeflow::verify::Reference;
use pipeflow_cli::{converge, load_scenario, oracle, riemann, simulate, table_a, Artifacts, CliResult};

/// Wave-front tracking for balance laws on pipes with junction sources.
///
/// Log verbosity follows `RUST_LOG` (default `warn`).
#[derive(Parser)]
#[command(name = "pipeflow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; must not exist unless --force is given.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the scenario's jitter seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Replace an existing output directory.
    #[arg(long)]
    force: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum RefArg {
    Successive,
    Oracle,
}

#[derive(Subcommand)]
enum Command {
    /// Run front tracking at the scenario's h: snapshots, front log, functionals, summary.
    Simulate(Common),
    /// Solve the generalized Riemann problem of a `riemann` datum.
    Riemann(Common),
    /// Refinement study over the scenario's h_list.
    Converge {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "successive")]
        reference: RefArg,
    },
    /// Compare the section-condition momentum derivatives with their closed forms.
    CheckTableA {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        force: bool,
    },
    /// Finite-volume reference for a scenario with smooth geometry.
    Oracle(Common),
}

fn run(cli: Cli) -> CliResult<()> {
    let (artifacts, out, force): (Artifacts, PathBuf, bool) = match cli.command {
        Command::Simulate(c) => (simulate(&load_scenario(&c.config, c.seed)?)?, c.out, c.force),
        Command::Riemann(c) => (riemann(&load_scenario(&c.config, c.seed)?)?, c.out, c.force),
        Command::Converge { common: c, reference } => {
            let r = match reference {
                RefArg::Successive => Reference::Successive,
                RefArg::Oracle => Reference::Oracle,
            };
            (converge(&load_scenario(&c.config, c.seed)?, r)?, c.out, c.force)
        }
        Command::CheckTableA { out, samples, seed, force } => (table_a(samples, seed)?, out, force),
        Command::Oracle(c) => (oracle(&load_scenario(&c.config, c.seed)?)?, c.out, c.force),
    };
    artifacts.write(&out, force)?;
    log::info!("wrote {:?} to {}", artifacts.names(), out.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
