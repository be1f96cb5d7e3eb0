use std::path::PathBuf;
use std::process::ExitCode;

use bandpip::{cmd_evolve, cmd_pip, cmd_validate, load_config, with_threads, CliError, ConventionChoice, RunConfig};
use bandpip_core::LogBase;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "bandpip", version, about = "Qubit dephasing against a random-band environment")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output path prefix; files are named `<prefix>_<kind>.<ext>`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Override the master seed from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Mutual-information convention(s) for `pip`.
    #[arg(long, global = true, value_enum)]
    convention: Option<ConventionChoice>,

    /// Logarithm base for entropies.
    #[arg(long, global = true, value_enum)]
    base: Option<BaseArg>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the master-equation validity criteria and the dephasing rate.
    Validate,
    /// Write the qubit coherence and entropy trajectory.
    Evolve,
    /// Write averaged partial information plots.
    Pip,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BaseArg {
    #[value(name = "2")]
    Two,
    #[value(name = "e")]
    E,
}

fn build_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
    let mut config = load_config(path)?;
    if let Some(seed) = cli.seed {
        config.params.seed = seed;
    }
    if let Some(prefix) = &cli.out {
        config.output.prefix = prefix.clone();
    }
    if let Some(choice) = cli.convention {
        config.pip.conventions = choice;
    }
    if let Some(base) = cli.base {
        config.pip.config.base = match base {
            BaseArg::Two => LogBase::Two,
            BaseArg::E => LogBase::Natural,
        };
    }
    config.validate()?;
    Ok(config)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let config = build_config(cli)?;
    match cli.command {
        Command::Validate => println!("{}", cmd_validate(&config)),
        Command::Evolve => {
            for path in with_threads(cli.threads, || cmd_evolve(&config))?? {
                println!("wrote {}", path.display());
            }
        }
        Command::Pip => {
            for path in with_threads(cli.threads, || cmd_pip(&config))?? {
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bandpip: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
