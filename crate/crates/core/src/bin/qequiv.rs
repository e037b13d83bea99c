use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use qequiv::scenario::{execute, load_config, Command, ReduceChannel, Scenario, ScenarioError};

#[derive(Parser)]
#[command(
    name = "qequiv",
    version,
    about = "Run reduction, comparison, sieve and trajectory scenarios"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Reduction channel for `reduce` and `run`.
    #[arg(long, global = true, value_enum, default_value_t = ChannelArg::Modified)]
    channel: ChannelArg,

    /// Directory for report.json and CSV files (overrides the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for sieve candidates.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a scenario config and its projector sets.
    Validate { config: String },
    /// Apply one reduction channel and report weights, states and entropies.
    Reduce { config: String },
    /// Run both channels side by side with the equivalence check.
    Compare { config: String },
    /// Pick the candidate projector set that generates the least entropy.
    Sieve { config: String },
    /// Repeated reduction trajectory with the timescale report.
    Run { config: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum ChannelArg {
    Luders,
    Modified,
    Dlp,
}

impl From<ChannelArg> for ReduceChannel {
    fn from(c: ChannelArg) -> Self {
        match c {
            ChannelArg::Luders => ReduceChannel::Luders,
            ChannelArg::Modified => ReduceChannel::Modified,
            ChannelArg::Dlp => ReduceChannel::Dlp,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    match run(&cli) {
        Ok(()) => {
            eprintln!("elapsed {:.3} s", started.elapsed().as_secs_f64());
            ExitCode::SUCCESS
        }
        Err(e) => {
            if let ScenarioError::Config(violations) = &e {
                for v in violations {
                    eprintln!("error: {v}");
                }
            } else {
                eprintln!("error: {e}");
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&e.to_json()).expect("json")
            );
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<(), ScenarioError> {
    let channel = ReduceChannel::from(cli.channel);
    let (source, command) = match &cli.command {
        Cmd::Validate { config } => (config, Command::Validate),
        Cmd::Reduce { config } => (config, Command::Reduce(channel)),
        Cmd::Compare { config } => (config, Command::Compare),
        Cmd::Sieve { config } => (config, Command::Sieve),
        Cmd::Run { config } => (config, Command::Run(channel)),
    };
    let mut config = load_config(source)?;
    if let Some(seed) = cli.seed {
        config.seed = Some(seed);
    }
    let out = cli
        .out
        .clone()
        .or_else(|| config.output.dir.as_ref().map(PathBuf::from));
    let scenario = Scenario::build(config)?;
    let output = execute(&scenario, command, cli.jobs)?;
    print!("{}", output.summary);
    if let Some(dir) = out {
        output
            .write_to(&dir)
            .map_err(|e| ScenarioError::Internal(format!("{}: {e}", dir.display())))?;
        println!("wrote {}", dir.display());
    }
    Ok(())
}
