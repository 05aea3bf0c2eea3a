use clap::{Parser, Subcommand};
use nlcavity_cli::presets::{preset, PRESETS};
use nlcavity_cli::{scenarios, CliError, ScenarioConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "nlcavity", version, about = "Run nonlinear-cavity scenarios and write CSV tables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario from a config file or a named preset.
    Run {
        /// TOML scenario config.
        #[arg(required_unless_present = "preset", conflicts_with = "preset")]
        config: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
        /// Output directory; overrides the config's `output`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List presets, or print one as TOML.
    Presets {
        #[arg(long)]
        show: Option<String>,
    },
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("NLCAVITY_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Config(format!("NLCAVITY_THREADS must be a positive integer, got {v:?}")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CliError::Config(e.to_string()))
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run { config, preset: name, out } => {
            let mut cfg = match (config, name) {
                (Some(path), _) => ScenarioConfig::load(&path)?,
                (None, Some(name)) => preset(&name)?,
                (None, None) => unreachable!("clap requires one of them"),
            };
            if let Some(dir) = out {
                cfg.set_output(dir);
            }
            let report = thread_pool()?.install(|| scenarios::run(&cfg))?;
            report.write(&cfg, cfg.output())?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            println!("{} -> {}", cfg.kind(), cfg.output().display());
        }
        Command::Presets { show: Some(name) } => print!("{}", preset(&name)?.to_toml()?),
        Command::Presets { show: None } => {
            for name in PRESETS {
                println!("{name}\t{}", preset(name)?.kind());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
