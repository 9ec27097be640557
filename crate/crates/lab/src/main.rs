use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gevrey_lab::config::RawConfig;
use gevrey_lab::error::LabResult;
use gevrey_lab::{runner, suites, sweep};

#[derive(Parser)]
#[command(
    name = "gevrey-lab",
    version,
    about = "Spectral decay experiments for dissipative equations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its CSV and JSON artifacts.
    Run { config: PathBuf },
    /// Run an experiment once per value of a `section.key` parameter.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        param: String,
        /// Comma-separated values; an empty string sweeps nothing.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
    },
    /// Run a built-in verification suite (or `all`).
    Check { suite: String },
}

fn split_values(list: &str) -> Vec<String> {
    list.split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(str::to_string)
        .collect()
}

fn dispatch(cmd: Command) -> LabResult<u8> {
    match cmd {
        Command::Run { config } => {
            let out = runner::run_file(&config)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&out.json).expect("JSON values serialize")
            );
            Ok(out.exit_code() as u8)
        }
        Command::Sweep {
            config,
            param,
            values,
        } => {
            let raw = RawConfig::load(&config)?;
            let entries = sweep::sweep(&raw, &param, &split_values(&values))?;
            let text = serde_json::to_string_pretty(&entries).expect("JSON values serialize");
            println!("{text}");
            Ok(0)
        }
        Command::Check { suite } => Ok(suites::check(&suite)? as u8),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
