use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tippe_top::cli::{self, exit, halt_code, CliError, RunConfig};

#[derive(Parser)]
#[command(name = "tippe", version, about = "Tippe top inversion simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one run and write trajectory, diagnostics, phases and summary.
    Simulate(Common),
    /// Run a batch of initial conditions from the `[sweep]` section.
    Sweep(Common),
    /// Tabulate the effective potential and its minima.
    Potential(Common),
}

#[derive(Args)]
struct Common {
    /// TOML configuration; defaults reproduce the reference top.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Accepted for compatibility; runs are deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

fn load(c: &Common) -> Result<RunConfig, CliError> {
    Ok(match &c.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    })
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Simulate(c) => {
            let cfg = load(&c)?;
            let out = cli::cmd_simulate(&cfg, &c.out)?;
            print!("{}", cli::summary_text(&out.run, &out.report, &cfg.params()?));
            if let Some(h) = out.run.halt {
                eprintln!("halt: reason={} t={}", halt_code(h.reason), h.t);
            }
            Ok(out.exit_code)
        }
        Command::Sweep(c) => {
            let out = cli::cmd_sweep(&load(&c)?, &c.out)?;
            let failed = out.rows.iter().filter(|r| r.status.label() != "completed").count();
            println!(
                "{} runs, {} not completed; wrote {}",
                out.rows.len(),
                failed,
                out.files[0].display()
            );
            Ok(exit::OK)
        }
        Command::Potential(c) => {
            let out = cli::cmd_potential(&load(&c)?, &c.out)?;
            for (d, m) in &out.minima {
                println!(
                    "D = {d:.6e}  z_min = {:.10}  V = {:.6e}{}",
                    m.z,
                    m.value,
                    if m.interior { "" } else { "  (boundary)" }
                );
            }
            Ok(exit::OK)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
