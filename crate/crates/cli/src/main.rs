use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use deltaclip_cli::{cmd_grid, cmd_run, cmd_verify, CheckStatus, CliError, Options, OUT_ENV};

#[derive(Parser)]
#[command(name = "deltaclip", version, about = "Seeded runs, grids and theory checks for δ-regularized gradient clipping")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory (default: config output_dir, else $DELTACLIP_OUT/<config name>).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Grid cells run concurrently.
    #[arg(long, global = true, value_name = "N", default_value_t = 1)]
    jobs: usize,
    /// Overrides the config seed.
    #[arg(long, global = true, value_name = "S")]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one run; writes trace.csv, report.json, config.json and plot.gp.
    Run { config: PathBuf },
    /// Sweep the config's grid axes; writes one directory per cell and grid_summary.csv.
    Grid { config: PathBuf },
    /// Run and check the theory invariants; exits 1 if any check fails.
    Verify { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = Options {
        out: cli.out,
        jobs: cli.jobs,
        seed: cli.seed,
        env_out: std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from),
    };
    match dispatch(cli.command, &opts) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("deltaclip: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command, opts: &Options) -> Result<u8, CliError> {
    match command {
        Command::Run { config } => {
            let (dir, report) = cmd_run(&config, opts)?;
            println!(
                "{}: {} after {} iterations, final loss {:e} ({})",
                config.display(),
                report.status,
                report.iterations,
                report.final_loss,
                dir.display()
            );
            Ok(0)
        }
        Command::Grid { config } => {
            let (dir, rows) = cmd_grid(&config, opts)?;
            for r in &rows {
                let loss = r.final_loss.map_or("-".to_string(), |l| format!("{l:e}"));
                println!("{:>3} {} {} {}{}", r.rank, r.cell, r.status, loss, if r.best { "  *best" } else { "" });
            }
            println!("summary: {}", dir.join("grid_summary.csv").display());
            Ok(0)
        }
        Command::Verify { config } => {
            let (dir, verdict) = cmd_verify(&config, opts)?;
            for c in &verdict.checks {
                let tag = match c.status {
                    CheckStatus::Pass => "pass",
                    CheckStatus::Fail => "FAIL",
                    CheckStatus::Skipped => "skip",
                };
                let value = c.value.map_or(String::new(), |v| format!(" value={v:e}"));
                println!("{tag:4} {}{value}  {}", c.name, c.note);
            }
            println!("verdict: {} ({})", if verdict.ok { "ok" } else { "failed" }, dir.join("verdict.json").display());
            Ok(if verdict.ok { 0 } else { 1 })
        }
    }
}
