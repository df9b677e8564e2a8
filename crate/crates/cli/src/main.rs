use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use trigen_cli::{explain::explain, pipeline, run_exit_code, write_atomic, CliError, JobConfig, Report, RunOptions};

#[derive(Parser)]
#[command(name = "trigen", version, about = "Construct and certify small generating sets of arithmetic groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every case in a config and write a JSON report.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Cache directory; overrides TRIGEN_CACHE_DIR and the config.
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Summarize a report as a table.
    Explain { report: PathBuf },
    /// Signature, unit rank and theta certificate of one configured field.
    FieldInfo {
        config: PathBuf,
        #[arg(long)]
        field: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("trigen: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(cmd: Command) -> Result<u8, CliError> {
    match cmd {
        Command::Run { config, out, jobs, cache } => {
            let cfg = JobConfig::load(&config)?;
            let report = pipeline::run(&cfg, &RunOptions { jobs, cache_dir: cache })?;
            let text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Input(e.to_string()))?;
            write_atomic(&out, &(text + "\n"))?;
            let s = &report.summary;
            eprintln!(
                "{} jobs: {} pass, {} fail, {} unknown ({} ms)",
                report.jobs.len(),
                s.pass,
                s.fail,
                s.unknown,
                report.timings.total_ms
            );
            let code = run_exit_code(&report);
            if code != 0 {
                eprintln!("trigen: a closure hit its cap; results for those primes are lower bounds");
            }
            Ok(code)
        }
        Command::Explain { report } => {
            print!("{}", explain(&Report::load(&report)?));
            Ok(0)
        }
        Command::FieldInfo { config, field } => {
            print!("{}", pipeline::field_info(&JobConfig::load(&config)?, &field)?);
            Ok(0)
        }
    }
}
