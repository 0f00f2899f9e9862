//! Command-line front end for the `liouville-ep` crate.
//!
//! Each subcommand evaluates one sweep and writes a single table as CSV
//! (a `# params:` comment line, a header row, one row per grid point and
//! trailing `# summary:` lines) or as JSON.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure. Errors go to
//! stderr as one JSON object per line.

pub mod config;
pub mod error;
pub mod grid;
pub mod run;
pub mod table;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use config::{resolve_jobs, Cli, Format, Method, Subcommand, SweepConfig, JOBS_ENV};
pub use error::CliError;
pub use grid::{GridSpec, Spacing};
pub use run::run;
pub use table::{Cell, Table};

pub fn render(table: &Table, format: Format) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    }
}

/// Run `config` on a pool of `jobs` threads and write the artifact.
pub fn execute(config: &SweepConfig, jobs: usize) -> Result<(), CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let table = pool.install(|| run(config))?;
    let text = render(&table, config.output);
    match &config.out_path {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

/// Full program: parse `args`, run, report. Returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return 0;
        }
        Err(e) => return report(&CliError::Usage(e.render().to_string())),
    };
    let env = std::env::var(JOBS_ENV).ok();
    let outcome = resolve_jobs(cli.jobs, env.as_deref())
        .and_then(|jobs| SweepConfig::from_cli(&cli).map(|c| (c, jobs)))
        .and_then(|(config, jobs)| execute(&config, jobs));
    match outcome {
        Ok(()) => 0,
        Err(e) => report(&e),
    }
}

fn report(e: &CliError) -> i32 {
    eprintln!("{}", e.record());
    e.exit_code()
}
