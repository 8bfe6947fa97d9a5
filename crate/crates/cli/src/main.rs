use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sinecone_cli::report::write_file;
use sinecone_cli::{
    parse_run, rows_to_csv, run_many, run_suite, run_sweep, CliError, Format, Report, RunOptions, Suite, SweepSpec,
    ALL_SUITES, DEFAULT_RUNS,
};
use sinecone_core::metric_builders::fixture_registry;

#[derive(Parser)]
#[command(name = "sinecone", version, about = "Numerical checks for conformally Einstein cylinders, sine-cones and Gray-Hervella classes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one suite on one fixture.
    Verify {
        suite: String,
        fixture: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Replace every non-count tolerance.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Record wall time (makes output non-reproducible).
        #[arg(long)]
        timing: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep the Case-1 family over a grid of (beta, gamma, r).
    Sweep {
        /// Only `theorem1` is sweepable.
        suite: String,
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        beta: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        gamma: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        r: Vec<f64>,
        /// Base fixture.
        #[arg(long, default_value = "round_sphere_5")]
        fixture: String,
        #[arg(long)]
        match_base: bool,
        #[arg(long)]
        base_scale: Option<f64>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run several suites and write one report.
    Report {
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: PathBuf,
        /// SUITE:FIXTURE, repeatable; defaults to the standard set.
        #[arg(long = "run")]
        runs: Vec<String>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        timing: bool,
    },
    ListFixtures,
    ListSuites,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn emit(body: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(p) => write_file(p, body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn summarize(report: &Report) {
    for s in &report.suites {
        match s.first_failure() {
            None => eprintln!("PASS {} {}", s.suite, s.fixture),
            Some(c) => eprintln!(
                "FAIL {} {}: {} residual {:.3e} > {:.1e}",
                s.suite, s.fixture, c.name, c.max_residual, c.tolerance
            ),
        }
    }
}

fn run(cmd: Command) -> Result<bool, CliError> {
    match cmd {
        Command::Verify { suite, fixture, samples, tol, seed, timing, format, out } => {
            let suite: Suite = suite.parse()?;
            let opts = RunOptions { samples, tol, seed, timing };
            let report = Report::new(seed, vec![run_suite(suite, &fixture, opts)?]);
            emit(&report.render(format), out.as_ref())?;
            summarize(&report);
            Ok(report.passed())
        }
        Command::Sweep { suite, beta, gamma, r, fixture, match_base, base_scale, samples, seed, tol, out } => {
            if suite.parse::<Suite>()? != Suite::Theorem1 {
                return Err(CliError::Usage(format!("suite `{suite}` has no sweep")));
            }
            let spec = SweepSpec { fixture, betas: beta, gammas: gamma, rs: r, samples, seed, tol, base_scale, match_base };
            let rows = run_sweep(&spec)?;
            emit(&rows_to_csv(&rows), out.as_ref())?;
            let failed = rows.iter().filter(|r| !r.passed).count();
            eprintln!("{} of {} rows pass", rows.len() - failed, rows.len());
            Ok(failed == 0)
        }
        Command::Report { format, out, runs, samples, tol, seed, timing } => {
            let runs = if runs.is_empty() {
                DEFAULT_RUNS.iter().map(|(s, f)| (*s, f.to_string())).collect()
            } else {
                runs.iter().map(|r| parse_run(r)).collect::<Result<Vec<_>, _>>()?
            };
            let report = run_many(&runs, RunOptions { samples, tol, seed, timing })?;
            report.write(format, &out)?;
            summarize(&report);
            Ok(report.passed())
        }
        Command::ListFixtures => {
            for f in fixture_registry() {
                println!("{:<24} {:>2}  {}", f.name, f.dim(), f.description);
            }
            Ok(true)
        }
        Command::ListSuites => {
            for s in ALL_SUITES {
                println!("{:<16} {}", s.name(), s.description());
            }
            Ok(true)
        }
    }
}
