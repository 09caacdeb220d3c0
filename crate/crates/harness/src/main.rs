use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sumscale_core::oracle::{jacobi_eigen, DEFAULT_MAX_SWEEPS, DEFAULT_TOLERANCE};
use sumscale_core::problems::moler_matrix;
use sumscale_harness::emit::{render, sig7, EmitOptions, Format};
use sumscale_harness::runner::{run, run_all, sort_by_value, Row};
use sumscale_harness::verify::{verify, VerifyOptions};
use sumscale_harness::{HarnessError, RunSpec, Start, Suite};

#[derive(Parser)]
#[command(name = "sumscale", version, about = "Run and compare solvers on sumscale problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem and print a result table.
    Run {
        #[arg(long)]
        problem: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "none")]
        reform: String,
        #[arg(long)]
        method: String,
        #[arg(long)]
        gradient: Option<String>,
        /// Box bounds applied to every parameter, as `lo,hi`.
        #[arg(long, value_parser = parse_bounds, allow_hyphen_values = true)]
        bounds: Option<(f64, f64)>,
        /// Draw the start uniformly from this seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "csv")]
        format: String,
        /// Include wall time in CSV output.
        #[arg(long)]
        timing: bool,
    },
    /// Run every entry of a JSON suite file.
    Suite {
        config: PathBuf,
        #[arg(long, default_value = "csv")]
        format: String,
        /// Order rows by value instead of config order.
        #[arg(long)]
        sort: bool,
        #[arg(long)]
        timing: bool,
    },
    /// Print the eigensystem of a Moler matrix.
    Eigen {
        #[arg(long)]
        moler: usize,
    },
    /// Check the reference results.
    Verify { set: String },
}

fn parse_bounds(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(',').ok_or("bounds must be lo,hi")?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("lower bound: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("upper bound: {e}"))?;
    Ok((lo, hi))
}

fn threads() -> Result<Option<usize>, HarnessError> {
    match std::env::var("SUMSCALE_THREADS") {
        Ok(v) => v
            .parse::<usize>()
            .ok()
            .filter(|t| *t > 0)
            .map(Some)
            .ok_or_else(|| HarnessError::Usage(format!("SUMSCALE_THREADS must be a positive integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

fn emit(rows: &[Row], format: &str, timing: bool) -> Result<(), HarnessError> {
    let bytes = render(rows, format.parse::<Format>()?, EmitOptions { timing })?;
    std::io::stdout().write_all(&bytes)?;
    Ok(())
}

fn status(rows: &[Row]) -> ExitCode {
    for row in rows.iter().filter(|r| !r.succeeded()) {
        eprintln!("{}", row.status);
    }
    if rows.iter().all(Row::succeeded) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn execute(cli: Cli) -> Result<ExitCode, HarnessError> {
    match cli.command {
        Command::Run { problem, n, reform, method, gradient, bounds, seed, format, timing } => {
            format.parse::<Format>()?;
            let spec = RunSpec {
                gradient,
                bounds,
                start: seed.map_or(Start::Default, Start::Seeded),
                ..RunSpec::new(&problem, n, &reform, &method)
            };
            let rows = vec![run(&spec)?];
            emit(&rows, &format, timing)?;
            Ok(status(&rows))
        }
        Command::Suite { config, format, sort, timing } => {
            format.parse::<Format>()?;
            let suite = Suite::load(&config)?;
            let mut rows = run_all(&suite.runs, threads()?)?;
            if sort {
                sort_by_value(&mut rows);
            }
            emit(&rows, &format, timing)?;
            Ok(status(&rows))
        }
        Command::Eigen { moler } => {
            let a = moler_matrix(moler)?;
            let e = jacobi_eigen(&a, DEFAULT_TOLERANCE, DEFAULT_MAX_SWEEPS)?;
            let join = |v: &[f64]| v.iter().map(|x| sig7(*x)).collect::<Vec<_>>().join(" ");
            println!("values: {}", join(&e.values));
            println!("minimal eigenvalue = {}", sig7(e.values[0]));
            println!("minimal vector: {}", join(&e.vector(0)));
            println!("maximal eigenvalue = {}", sig7(e.values[moler - 1]));
            println!("maximal vector: {}", join(&e.vector(moler - 1)));
            println!("sweeps: {}", e.sweeps);
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { set } => {
            let results = verify(&set, &VerifyOptions::default())?;
            for r in &results {
                println!("{}", r.line());
            }
            let passed = results.iter().filter(|r| r.passed).count();
            println!("{passed}/{} criteria passed", results.len());
            Ok(if passed == results.len() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
