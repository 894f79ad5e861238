//! `wgeom`: run weighted model-space computations and comparison checks
//! described by JSON scenario files.
//!
//! Exit codes: 0 success, 1 inequality violation, 2 inconclusive,
//! 3 input error. Errors go to standard error prefixed with `wgeom-error:`.

mod commands;
mod error;
mod format;
mod scenario;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{execute, Report, Table};
use error::CliError;
use scenario::{Command, Overrides, Scenario};

#[derive(Debug, Parser)]
#[command(name = "wgeom", version, about = "Weighted model-space geometry toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    /// Relative tolerance for inequality margins.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Number of cells (exit-time, oracle) or radii (compare, sweep).
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Print only the headline result.
    #[arg(long, global = true)]
    quiet: bool,
    /// Write the command's table as CSV to PATH.
    #[arg(long, global = true, value_name = "PATH")]
    csv: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Parabolic or hyperbolic, from the flux integral at infinity.
    Classify(Input),
    /// Capacity of (B_rho, B_R), or of B_rho when R is omitted.
    Capacity(Input),
    /// Weighted ball volume and sphere area.
    Volume(Input),
    /// Isoperimetric quotient Vol/Area.
    Quotient(Input),
    /// Mean exit time of B_R checked against a finite-volume solve.
    ExitTime(Input),
    /// Check a comparison theorem on a radius grid.
    Compare(Input),
    /// Submanifold balance, Simpson check and classification.
    Extrinsic(Input),
    /// Discrete Dirichlet energy against the analytic capacity.
    Oracle(Input),
    /// Per-radius table of volume, area, quotient and capacity.
    Sweep(Input),
    /// Run the command named in the scenario's action section.
    Run(Input),
}

#[derive(Debug, Args)]
struct Input {
    /// Scenario file (JSON).
    #[arg(long = "scenario", visible_alias = "model", value_name = "FILE")]
    scenario: PathBuf,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long = "R", value_name = "R")]
    big_r: Option<f64>,
    #[arg(long)]
    theorem: Option<String>,
    /// Sub-model dimension for `extrinsic`.
    #[arg(long)]
    n: Option<u32>,
}

fn split(sub: Sub) -> (Option<Command>, Input) {
    match sub {
        Sub::Classify(i) => (Some(Command::Classify), i),
        Sub::Capacity(i) => (Some(Command::Capacity), i),
        Sub::Volume(i) => (Some(Command::Volume), i),
        Sub::Quotient(i) => (Some(Command::Quotient), i),
        Sub::ExitTime(i) => (Some(Command::ExitTime), i),
        Sub::Compare(i) => (Some(Command::Compare), i),
        Sub::Extrinsic(i) => (Some(Command::Extrinsic), i),
        Sub::Oracle(i) => (Some(Command::Oracle), i),
        Sub::Sweep(i) => (Some(Command::Sweep), i),
        Sub::Run(i) => (None, i),
    }
}

fn write_csv(path: &Path, table: &Table) -> Result<(), CliError> {
    let wrap = |source| CliError::Csv { path: path.into(), source };
    let mut w = csv::Writer::from_path(path).map_err(wrap)?;
    write_rows(&mut w, table).map_err(wrap)?;
    w.flush().map_err(|e| wrap(e.into()))
}

fn write_rows<W: Write>(w: &mut csv::Writer<W>, table: &Table) -> Result<(), csv::Error> {
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    Ok(())
}

fn render(sc: &Scenario, rep: &Report, quiet: bool) -> Result<(), CliError> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let csv_path = sc.output.csv_path.as_deref().map(Path::new);
    if let (Some(path), Some(table)) = (csv_path, &rep.table) {
        write_csv(path, table)?;
    }
    let emit = |out: &mut std::io::StdoutLock, s: String| {
        // A closed pipe is not worth an error.
        let _ = writeln!(out, "{s}");
    };
    if quiet {
        for p in &rep.primary {
            emit(&mut out, p.clone());
        }
    } else {
        let echo = serde_json::to_string_pretty(sc).expect("scenario serializes");
        emit(&mut out, format!("scenario: {echo}"));
        for (k, v) in &rep.lines {
            emit(&mut out, format!("{k}: {v}"));
        }
        if let (Some(path), Some(_)) = (csv_path, &rep.table) {
            emit(&mut out, format!("csv: {}", path.display()));
        }
    }
    if sc.command() == Command::Sweep && csv_path.is_none() {
        if let Some(table) = &rep.table {
            let mut w = csv::Writer::from_writer(Vec::new());
            write_rows(&mut w, table).expect("in-memory CSV");
            let bytes = w.into_inner().expect("in-memory CSV");
            let _ = out.write_all(&bytes);
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let (command, input) = split(cli.command);
    let overrides = Overrides {
        rho: input.rho,
        big_r: input.big_r,
        theorem: input.theorem,
        n: input.n,
        grid: cli.grid,
        tol: cli.tol,
        csv: cli.csv.map(|p| p.to_string_lossy().into_owned()),
    };
    let sc = Scenario::load(&input.scenario)?.resolve(command, overrides)?;
    let rep = execute(&sc)?;
    render(&sc, &rep, cli.quiet)?;
    Ok(rep.status.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or_default().trim_start_matches("error: ");
            eprintln!("wgeom-error: {first}");
            return ExitCode::from(3);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("wgeom-error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
