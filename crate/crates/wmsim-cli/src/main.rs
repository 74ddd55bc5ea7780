//! `wmsim`: weak-measurement experiments from the command line.
//!
//! Exit codes: 0 success, 2 flag/precondition errors, 3 numerical
//! non-convergence. Identical argv + seed produce byte-identical output
//! files regardless of --threads; wall-clock timing goes to stderr only.

// `!(x > 0.0)` rejects NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod output;

use clap::{Parser, Subcommand};
use commands::{classical_sym, dot_s3, dwell, junction, scans, selftest, CliError};
use output::{emit, render, Format};
use std::path::PathBuf;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "wmsim", version, about = "Sequential weak-measurement simulations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Output path (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long, global = true, default_value_t = 20260809)]
    seed: u64,
    /// Worker-thread cap (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Run this subcommand's built-in sanity checks instead of the command.
    #[arg(long, global = true)]
    selftest: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Three-point double-well correlator: analytic, superoperator or MC.
    DwellCorr(dwell::DwellCorrArgs),
    /// Forward vs time-reversed double-well outcome tables and Δ_T.
    DwellAsym(dwell::DwellAsymArgs),
    /// Occupation third cumulant S₃ᴺ(ω, ω′) of the resonant-level dot.
    DotS3(dot_s3::DotS3Args),
    /// Junction detector quantities and operating-regime report.
    Junction(junction::JunctionArgs),
    /// Forward vs reversed classical moments on an equilibrium ensemble.
    ClassicalSym(classical_sym::ClassicalSymArgs),
    /// Back-action scaling in g, quantum or classical.
    DisturbanceScan(scans::DisturbanceScanArgs),
    /// Time asymmetry vs measurement window width.
    SmoothingScan(scans::SmoothingScanArgs),
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::DwellCorr(_) => "dwell-corr",
            Cmd::DwellAsym(_) => "dwell-asym",
            Cmd::DotS3(_) => "dot-s3",
            Cmd::Junction(_) => "junction",
            Cmd::ClassicalSym(_) => "classical-sym",
            Cmd::DisturbanceScan(_) => "disturbance-scan",
            Cmd::SmoothingScan(_) => "smoothing-scan",
        }
    }

    fn selftest_checks(&self) -> Vec<(&'static str, bool)> {
        match self {
            Cmd::DwellCorr(_) => selftest::dwell_corr_checks(),
            Cmd::DwellAsym(_) => selftest::dwell_asym_checks(),
            Cmd::DotS3(_) => selftest::dot_s3_checks(),
            Cmd::Junction(_) => selftest::junction_checks(),
            Cmd::ClassicalSym(_) => selftest::classical_sym_checks(),
            Cmd::DisturbanceScan(_) => selftest::disturbance_scan_checks(),
            Cmd::SmoothingScan(_) => selftest::smoothing_scan_checks(),
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Validation("--threads must be ≥ 1".into()));
        }
        // ignore the error if a pool already exists (e.g. repeated in-process runs)
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }

    if cli.selftest {
        let ok = selftest::report(cli.cmd.name(), &cli.cmd.selftest_checks());
        if !ok {
            return Err(CliError::Validation("selftest failed".into()));
        }
        return Ok(());
    }

    let started = Instant::now();
    let (table, meta) = match &cli.cmd {
        Cmd::DwellCorr(args) => dwell::dwell_corr(args, cli.seed)?,
        Cmd::DwellAsym(args) => dwell::dwell_asym(args, cli.seed)?,
        Cmd::DotS3(args) => dot_s3::dot_s3(args, cli.seed)?,
        Cmd::Junction(args) => junction::junction(args, cli.seed)?,
        Cmd::ClassicalSym(args) => classical_sym::classical_sym(args, cli.seed)?,
        Cmd::DisturbanceScan(args) => scans::disturbance_scan(args, cli.seed)?,
        Cmd::SmoothingScan(args) => scans::smoothing_scan(args, cli.seed)?,
    };
    let content = render(&table, &meta, cli.format);
    emit(&content, cli.out.as_deref())?;
    eprintln!(
        "# {} finished in {} ms",
        meta.subcommand,
        started.elapsed().as_millis()
    );
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
