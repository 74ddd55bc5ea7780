//! `disturbance-scan`: fit the g² law of the measurement back-action, for
//! the quantum tables (exact) and the classical ensembles (paired Monte
//! Carlo). `smoothing-scan`: decay of the time asymmetry with measurement
//! window width.

use super::{params_map, CliError};
use crate::output::{Cell, Meta, Table};
use clap::{Args, ValueEnum};
use wmsim_core::classical::{
    estimate_moments, run_experiment, ClassicalDetectorSpec, ClassicalObservable,
    ClassicalProtocol, ClassicalSystem, Parity, PhaseEnsemble, Potential, ProtocolStep,
};
use wmsim_core::models::{dwell_model, DoubleWellParams};
use wmsim_core::moments::SampleBatch;
use wmsim_core::quantum::{
    marginalize, quasiprob, smoothed_observable, thermal_state, time_reversed_quasiprob,
    MeasurementPlan, Observable,
};

pub const SCAN_STRENGTHS: [f64; 4] = [0.4, 0.2, 0.1, 0.05];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScanDomain {
    Quantum,
    Classical,
}

#[derive(Debug, Args)]
pub struct DisturbanceScanArgs {
    #[arg(long, value_enum, default_value_t = ScanDomain::Quantum)]
    pub domain: ScanDomain,
    #[arg(long, default_value_t = 1.0)]
    pub eps: f64,
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    /// Temperature of the initial thermal state (both domains).
    #[arg(long, default_value_t = 0.1)]
    pub kt: f64,
    /// Trajectories per strength (classical domain).
    #[arg(long, default_value_t = 200_000)]
    pub trajectories: usize,
    /// Leapfrog timestep (classical domain).
    #[arg(long, default_value_t = 2e-3)]
    pub dt: f64,
}

fn fit_loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(g, d) in points {
        let x = g.ln();
        let y = d.ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

fn quantum_disturbance(args: &DisturbanceScanArgs, g: f64) -> Result<f64, CliError> {
    let p = DoubleWellParams::new(args.eps, args.tau, args.kt)?;
    let (h, z) = dwell_model(&p);
    let x = Observable::new(wmsim_core::linalg::ComplexMatrix::from_fn(2, |i, j| {
        if i != j {
            wmsim_core::linalg::C64::new(1.0, 0.0)
        } else {
            wmsim_core::linalg::C64::new(0.0, 0.0)
        }
    }))?;
    let rho = thermal_state(&h, args.kt)?;
    let plan = MeasurementPlan::new(vec![(0.0, z.clone()), (0.5, x), (1.0, z)], g)?;
    let full = quasiprob(&plan, &rho, &h)?;
    let marg = marginalize(&full, 1)?;
    let reduced = quasiprob(&plan.without_step(1)?, &rho, &h)?;
    Ok(marg.aligned_max_diff(&reduced)?)
}

/// Batch restricted to the listed columns.
fn select_columns(batch: &SampleBatch, cols: &[usize]) -> SampleBatch {
    let mut out = Vec::with_capacity(batch.n_samples() * cols.len());
    for row in batch.rows() {
        for &c in cols {
            out.push(row[c]);
        }
    }
    SampleBatch::from_parts(out, cols.len(), batch.g(), batch.seed())
}

fn classical_disturbance(args: &DisturbanceScanArgs, g: f64, seed: u64) -> Result<f64, CliError> {
    let sys = ClassicalSystem::one_dof(Potential::QuarticDoubleWell { a: 0.25, b: 0.5 }, args.dt)?;
    let q_step = |t: f64| {
        ProtocolStep::new(t, ClassicalObservable::Position { dof: 0 }, Parity::Even)
    };
    // momentum noise drives the back-action; noiseless readings keep the
    // paired estimator variance at O(g)
    let det = ClassicalDetectorSpec::new(0.0, 1.0)?;
    let full_proto = ClassicalProtocol::new(vec![q_step(0.0), q_step(0.4), q_step(0.8)], g, det)?;
    let reduced_proto = full_proto.without_step(1)?;
    let ens = PhaseEnsemble::boltzmann(&sys, args.kt.max(1e-6), args.trajectories, seed)?;

    let full = run_experiment(&ens, &sys, &full_proto, seed)?;
    let reduced = run_experiment(&ens, &sys, &reduced_proto, seed)?;
    let full_pair = select_columns(&full, &[0, 2]);

    let mf = estimate_moments(&full_pair, g, 0.0)?;
    let mr = estimate_moments(&reduced, g, 0.0)?;
    let mut worst: f64 = 0.0;
    for (a, b) in mf.entries.iter().zip(&mr.entries) {
        debug_assert_eq!(a.indices, b.indices);
        worst = worst.max((a.value - b.value).abs());
    }
    Ok(worst)
}

pub fn disturbance_scan(args: &DisturbanceScanArgs, seed: u64) -> Result<(Table, Meta), CliError> {
    let mut points = Vec::new();
    for &g in &SCAN_STRENGTHS {
        let d = match args.domain {
            ScanDomain::Quantum => quantum_disturbance(args, g)?,
            ScanDomain::Classical => classical_disturbance(args, g, seed)?,
        };
        points.push((g, d));
    }
    let slope = fit_loglog_slope(&points);

    let mut table = Table::new(vec!["kind", "g", "max_diff", "slope"]);
    for &(g, d) in &points {
        table.push(vec![
            Cell::Str("point".into()),
            Cell::Float(g),
            Cell::Float(d),
            Cell::Empty,
        ]);
    }
    table.push(vec![
        Cell::Str("fit".into()),
        Cell::Empty,
        Cell::Empty,
        Cell::Float(slope),
    ]);

    let meta = Meta {
        subcommand: "disturbance-scan",
        seed,
        params: params_map(&[
            ("domain", format!("{:?}", args.domain).to_lowercase()),
            ("eps", args.eps.to_string()),
            ("tau", args.tau.to_string()),
            ("kt", args.kt.to_string()),
            ("trajectories", args.trajectories.to_string()),
            ("dt", args.dt.to_string()),
            (
                "strengths",
                SCAN_STRENGTHS
                    .iter()
                    .map(|g| g.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            ),
        ]),
    };
    Ok((table, meta))
}

#[derive(Debug, Args)]
pub struct SmoothingScanArgs {
    #[arg(long, default_value_t = 1.0)]
    pub eps: f64,
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    #[arg(long, default_value_t = 0.1)]
    pub kt: f64,
    #[arg(long, default_value_t = 0.0)]
    pub t1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t2: f64,
    #[arg(long, default_value_t = 3.0)]
    pub t3: f64,
    /// Window widths in units of 1/Δ, comma-separated ladder.
    #[arg(long, default_value = "0,1,3,10")]
    pub widths: String,
}

/// Normalized Gaussian window of characteristic width `width` centered on
/// `center` (σ = width/2, truncated at ±4σ).
fn gaussian_window(center: f64, width: f64) -> Vec<(f64, f64)> {
    if width == 0.0 {
        return vec![(center, 1.0)];
    }
    let sigma = width / 2.0;
    let n = 81;
    let half = 4.0 * sigma;
    let mut window: Vec<(f64, f64)> = (0..n)
        .map(|j| {
            let tau = -half + 2.0 * half * j as f64 / (n - 1) as f64;
            (center + tau, (-tau * tau / (2.0 * sigma * sigma)).exp())
        })
        .collect();
    let total: f64 = window.iter().map(|(_, w)| w).sum();
    for (_, w) in window.iter_mut() {
        *w /= total;
    }
    window
}

/// Time-asymmetry metric of the three-measurement plan built from smoothed
/// observables. The smoothing is folded into the observables themselves;
/// the plan then only encodes the causal order.
pub fn smoothing_delta_t(
    p: &DoubleWellParams,
    times: (f64, f64, f64),
    width: f64,
) -> Result<f64, CliError> {
    let (h, z) = dwell_model(p);
    let rho = thermal_state(&h, p.k_t)?;
    let smoothed = |center: f64| -> Result<Observable, CliError> {
        Ok(smoothed_observable(&z, &h, &gaussian_window(center, width))?)
    };
    let plan = MeasurementPlan::new(
        vec![
            (0.0, smoothed(times.0)?),
            (0.0, smoothed(times.1)?),
            (0.0, smoothed(times.2)?),
        ],
        0.0,
    )?;
    let fwd = quasiprob(&plan, &rho, &h)?;
    let rev = time_reversed_quasiprob(&plan, &rho, &h)?;
    Ok(fwd.aligned_max_diff(&rev)?)
}

pub fn smoothing_scan(args: &SmoothingScanArgs, seed: u64) -> Result<(Table, Meta), CliError> {
    let p = DoubleWellParams::new(args.eps, args.tau, args.kt)?;
    let delta = p.delta();
    let widths: Vec<f64> = args
        .widths
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Validation(format!("bad width `{s}`: {e}")))
        })
        .collect::<Result<_, _>>()?;
    if widths.is_empty() {
        return Err(CliError::Validation("need at least one width".into()));
    }

    let mut table = Table::new(vec!["width_over_delta", "width", "delta_t", "ratio"]);
    let mut first = None;
    for &w in &widths {
        let width_abs = w / delta;
        let dt = smoothing_delta_t(&p, (args.t1, args.t2, args.t3), width_abs)?;
        let base = *first.get_or_insert(dt);
        table.push(vec![
            Cell::Float(w),
            Cell::Float(width_abs),
            Cell::Float(dt),
            Cell::Float(if base > 0.0 { dt / base } else { 0.0 }),
        ]);
    }

    let meta = Meta {
        subcommand: "smoothing-scan",
        seed,
        params: params_map(&[
            ("eps", args.eps.to_string()),
            ("tau", args.tau.to_string()),
            ("kt", args.kt.to_string()),
            ("t1", args.t1.to_string()),
            ("t2", args.t2.to_string()),
            ("t3", args.t3.to_string()),
            ("widths", args.widths.clone()),
        ]),
    };
    Ok((table, meta))
}
