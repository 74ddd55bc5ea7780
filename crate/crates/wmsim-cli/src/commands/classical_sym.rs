//! `classical-sym`: forward vs time-reversed classical moments on an
//! equilibrium ensemble.

use super::{params_map, CliError};
use crate::output::{Cell, Meta, Table};
use clap::{Args, ValueEnum};
use wmsim_core::classical::{
    estimate_moments, reverse_experiment, run_experiment, ClassicalDetectorSpec,
    ClassicalObservable, ClassicalProtocol, ClassicalSystem, Parity, PhaseEnsemble, Potential,
    ProtocolStep,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SystemKind {
    Harmonic,
    Quartic,
}

#[derive(Debug, Args)]
pub struct ClassicalSymArgs {
    #[arg(long, value_enum, default_value_t = SystemKind::Quartic)]
    pub system: SystemKind,
    #[arg(long, default_value_t = 0.5)]
    pub kt: f64,
    /// Coupling strength (0 = ideal weak limit, requires σ_p = 0).
    #[arg(long, default_value_t = 0.05)]
    pub g: f64,
    #[arg(long, default_value_t = 0.01)]
    pub sigma_q: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma_p: f64,
    #[arg(long, default_value_t = 0.0)]
    pub t1: f64,
    #[arg(long, default_value_t = 0.4)]
    pub t2: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t3: f64,
    /// Comma-separated observables per step, from {q, p}.
    #[arg(long, default_value = "q,p,q")]
    pub obs: String,
    #[arg(long, default_value_t = 100_000)]
    pub trajectories: usize,
    /// Leapfrog timestep.
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
}

pub fn build_system(kind: SystemKind, dt: f64) -> Result<ClassicalSystem, CliError> {
    let potential = match kind {
        SystemKind::Harmonic => Potential::Harmonic { k: 1.0 },
        SystemKind::Quartic => Potential::QuarticDoubleWell { a: 0.25, b: 0.5 },
    };
    Ok(ClassicalSystem::one_dof(potential, dt)?)
}

fn parse_steps(spec: &str, times: &[f64]) -> Result<Vec<ProtocolStep>, CliError> {
    let names: Vec<&str> = spec.split(',').map(str::trim).collect();
    if names.len() != times.len() {
        return Err(CliError::Validation(format!(
            "--obs lists {} observables for {} times",
            names.len(),
            times.len()
        )));
    }
    names
        .iter()
        .zip(times)
        .map(|(name, &t)| match *name {
            "q" => Ok(ProtocolStep::new(
                t,
                ClassicalObservable::Position { dof: 0 },
                Parity::Even,
            )),
            "p" => Ok(ProtocolStep::new(
                t,
                ClassicalObservable::Momentum { dof: 0 },
                Parity::Odd,
            )),
            other => Err(CliError::Validation(format!(
                "unknown observable `{other}` (expected q or p)"
            ))),
        })
        .collect()
}

pub fn classical_sym(args: &ClassicalSymArgs, seed: u64) -> Result<(Table, Meta), CliError> {
    let sys = build_system(args.system, args.dt)?;
    let steps = parse_steps(&args.obs, &[args.t1, args.t2, args.t3])?;
    let detector = ClassicalDetectorSpec::new(args.sigma_q, args.sigma_p)?;
    let proto = ClassicalProtocol::new(steps, args.g, detector)?;
    let ens = PhaseEnsemble::boltzmann(&sys, args.kt, args.trajectories, seed)?;

    let fwd_batch = run_experiment(&ens, &sys, &proto, seed)?;
    let rev_batch = reverse_experiment(&ens, &sys, &proto, seed)?;
    let fwd = estimate_moments(&fwd_batch, proto.g, args.sigma_q)?;
    let rev = estimate_moments(&rev_batch, proto.g, args.sigma_q)?;

    let mut table = Table::new(vec![
        "moment",
        "forward",
        "forward_stderr",
        "reverse",
        "reverse_stderr",
        "diff",
        "diff_over_sigma",
    ]);
    for (f, r) in fwd.entries.iter().zip(&rev.entries) {
        let label = f
            .indices
            .iter()
            .map(|i| format!("a{}", i + 1))
            .collect::<Vec<_>>()
            .join("*");
        let diff = f.value - r.value;
        let sigma = (f.std_error.powi(2) + r.std_error.powi(2)).sqrt();
        table.push(vec![
            Cell::Str(label),
            Cell::Float(f.value),
            Cell::Float(f.std_error),
            Cell::Float(r.value),
            Cell::Float(r.std_error),
            Cell::Float(diff),
            if sigma > 0.0 {
                Cell::Float(diff / sigma)
            } else {
                Cell::Empty
            },
        ]);
    }

    let meta = Meta {
        subcommand: "classical-sym",
        seed,
        params: params_map(&[
            ("system", format!("{:?}", args.system).to_lowercase()),
            ("kt", args.kt.to_string()),
            ("g", args.g.to_string()),
            ("sigma_q", args.sigma_q.to_string()),
            ("sigma_p", args.sigma_p.to_string()),
            ("t1", args.t1.to_string()),
            ("t2", args.t2.to_string()),
            ("t3", args.t3.to_string()),
            ("obs", args.obs.clone()),
            ("trajectories", args.trajectories.to_string()),
            ("dt", args.dt.to_string()),
        ]),
    };
    Ok((table, meta))
}
