//! `dot-s3`: occupation third cumulant of the resonant-level dot, at a
//! single frequency pair or on a square (ω, ω′) grid.

use super::{params_map, CliError};
use crate::output::{Cell, Meta, Table};
use clap::Args;
use rayon::prelude::*;
use wmsim_core::models::{s3n, DotParams, S3Result};

#[derive(Debug, Args)]
pub struct DotS3Args {
    /// Dot level ε.
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
    /// Tunneling rate Γ.
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Temperature (0 = zero-temperature sign kernel).
    #[arg(long, default_value_t = 0.0)]
    pub kt: f64,
    /// Single-point ω (ignored when --grid is set).
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Single-point ω′ (ignored when --grid is set).
    #[arg(long, default_value_t = 1.0)]
    pub omega_p: f64,
    /// Grid resolution per axis; produces an N×N scan over ±wmax.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Half-width of the grid in frequency units.
    #[arg(long, default_value_t = 3.0)]
    pub wmax: f64,
    /// Absolute quadrature tolerance per point.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

pub fn dot_s3(args: &DotS3Args, seed: u64) -> Result<(Table, Meta), CliError> {
    let p = DotParams::new(args.eps, args.gamma, args.kt)?;
    let mut table = Table::new(vec![
        "omega", "omega_p", "s3_re", "s3_im", "err_est", "evals",
    ]);

    let push = |table: &mut Table, r: &S3Result| {
        table.push(vec![
            Cell::Float(r.omega),
            Cell::Float(r.omega_p),
            Cell::Float(r.value.re),
            Cell::Float(r.value.im),
            Cell::Float(r.abs_error_estimate),
            Cell::Int(r.evaluations as i64),
        ]);
    };

    match args.grid {
        None => {
            let r = s3n(args.omega, args.omega_p, &p, args.tol)?;
            push(&mut table, &r);
        }
        Some(n) => {
            if n < 2 {
                return Err(CliError::Validation("--grid must be at least 2".into()));
            }
            if !(args.wmax > 0.0) {
                return Err(CliError::Validation("--wmax must be positive".into()));
            }
            let freq = |i: usize| -args.wmax + 2.0 * args.wmax * i as f64 / (n - 1) as f64;
            let results: Vec<Result<S3Result, _>> = (0..n * n)
                .into_par_iter()
                .map(|flat| s3n(freq(flat / n), freq(flat % n), &p, args.tol))
                .collect();
            for r in results {
                push(&mut table, &r?);
            }
        }
    }

    let meta = Meta {
        subcommand: "dot-s3",
        seed,
        params: params_map(&[
            ("eps", args.eps.to_string()),
            ("gamma", args.gamma.to_string()),
            ("kt", args.kt.to_string()),
            ("omega", args.omega.to_string()),
            ("omega_p", args.omega_p.to_string()),
            (
                "grid",
                args.grid.map(|g| g.to_string()).unwrap_or_default(),
            ),
            ("wmax", args.wmax.to_string()),
            ("tol", args.tol.to_string()),
        ]),
    };
    Ok((table, meta))
}
