//! `junction`: detector-junction quantities and the operating-regime report.

use super::{params_map, CliError};
use crate::output::{Cell, Meta, Table};
use clap::Args;
use wmsim_core::models::{junction_quantities, regime_check_with_factor, DotParams, JunctionParams};

#[derive(Debug, Args)]
pub struct JunctionArgs {
    /// Junction tunneling rate Γ′.
    #[arg(long, default_value_t = 10.0)]
    pub gammap: f64,
    /// Junction level ε′.
    #[arg(long, default_value_t = 10.0)]
    pub epsp: f64,
    /// Bias voltage V.
    #[arg(long, default_value_t = 0.1)]
    pub bias: f64,
    /// Dot–junction capacitance C.
    #[arg(long, default_value_t = 1.0)]
    pub cap: f64,
    /// Measured-dot level ε (for the regime report).
    #[arg(long, default_value_t = 1e-3)]
    pub eps: f64,
    /// Measured-dot rate Γ.
    #[arg(long, default_value_t = 1e-3)]
    pub gamma: f64,
    /// Measured-dot temperature kT.
    #[arg(long, default_value_t = 1e-3)]
    pub kt: f64,
    /// Scale-separation factor standing in for "≪".
    #[arg(long, default_value_t = 10.0)]
    pub factor: f64,
}

pub fn junction(args: &JunctionArgs, seed: u64) -> Result<(Table, Meta), CliError> {
    let j = JunctionParams::new(args.gammap, args.epsp, args.bias, args.cap)?;
    let d = DotParams::new(args.eps, args.gamma, args.kt)?;
    let q = junction_quantities(&j);
    let report = regime_check_with_factor(&j, &d, args.factor);

    let mut table = Table::new(vec!["name", "value", "lhs", "rhs", "ratio", "pass"]);
    for (name, value) in [
        ("transmission", q.transmission),
        ("chi", q.chi),
        ("s3_i0", q.s3_i0),
    ] {
        table.push(vec![
            Cell::Str(name.into()),
            Cell::Float(value),
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
        ]);
    }
    for check in &report.checks {
        table.push(vec![
            Cell::Str(check.name.into()),
            Cell::Empty,
            Cell::Float(check.lhs),
            Cell::Float(check.rhs),
            Cell::Float(check.ratio),
            Cell::Bool(check.pass),
        ]);
    }

    let meta = Meta {
        subcommand: "junction",
        seed,
        params: params_map(&[
            ("gammap", args.gammap.to_string()),
            ("epsp", args.epsp.to_string()),
            ("bias", args.bias.to_string()),
            ("cap", args.cap.to_string()),
            ("eps", args.eps.to_string()),
            ("gamma", args.gamma.to_string()),
            ("kt", args.kt.to_string()),
            ("factor", args.factor.to_string()),
        ]),
    };
    Ok((table, meta))
}
