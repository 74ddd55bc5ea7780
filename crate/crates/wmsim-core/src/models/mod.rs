//! The two concrete physical systems: the double-well two-level model with
//! its closed-form three-point correlator, and the single-level quantum dot
//! whose occupation third cumulant is evaluated in the frequency domain from
//! Keldysh Green functions, plus the capacitively coupled junction detector.

mod dot;
mod double_well;
mod junction;

pub use dot::{green_functions, s3n, s3n_with_budget, DotParams, KeldyshBlock, S3Result};
pub use double_well::{dwell_corr_analytic, dwell_model, DoubleWellParams};
pub use junction::{
    junction_quantities, regime_check, regime_check_with_factor, s3_total, JunctionParams,
    JunctionQuantities, RegimeCheck, RegimeReport,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("double well requires ε and τ not both zero")]
    DegenerateDoubleWell,
    #[error("temperature must be positive")]
    BadTemperature,
    #[error("measurement times must satisfy t1 ≤ t2 ≤ t3")]
    BadTimeOrder,
    #[error("tunneling rate Γ must be positive")]
    BadGamma,
    #[error("dot temperature must be ≥ 0")]
    NegativeTemperature,
    #[error("tolerance must be positive")]
    BadTolerance,
    #[error("junction parameters Γ' and C must be positive")]
    BadJunction,
    #[error("cumulant integral did not converge within the evaluation budget (partial value {:.6e}{:+.6e}i, error estimate {:.3e})", partial.value.re, partial.value.im, partial.abs_error_estimate)]
    NonConvergence { partial: S3Result },
    #[error(transparent)]
    Quadrature(#[from] crate::quadrature::QuadratureError),
    #[error(transparent)]
    Quantum(#[from] crate::quantum::QuantumError),
}
