//! Simulation of sequential weak measurements, classical and quantum, plus
//! the frequency-domain third cumulant of a resonant-level dot occupation.

// validation uses `!(x > 0.0)` on purpose: it rejects NaN along with the
// out-of-range values, which `x <= 0.0` would let through
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod linalg;
pub mod models;
pub mod moments;
pub mod quadrature;
pub mod quantum;
pub(crate) mod rng;
