//! Two-level double well: H = εZ + τX in the {|l⟩, |r⟩} basis, measured
//! observable Z = |l⟩⟨l| − |r⟩⟨r|, thermal initial state.
//!
//! The three-point weak correlator has the closed form
//! α_c (ε² + τ² cos(2(t₃−t₂)Δ)), Δ = √(ε²+τ²),
//! α_c = −(ε/Δ³) tanh(Δ/kT); its dependence on t₃−t₂ but not t₂−t₁ is the
//! time-asymmetry witness.

use super::ModelError;
use crate::linalg::{ComplexMatrix, C64};
use crate::quantum::{Hamiltonian, Observable};

/// Double-well parameters: half energy splitting ε, tunneling amplitude τ,
/// temperature kT. Derived quantities are recomputed on demand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleWellParams {
    pub eps: f64,
    pub tau: f64,
    pub k_t: f64,
}

impl DoubleWellParams {
    pub fn new(eps: f64, tau: f64, k_t: f64) -> Result<Self, ModelError> {
        if eps == 0.0 && tau == 0.0 {
            return Err(ModelError::DegenerateDoubleWell);
        }
        if !(k_t > 0.0) {
            return Err(ModelError::BadTemperature);
        }
        Ok(DoubleWellParams { eps, tau, k_t })
    }

    /// Δ = √(ε² + τ²), half the level splitting.
    pub fn delta(&self) -> f64 {
        self.eps.hypot(self.tau)
    }

    /// α_c = −(ε/Δ³) tanh(Δ/kT).
    pub fn alpha_c(&self) -> f64 {
        let d = self.delta();
        -(self.eps / (d * d * d)) * (d / self.k_t).tanh()
    }
}

/// H = εZ + τX and the location observable Z, both real symmetric (even
/// under the conjugation representation of time reversal).
pub fn dwell_model(p: &DoubleWellParams) -> (Hamiltonian, Observable) {
    let h = ComplexMatrix::from_rows(&[
        vec![C64::new(p.eps, 0.0), C64::new(p.tau, 0.0)],
        vec![C64::new(p.tau, 0.0), C64::new(-p.eps, 0.0)],
    ]);
    let z = ComplexMatrix::diag(&[1.0, -1.0]);
    (
        Hamiltonian::new(h).expect("real symmetric"),
        Observable::new(z).expect("diagonal"),
    )
}

/// Closed-form ⟨z(t₁)z(t₂)z(t₃)⟩ for three weak Z measurements on the
/// thermal state: α_c (ε² + τ² cos(2(t₃−t₂)Δ)), ħ = 1.
pub fn dwell_corr_analytic(
    p: &DoubleWellParams,
    t1: f64,
    t2: f64,
    t3: f64,
) -> Result<f64, ModelError> {
    if !(t1 <= t2 && t2 <= t3) {
        return Err(ModelError::BadTimeOrder);
    }
    let d = p.delta();
    Ok(p.alpha_c() * (p.eps * p.eps + p.tau * p.tau * (2.0 * (t3 - t2) * d).cos()))
}
