//! Voltage-biased junction detector capacitively coupled to the dot.
//!
//! Units: e = 1, h = 2π (so e²/h = 1/2π); junction cumulants are reported
//! in units of e⁴V/h.

use super::dot::{s3n, DotParams};
use super::ModelError;
use crate::linalg::C64;

pub const E_CHARGE: f64 = 1.0;
pub const H_PLANCK: f64 = 2.0 * std::f64::consts::PI;

/// Junction detector parameters: broad-level dot with rate Γ′ and level ε′,
/// bias V and dot–junction capacitance C.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JunctionParams {
    pub gammap: f64,
    pub epsp: f64,
    pub v: f64,
    pub c: f64,
}

impl JunctionParams {
    pub fn new(gammap: f64, epsp: f64, v: f64, c: f64) -> Result<Self, ModelError> {
        if !(gammap > 0.0 && c > 0.0) {
            return Err(ModelError::BadJunction);
        }
        Ok(JunctionParams { gammap, epsp, v, c })
    }

    /// Effective transmission 𝒯 = Γ′²/(ε′² + Γ′²).
    pub fn transmission(&self) -> f64 {
        let g2 = self.gammap * self.gammap;
        g2 / (self.epsp * self.epsp + g2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JunctionQuantities {
    pub transmission: f64,
    /// Susceptibility χ = −e² d⟨I⟩/dε′ / C with ⟨I⟩ = 𝒯 e²V/h.
    pub chi: f64,
    /// Intrinsic junction third cumulant S₃ᴵ⁰ = 𝒯(1−𝒯)(1−2𝒯) e⁴V/h.
    pub s3_i0: f64,
}

pub fn junction_quantities(j: &JunctionParams) -> JunctionQuantities {
    let t = j.transmission();
    let denom = j.epsp * j.epsp + j.gammap * j.gammap;
    // d𝒯/dε′ = −2ε′Γ′²/(ε′²+Γ′²)²
    let dt_deps = -2.0 * j.epsp * j.gammap * j.gammap / (denom * denom);
    let e2 = E_CHARGE * E_CHARGE;
    let chi = -e2 * (dt_deps * e2 * j.v / H_PLANCK) / j.c;
    let s3_i0 = t * (1.0 - t) * (1.0 - 2.0 * t) * e2 * e2 * j.v / H_PLANCK;
    JunctionQuantities {
        transmission: t,
        chi,
        s3_i0,
    }
}

/// One scale-separation inequality, evaluated as a ratio against the factor.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeCheck {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport {
    pub factor: f64,
    pub checks: Vec<RegimeCheck>,
}

impl RegimeReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Check the operating-regime inequalities
/// (Γ, ε, kT) ≪ eV ≪ (Γ′, ε′) and e²/Γ′C ≫ Γ/eV ≫ (e²/Γ′C)²,
/// reading "≪" as a ratio of at least `factor`.
pub fn regime_check_with_factor(j: &JunctionParams, d: &DotParams, factor: f64) -> RegimeReport {
    let ev = E_CHARGE * j.v;
    let system_scale = d.gamma.max(d.eps.abs()).max(d.k_t);
    let detector_scale = j.gammap.min(j.epsp.abs());
    let coupling = E_CHARGE * E_CHARGE / (j.gammap * j.c);
    let drive = d.gamma / ev;

    let mk = |name: &'static str, lhs: f64, rhs: f64| {
        let ratio = lhs / rhs;
        RegimeCheck {
            name,
            lhs,
            rhs,
            ratio,
            pass: ratio >= factor,
        }
    };
    RegimeReport {
        factor,
        checks: vec![
            mk("eV ≫ max(Γ, ε, kT)", ev, system_scale),
            mk("min(Γ', ε') ≫ eV", detector_scale, ev),
            mk("e²/Γ'C ≫ Γ/eV", coupling, drive),
            mk("Γ/eV ≫ (e²/Γ'C)²", drive, coupling * coupling),
        ],
    }
}

/// Regime report at the default separation factor 10.
pub fn regime_check(j: &JunctionParams, d: &DotParams) -> RegimeReport {
    regime_check_with_factor(j, d, 10.0)
}

/// Composite detector cumulant S₃ᴵ ≃ S₃ᴵ⁰ + χ³ S₃ᴺ(ω, ω′). The intrinsic
/// part is real and frequency-independent in the asymmetry window, so the
/// imaginary part is carried by the dot term alone.
pub fn s3_total(
    j: &JunctionParams,
    d: &DotParams,
    omega: f64,
    omega_p: f64,
    tol: f64,
) -> Result<C64, ModelError> {
    let q = junction_quantities(j);
    let dot_part = s3n(omega, omega_p, d, tol)?;
    let chi3 = q.chi * q.chi * q.chi;
    Ok(C64::new(q.s3_i0, 0.0) + dot_part.value * chi3)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dot() -> DotParams {
        DotParams::new(0.5, 1.0, 0.0).unwrap()
    }

    #[test]
    fn half_transmission_kills_intrinsic_cumulant() {
        let j = JunctionParams::new(2.0, 2.0, 1.0, 1.0).unwrap();
        assert!((j.transmission() - 0.5).abs() < 1e-15);
        let q = junction_quantities(&j);
        assert!(q.s3_i0.abs() < 1e-15);
    }

    #[test]
    fn susceptibility_vanishes_on_resonance_peak() {
        let j = JunctionParams::new(2.0, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(junction_quantities(&j).chi, 0.0);
    }

    #[test]
    fn susceptibility_matches_finite_difference() {
        let gp = 2.0;
        let (v, c) = (1.3, 0.7);
        let epsp = 0.7 * gp;
        let j = JunctionParams::new(gp, epsp, v, c).unwrap();
        let chi = junction_quantities(&j).chi;

        let current = |e: f64| {
            let jj = JunctionParams::new(gp, e, v, c).unwrap();
            jj.transmission() * E_CHARGE * E_CHARGE * v / H_PLANCK
        };
        let h = 1e-5 * gp;
        let fd = -E_CHARGE * E_CHARGE * (current(epsp + h) - current(epsp - h)) / (2.0 * h * c);
        assert!(
            ((chi - fd) / chi).abs() < 1e-8,
            "analytic {chi} vs finite difference {fd}"
        );
    }

    #[test]
    fn regime_check_on_reference_parameters() {
        // Γ = 1e-3, eV = 0.1, Γ' = 10, e²/Γ'C = 0.1 (C = 1): direct ratio
        // computation gives 100, 100, 10, 1 — the last window inequality
        // fails at factor 10 because Γ/eV = (e²/Γ'C)² exactly.
        let d = DotParams::new(1e-3, 1e-3, 1e-3).unwrap();
        let j = JunctionParams::new(10.0, 10.0, 0.1, 1.0).unwrap();
        let report = regime_check(&j, &d);
        let ratios: Vec<f64> = report.checks.iter().map(|c| c.ratio).collect();
        assert!((ratios[0] - 100.0).abs() < 1e-9);
        assert!((ratios[1] - 100.0).abs() < 1e-9);
        assert!((ratios[2] - 10.0).abs() < 1e-9);
        assert!((ratios[3] - 1.0).abs() < 1e-9);
        let passes: Vec<bool> = report.checks.iter().map(|c| c.pass).collect();
        assert_eq!(passes, vec![true, true, true, false]);

        // the full window needs Γ/eV ≤ factor⁻³: with Γ/eV = 1e-4 and
        // coupling e²/Γ'C = 2e-3 the ratios are (1e4, 100, 20, 25)
        let d = DotParams::new(0.0, 1e-5, 0.0).unwrap();
        let j = JunctionParams::new(10.0, 10.0, 0.1, 50.0).unwrap();
        let report = regime_check(&j, &d);
        assert!(report.all_pass(), "{report:?}");
    }

    #[test]
    fn regime_check_failure_modes() {
        // eV = Γ → first inequality fails
        let d = DotParams::new(0.1, 0.1, 0.0).unwrap();
        let j = JunctionParams::new(10.0, 10.0, 0.1, 1.0).unwrap();
        let report = regime_check(&j, &d);
        assert!(!report.checks[0].pass);

        // e²/Γ'C = 1 → the right window inequality Γ/eV ≫ (e²/Γ'C)² fails
        let d = DotParams::new(1e-3, 1e-3, 0.0).unwrap();
        let j = JunctionParams::new(10.0, 10.0, 0.1, 0.01).unwrap();
        let coupling: f64 = 1.0 / (10.0 * 0.01);
        assert!((coupling - 10.0).abs() < 1e-12);
        let report = regime_check(&j, &d);
        assert!(report.checks[2].pass); // left window: 10 / 0.01 = 1000
        assert!(!report.checks[3].pass); // right window: 0.01 / 100 ≪ 1
        assert!(!report.all_pass());
    }

    #[test]
    fn composite_cumulant_structure() {
        let d = dot();
        // χ = 0 at ε' = 0: pure intrinsic part
        let j0 = JunctionParams::new(2.0, 0.0, 1.0, 1.0).unwrap();
        let total = s3_total(&j0, &d, 1.0, 1.0, 1e-8).unwrap();
        let q0 = junction_quantities(&j0);
        assert!((total - C64::new(q0.s3_i0, 0.0)).norm() < 1e-15);

        // Im S₃ᴵ = χ³ Im S₃ᴺ exactly (intrinsic part is real)
        let j = JunctionParams::new(2.0, 1.4, 1.3, 0.9).unwrap();
        let q = junction_quantities(&j);
        let dot_val = s3n(1.0, 1.0, &d, 1e-9).unwrap().value;
        let total = s3_total(&j, &d, 1.0, 1.0, 1e-9).unwrap();
        assert!((total.im - q.chi.powi(3) * dot_val.im).abs() < 1e-14);

        // inherits the frequency permutation symmetry
        let a = s3_total(&j, &d, 0.7, 0.4, 1e-9).unwrap();
        let b = s3_total(&j, &d, 0.4, 0.7, 1e-9).unwrap();
        let c = s3_total(&j, &d, -1.1, 0.4, 1e-9).unwrap();
        assert!((a - b).norm() < 1e-8);
        assert!((a - c).norm() < 1e-8);
    }

    #[test]
    fn junction_validation() {
        assert!(matches!(
            JunctionParams::new(0.0, 1.0, 1.0, 1.0),
            Err(ModelError::BadJunction)
        ));
        assert!(matches!(
            JunctionParams::new(1.0, 1.0, 1.0, 0.0),
            Err(ModelError::BadJunction)
        ));
    }
}
