//! Single-level dot coupled to a Fermi reservoir: Green functions in 2×2
//! Keldysh space and the frequency-domain third cumulant of the occupation.
//!
//! G^R(ω) = i/(ω − ε + iΓ/2),   G^A = −conj(G^R),
//! G^K(ω) = tanh(ω/2kT) Γ/(2(ω−ε)² + Γ²/2)   (kT = 0: tanh → sign, 0 at 0),
//! assembled as Ǧ = [[G^K, G^R],[G^A, 0]] with the vertex N̂ = diag(1, 1/4).
//!
//! S₃ᴺ(ω, ω′) = −∫ dα/2π Tr Ǧ(α) N̂ [Ǧ(α+ω) + Ǧ(α+ω′)] N̂ Ǧ(α+ω+ω′) N̂,
//! evaluated by adaptive quadrature. The tanh kinks at α ∈ {0, −ω, −ω′,
//! −ω−ω′} are mandatory subdivision points; the Lorentzian centers are added
//! as further hints. Everything is in units ħ = 1.

use super::ModelError;
use crate::linalg::C64;
use crate::quadrature::{integrate_real_line, QuadratureRequest, DEFAULT_MAX_EVALS};

/// Single-level dot: level ε, tunneling rate Γ > 0, temperature kT ≥ 0
/// (kT = 0 means the tanh occupation factor degenerates to a sign).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DotParams {
    pub eps: f64,
    pub gamma: f64,
    pub k_t: f64,
}

impl DotParams {
    pub fn new(eps: f64, gamma: f64, k_t: f64) -> Result<Self, ModelError> {
        if !(gamma > 0.0) {
            return Err(ModelError::BadGamma);
        }
        if !(k_t >= 0.0) {
            return Err(ModelError::NegativeTemperature);
        }
        Ok(DotParams { eps, gamma, k_t })
    }
}

/// Values of the 2×2 Keldysh-space matrix [[G^K, G^R],[G^A, 0]] at one
/// frequency. G^K is real; G^A = −conj(G^R) by construction.
#[derive(Debug, Clone, Copy)]
pub struct KeldyshBlock {
    pub gk: C64,
    pub gr: C64,
    pub ga: C64,
}

/// The constant vertex matrix N̂ = diag(1, 1/4).
pub const VERTEX_DIAG: (f64, f64) = (1.0, 0.25);

/// Evaluate the printed Green-function formulas at frequency ω.
pub fn green_functions(omega: f64, p: &DotParams) -> KeldyshBlock {
    let d = C64::new(omega - p.eps, 0.5 * p.gamma);
    let gr = C64::i() / d;
    let th = if p.k_t == 0.0 {
        if omega > 0.0 {
            1.0
        } else if omega < 0.0 {
            -1.0
        } else {
            0.0
        }
    } else {
        (omega / (2.0 * p.k_t)).tanh()
    };
    let de = omega - p.eps;
    let gk = th * p.gamma / (2.0 * de * de + 0.5 * p.gamma * p.gamma);
    KeldyshBlock {
        gk: C64::new(gk, 0.0),
        gr,
        ga: -gr.conj(),
    }
}

/// M(ω) = Ǧ(ω)·N̂ as a flat 2×2 row-major array.
#[inline]
fn m_block(omega: f64, p: &DotParams) -> [C64; 4] {
    let g = green_functions(omega, p);
    [
        g.gk * VERTEX_DIAG.0,
        g.gr * VERTEX_DIAG.1,
        g.ga * VERTEX_DIAG.0,
        C64::new(0.0, 0.0),
    ]
}

/// Tr[a·b·c] for flat 2×2 matrices.
#[inline]
fn trace_of_triple(a: &[C64; 4], b: &[C64; 4], c: &[C64; 4]) -> C64 {
    let ab00 = a[0] * b[0] + a[1] * b[2];
    let ab01 = a[0] * b[1] + a[1] * b[3];
    let ab10 = a[2] * b[0] + a[3] * b[2];
    let ab11 = a[2] * b[1] + a[3] * b[3];
    ab00 * c[0] + ab01 * c[2] + ab10 * c[1] + ab11 * c[3]
}

/// One evaluated cumulant point with its quadrature diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct S3Result {
    pub omega: f64,
    pub omega_p: f64,
    pub value: C64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

pub(crate) fn s3n_integrand(alpha: f64, omega: f64, omega_p: f64, p: &DotParams) -> C64 {
    let m0 = m_block(alpha, p);
    let mut mid = m_block(alpha + omega, p);
    let m2 = m_block(alpha + omega_p, p);
    for (dst, src) in mid.iter_mut().zip(m2.iter()) {
        *dst += src;
    }
    let m3 = m_block(alpha + omega + omega_p, p);
    -trace_of_triple(&m0, &mid, &m3) / (2.0 * std::f64::consts::PI)
}

/// S₃ᴺ(ω, ω′) to absolute tolerance `tol`, with an explicit evaluation
/// budget. Non-convergence is an error carrying the partial estimate.
pub fn s3n_with_budget(
    omega: f64,
    omega_p: f64,
    p: &DotParams,
    tol: f64,
    max_evals: usize,
) -> Result<S3Result, ModelError> {
    if !(tol > 0.0) {
        return Err(ModelError::BadTolerance);
    }
    let breakpoints = vec![
        0.0,
        -omega,
        -omega_p,
        -omega - omega_p,
        p.eps,
        p.eps - omega,
        p.eps - omega_p,
        p.eps - omega - omega_p,
    ];
    let f = move |alpha: f64| s3n_integrand(alpha, omega, omega_p, p);
    let req = QuadratureRequest::new(&f, tol)
        .with_breakpoints(breakpoints)
        .with_max_evals(max_evals);
    let out = integrate_real_line(&req)?;
    let result = S3Result {
        omega,
        omega_p,
        value: out.value,
        abs_error_estimate: out.abs_error_estimate,
        evaluations: out.evaluations,
    };
    if !out.converged {
        return Err(ModelError::NonConvergence { partial: result });
    }
    Ok(result)
}

/// S₃ᴺ(ω, ω′) with the default evaluation budget.
pub fn s3n(omega: f64, omega_p: f64, p: &DotParams, tol: f64) -> Result<S3Result, ModelError> {
    s3n_with_budget(omega, omega_p, p, tol, DEFAULT_MAX_EVALS)
}
