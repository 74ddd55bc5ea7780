//! Sequential weak measurements on finite-dimensional quantum systems.
//!
//! Conventions: ħ = 1, k_B = 1. Detector readings are reported in a-units
//! (raw position divided by the coupling g), so the detector noise variance
//! is 1/g² per reading and the ancilla Gaussian has σ_q = 1.
//!
//! Time reversal is represented by complex conjugation in the computational
//! basis, which covers spinless systems (all models in this crate have real
//! H and observables).

mod quasiprob;
mod sampling;

pub use quasiprob::{
    marginalize, quasiprob, quasiprob_with_strengths, time_reversed_quasiprob, weak_moment,
    Quasiprobability,
};
pub use sampling::{deconvolve_moments, sample_sequence, SampleBatch};

use crate::linalg::{
    commutator, hermitian_eigen, mat_mul, ComplexMatrix, LinalgError, SpectralDecomposition, C64,
    DEFAULT_DEGENERACY_TOL,
};
use thiserror::Error;

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-10;
/// Dense outcome tables only: plans are capped to keep them desk-sized.
pub const MAX_PLAN_STEPS: usize = 6;
pub const MAX_DIM: usize = 16;

#[derive(Debug, Error)]
pub enum QuantumError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),
    #[error("density matrix trace is {0}, expected 1")]
    BadTrace(f64),
    #[error("density matrix has negative eigenvalue {0:.3e}")]
    NotPositive(f64),
    #[error("measurement plan must have nondecreasing times")]
    DecreasingTimes,
    #[error("measurement plan must be nonempty")]
    EmptyPlan,
    #[error("plan has {0} steps, maximum is {MAX_PLAN_STEPS}")]
    TooManySteps(usize),
    #[error("dimension {0} exceeds maximum {MAX_DIM}")]
    DimensionTooLarge(usize),
    #[error("plan observables must share the state dimension")]
    MixedDimensions,
    #[error("coupling strength must be finite and ≥ 0 (got {0})")]
    BadStrength(f64),
    #[error("temperature must be positive (got {0})")]
    BadTemperature(f64),
    #[error("sampler requires g > 0")]
    WeakLimitNotSamplable,
    #[error("n_samples must be ≥ 1")]
    NoSamples,
    #[error("step index {0} out of range for {1} steps")]
    StepOutOfRange(usize, usize),
    #[error("window weights must sum to 1 (got {0})")]
    BadWindow(f64),
    #[error("window must be nonempty")]
    EmptyWindow,
    #[error("detector parameters must be positive")]
    BadDetector,
    #[error("outcome axes do not align between tables")]
    AxisMismatch,
}

/// Hermitian observable with its cached spectral decomposition.
#[derive(Debug, Clone)]
pub struct Observable {
    matrix: ComplexMatrix,
    spectrum: SpectralDecomposition,
}

impl Observable {
    pub fn new(matrix: ComplexMatrix) -> Result<Self, QuantumError> {
        let defect = matrix.hermiticity_defect();
        if defect > HERMITICITY_TOL * matrix.frobenius_norm().max(1.0) {
            return Err(QuantumError::NotHermitian(defect));
        }
        let spectrum = hermitian_eigen(&matrix, DEFAULT_DEGENERACY_TOL)?;
        Ok(Observable { matrix, spectrum })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Entrywise complex conjugate (time-reversed observable).
    pub fn time_reversed(&self) -> Result<Self, QuantumError> {
        Observable::new(self.matrix.conj())
    }
}

/// Positive unit-trace state.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self, QuantumError> {
        let defect = matrix.hermiticity_defect();
        if defect > HERMITICITY_TOL * matrix.frobenius_norm().max(1.0) {
            return Err(QuantumError::NotHermitian(defect));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(QuantumError::BadTrace(tr.re));
        }
        let spec = hermitian_eigen(&matrix, DEFAULT_DEGENERACY_TOL)?;
        if let Some(min) = spec
            .eigenvalues
            .first()
            .copied()
            .filter(|&min| min < -PSD_TOL)
        {
            return Err(QuantumError::NotPositive(min));
        }
        Ok(DensityMatrix { matrix })
    }

    pub fn pure(amplitudes: &[C64]) -> Result<Self, QuantumError> {
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        let dim = amplitudes.len();
        let m = ComplexMatrix::from_fn(dim, |i, j| {
            amplitudes[i] * amplitudes[j].conj() / norm_sq
        });
        DensityMatrix::new(m)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            matrix: ComplexMatrix::identity(dim).scale(C64::new(1.0 / dim as f64, 0.0)),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn time_reversed(&self) -> Result<Self, QuantumError> {
        DensityMatrix::new(self.matrix.conj())
    }

    /// ⟨A⟩ = Tr ρA.
    pub fn expectation(&self, a: &Observable) -> f64 {
        mat_mul(&self.matrix, a.matrix()).expect("matching dims").trace().re
    }
}

/// Generator of dynamics (ħ = 1), with cached spectrum for fast propagators.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    matrix: ComplexMatrix,
    spectrum: SpectralDecomposition,
}

impl Hamiltonian {
    pub fn new(matrix: ComplexMatrix) -> Result<Self, QuantumError> {
        let defect = matrix.hermiticity_defect();
        if defect > HERMITICITY_TOL * matrix.frobenius_norm().max(1.0) {
            return Err(QuantumError::NotHermitian(defect));
        }
        let spectrum = hermitian_eigen(&matrix, DEFAULT_DEGENERACY_TOL)?;
        Ok(Hamiltonian { matrix, spectrum })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// U(t) = exp(−iHt).
    pub fn propagator(&self, t: f64) -> ComplexMatrix {
        self.spectrum
            .apply(|lambda| (-C64::i() * lambda * t).exp())
            .expect("exp is finite")
    }

    pub fn time_reversed(&self) -> Result<Self, QuantumError> {
        Hamiltonian::new(self.matrix.conj())
    }
}

/// Ordered list of (time, observable) with a common coupling strength.
/// g = 0 encodes the weak limit.
#[derive(Debug, Clone)]
pub struct MeasurementPlan {
    steps: Vec<(f64, Observable)>,
    g: f64,
}

impl MeasurementPlan {
    pub fn new(steps: Vec<(f64, Observable)>, g: f64) -> Result<Self, QuantumError> {
        if steps.is_empty() {
            return Err(QuantumError::EmptyPlan);
        }
        if steps.len() > MAX_PLAN_STEPS {
            return Err(QuantumError::TooManySteps(steps.len()));
        }
        if !(g.is_finite() && g >= 0.0) {
            return Err(QuantumError::BadStrength(g));
        }
        let dim = steps[0].1.dim();
        if dim > MAX_DIM {
            return Err(QuantumError::DimensionTooLarge(dim));
        }
        for w in steps.windows(2) {
            if w[1].0 < w[0].0 {
                return Err(QuantumError::DecreasingTimes);
            }
        }
        if steps.iter().any(|(_, a)| a.dim() != dim) {
            return Err(QuantumError::MixedDimensions);
        }
        Ok(MeasurementPlan { steps, g })
    }

    pub fn steps(&self) -> &[(f64, Observable)] {
        &self.steps
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.steps[0].1.dim()
    }

    /// Plan with step `index` removed (for noninvasiveness checks).
    pub fn without_step(&self, index: usize) -> Result<Self, QuantumError> {
        if index >= self.steps.len() {
            return Err(QuantumError::StepOutOfRange(index, self.steps.len()));
        }
        if self.steps.len() == 1 {
            return Err(QuantumError::EmptyPlan);
        }
        let mut steps = self.steps.clone();
        steps.remove(index);
        MeasurementPlan::new(steps, self.g)
    }
}

/// Symmetric Gaussian ancilla state ρ_d ∝ exp(−q²/2α − p²/2β).
///
/// The projective-readout variances follow the coth closed forms; they are
/// kept for documentation and reporting. The sampler itself works in the
/// a-unit convention (σ_q = 1) where the Kraus family already absorbs the
/// detector state.
#[derive(Debug, Clone, Copy)]
pub struct DetectorSpec {
    pub alpha: f64,
    pub beta: f64,
    pub sigma_q: f64,
    pub sigma_p: f64,
}

impl DetectorSpec {
    pub fn from_alpha_beta(alpha: f64, beta: f64) -> Result<Self, QuantumError> {
        if !(alpha > 0.0 && beta > 0.0) {
            return Err(QuantumError::BadDetector);
        }
        let x = (1.0 / (4.0 * alpha * beta)).sqrt();
        let coth = 1.0 / x.tanh();
        let sigma_q = 0.5 * (alpha / beta).sqrt() * coth;
        let sigma_p = 0.5 * (beta / alpha).sqrt() * coth;
        Ok(DetectorSpec {
            alpha,
            beta,
            sigma_q,
            sigma_p,
        })
    }
}

/// Heisenberg evolution A(t) = U†(t) A U(t), U(t) = exp(−iHt).
pub fn heisenberg_evolve(
    a: &Observable,
    h: &Hamiltonian,
    t: f64,
) -> Result<Observable, QuantumError> {
    let u = h.propagator(t);
    let au = mat_mul(a.matrix(), &u)?;
    let evolved = mat_mul(&u.adjoint(), &au)?;
    // scrub roundoff-level asymmetry so downstream invariants stay tight
    let sym = evolved.add(&evolved.adjoint()).scale(C64::new(0.5, 0.0));
    Observable::new(sym)
}

/// Thermal state exp(−H/kT)/Tr exp(−H/kT).
pub fn thermal_state(h: &Hamiltonian, k_t: f64) -> Result<DensityMatrix, QuantumError> {
    if !(k_t > 0.0) {
        return Err(QuantumError::BadTemperature(k_t));
    }
    let min = h
        .spectrum
        .eigenvalues
        .first()
        .copied()
        .unwrap_or(0.0);
    let unnorm = h
        .spectrum
        .apply(|lambda| C64::new((-(lambda - min) / k_t).exp(), 0.0))?;
    let z = unnorm.trace().re;
    DensityMatrix::new(unnorm.scale(C64::new(1.0 / z, 0.0)))
}

/// True iff all pairwise commutators of the Heisenberg-evolved step
/// observables vanish (Frobenius norm ≤ 1e-9·‖A_j‖‖A_k‖).
pub fn compatibility_check(plan: &MeasurementPlan, h: &Hamiltonian) -> Result<bool, QuantumError> {
    let evolved: Vec<Observable> = plan
        .steps()
        .iter()
        .map(|(t, a)| heisenberg_evolve(a, h, *t))
        .collect::<Result<_, _>>()?;
    for i in 0..evolved.len() {
        for j in (i + 1)..evolved.len() {
            let c = commutator(evolved[i].matrix(), evolved[j].matrix())?;
            let bound =
                1e-9 * evolved[i].matrix().frobenius_norm() * evolved[j].matrix().frobenius_norm();
            if c.frobenius_norm() > bound.max(1e-12) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Time-averaged observable Σ_j w_j A(t_j) over a window of (time, weight)
/// pairs with Σ w_j = 1. Realizes a slow measurement.
pub fn smoothed_observable(
    a: &Observable,
    h: &Hamiltonian,
    window: &[(f64, f64)],
) -> Result<Observable, QuantumError> {
    if window.is_empty() {
        return Err(QuantumError::EmptyWindow);
    }
    let total: f64 = window.iter().map(|(_, w)| w).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(QuantumError::BadWindow(total));
    }
    let mut acc = ComplexMatrix::zeros(a.dim());
    for &(t, w) in window {
        let at = heisenberg_evolve(a, h, t)?;
        acc = acc.add(&at.matrix().scale(C64::new(w, 0.0)));
    }
    Observable::new(acc)
}
