//! Classical counterpart of the weak-measurement scheme: phase-space
//! ensembles, symplectic dynamics and impulsive Gaussian detector kicks.
//!
//! A measurement couples the detector momentum p_d to the observable A for
//! an instant (interaction g·p_d·A). The registered reading shifts by g·A
//! and the system receives one step of the flow generated by A, scaled by
//! g·p_d. With σ_p = 0 the kick vanishes and the measurement is exactly
//! noninvasive at any strength.

mod experiment;

pub use experiment::{estimate_moments, reverse_experiment, run_experiment};

pub use crate::moments::SampleBatch;
use crate::rng;
use rand::Rng;
use rand_distr::StandardNormal;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClassicalError {
    #[error("non-finite force encountered")]
    NonFiniteForce,
    #[error("non-finite observable gradient encountered")]
    NonFiniteGradient,
    #[error("timestep must be positive (got {0})")]
    BadTimestep(f64),
    #[error("masses must be positive")]
    BadMasses,
    #[error("degrees of freedom mismatch: {0} vs {1}")]
    DofMismatch(usize, usize),
    #[error("protocol times must be nonnegative and nondecreasing")]
    BadTimes,
    #[error("protocol must have at least one step")]
    EmptyProtocol,
    #[error("coupling g must be finite and ≥ 0")]
    BadStrength,
    #[error("detector variances must be nonnegative and finite")]
    BadDetector,
    #[error("reading undefined: g = 0 with σ_p > 0 (use σ_p = 0 or g > 0)")]
    UndefinedReading,
    #[error("ensemble must be nonempty")]
    EmptyEnsemble,
    #[error("temperature must be positive")]
    BadTemperature,
    #[error("step index {0} out of range for {1} steps")]
    StepOutOfRange(usize, usize),
}

/// Point Γ = (q, p) in phase space.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

impl PhasePoint {
    pub fn new(q: Vec<f64>, p: Vec<f64>) -> Self {
        assert_eq!(q.len(), p.len());
        PhasePoint { q, p }
    }

    pub fn dof(&self) -> usize {
        self.q.len()
    }

    /// Time reversal: q ↦ q, p ↦ −p.
    pub fn flipped(&self) -> Self {
        PhasePoint {
            q: self.q.clone(),
            p: self.p.iter().map(|p| -p).collect(),
        }
    }
}

type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

/// Potential energy V(q), applied per coordinate for the builtin families.
#[derive(Clone)]
pub enum Potential {
    /// V = k q²/2 (k = 0 gives a free particle).
    Harmonic { k: f64 },
    /// V = a q⁴ − b q²; minima at ±√(b/2a) for a, b > 0.
    QuarticDoubleWell { a: f64, b: f64 },
    /// V = k q²/2 + c q³.
    CubicAnharmonic { k: f64, c: f64 },
    Custom { v: ScalarFn, grad: GradFn },
}

impl std::fmt::Debug for Potential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Potential::Harmonic { k } => write!(f, "Harmonic {{ k: {k} }}"),
            Potential::QuarticDoubleWell { a, b } => {
                write!(f, "QuarticDoubleWell {{ a: {a}, b: {b} }}")
            }
            Potential::CubicAnharmonic { k, c } => {
                write!(f, "CubicAnharmonic {{ k: {k}, c: {c} }}")
            }
            Potential::Custom { .. } => write!(f, "Custom"),
        }
    }
}

impl Potential {
    pub fn value(&self, q: &[f64]) -> f64 {
        match self {
            Potential::Harmonic { k } => q.iter().map(|x| 0.5 * k * x * x).sum(),
            Potential::QuarticDoubleWell { a, b } => {
                q.iter().map(|x| a * x.powi(4) - b * x * x).sum()
            }
            Potential::CubicAnharmonic { k, c } => {
                q.iter().map(|x| 0.5 * k * x * x + c * x.powi(3)).sum()
            }
            Potential::Custom { v, .. } => v(q),
        }
    }

    pub fn gradient(&self, q: &[f64], out: &mut [f64]) {
        match self {
            Potential::Harmonic { k } => {
                for (o, x) in out.iter_mut().zip(q) {
                    *o = k * x;
                }
            }
            Potential::QuarticDoubleWell { a, b } => {
                for (o, x) in out.iter_mut().zip(q) {
                    *o = 4.0 * a * x.powi(3) - 2.0 * b * x;
                }
            }
            Potential::CubicAnharmonic { k, c } => {
                for (o, x) in out.iter_mut().zip(q) {
                    *o = k * x + 3.0 * c * x * x;
                }
            }
            Potential::Custom { grad, .. } => grad(q, out),
        }
    }
}

/// Hamiltonian system H = Σ p²/2m + V(q), with the leapfrog timestep used
/// between protocol measurements.
#[derive(Debug, Clone)]
pub struct ClassicalSystem {
    pub potential: Potential,
    pub masses: Vec<f64>,
    pub timestep: f64,
}

impl ClassicalSystem {
    pub fn new(potential: Potential, masses: Vec<f64>, timestep: f64) -> Result<Self, ClassicalError> {
        if masses.is_empty() || masses.iter().any(|&m| !(m > 0.0)) {
            return Err(ClassicalError::BadMasses);
        }
        if !(timestep > 0.0) {
            return Err(ClassicalError::BadTimestep(timestep));
        }
        Ok(ClassicalSystem {
            potential,
            masses,
            timestep,
        })
    }

    pub fn one_dof(potential: Potential, timestep: f64) -> Result<Self, ClassicalError> {
        Self::new(potential, vec![1.0], timestep)
    }

    pub fn dof(&self) -> usize {
        self.masses.len()
    }

    pub fn energy(&self, point: &PhasePoint) -> f64 {
        let kinetic: f64 = point
            .p
            .iter()
            .zip(&self.masses)
            .map(|(p, m)| p * p / (2.0 * m))
            .sum();
        kinetic + self.potential.value(&point.q)
    }
}

/// Phase-space observable A(Γ) with gradients for the kick flow.
#[derive(Clone)]
pub enum ClassicalObservable {
    Position { dof: usize },
    Momentum { dof: usize },
    Custom {
        value: ScalarFn2,
        grad_q: GradFn2,
        grad_p: GradFn2,
    },
}

type ScalarFn2 = Arc<dyn Fn(&PhasePoint) -> f64 + Send + Sync>;
type GradFn2 = Arc<dyn Fn(&PhasePoint, &mut [f64]) + Send + Sync>;

impl std::fmt::Debug for ClassicalObservable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClassicalObservable::Position { dof } => write!(f, "q[{dof}]"),
            ClassicalObservable::Momentum { dof } => write!(f, "p[{dof}]"),
            ClassicalObservable::Custom { .. } => write!(f, "Custom"),
        }
    }
}

impl ClassicalObservable {
    pub fn value(&self, point: &PhasePoint) -> f64 {
        match self {
            ClassicalObservable::Position { dof } => point.q[*dof],
            ClassicalObservable::Momentum { dof } => point.p[*dof],
            ClassicalObservable::Custom { value, .. } => value(point),
        }
    }

    pub fn grad_q(&self, point: &PhasePoint, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        match self {
            ClassicalObservable::Position { dof } => out[*dof] = 1.0,
            ClassicalObservable::Momentum { .. } => {}
            ClassicalObservable::Custom { grad_q, .. } => grad_q(point, out),
        }
    }

    pub fn grad_p(&self, point: &PhasePoint, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        match self {
            ClassicalObservable::Position { .. } => {}
            ClassicalObservable::Momentum { dof } => out[*dof] = 1.0,
            ClassicalObservable::Custom { grad_p, .. } => grad_p(point, out),
        }
    }
}

/// Behavior of an observable under time reversal (q even, p odd). Custom
/// observables must declare theirs; it is not decidable from a closure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl ClassicalObservable {
    pub fn natural_parity(&self) -> Option<Parity> {
        match self {
            ClassicalObservable::Position { .. } => Some(Parity::Even),
            ClassicalObservable::Momentum { .. } => Some(Parity::Odd),
            ClassicalObservable::Custom { .. } => None,
        }
    }
}

/// Detector spread: reading noise variance σ_q and momentum variance σ_p.
/// σ_p = 0 is allowed classically and makes the kick vanish.
#[derive(Debug, Clone, Copy)]
pub struct ClassicalDetectorSpec {
    pub sigma_q: f64,
    pub sigma_p: f64,
}

impl ClassicalDetectorSpec {
    pub fn new(sigma_q: f64, sigma_p: f64) -> Result<Self, ClassicalError> {
        if !(sigma_q >= 0.0 && sigma_q.is_finite() && sigma_p >= 0.0 && sigma_p.is_finite()) {
            return Err(ClassicalError::BadDetector);
        }
        Ok(ClassicalDetectorSpec { sigma_q, sigma_p })
    }

    pub fn noiseless() -> Self {
        ClassicalDetectorSpec {
            sigma_q: 0.0,
            sigma_p: 0.0,
        }
    }
}

/// One protocol step. The detector lane pins the random stream used for this
/// step's detector draws, so removing another step (or reversing the
/// protocol) keeps the draws paired for common-random-number comparisons.
#[derive(Debug, Clone)]
pub struct ProtocolStep {
    pub time: f64,
    pub observable: ClassicalObservable,
    pub parity: Parity,
    pub(crate) detector_lane: u64,
}

impl ProtocolStep {
    pub fn new(time: f64, observable: ClassicalObservable, parity: Parity) -> Self {
        ProtocolStep {
            time,
            observable,
            parity,
            detector_lane: 0,
        }
    }
}

/// Ordered measurement schedule with coupling strength and detector spec.
/// g = 0 encodes the ideal weak limit (requires σ_p = 0).
#[derive(Debug, Clone)]
pub struct ClassicalProtocol {
    steps: Vec<ProtocolStep>,
    pub g: f64,
    pub detector: ClassicalDetectorSpec,
}

impl ClassicalProtocol {
    pub fn new(
        mut steps: Vec<ProtocolStep>,
        g: f64,
        detector: ClassicalDetectorSpec,
    ) -> Result<Self, ClassicalError> {
        if steps.is_empty() {
            return Err(ClassicalError::EmptyProtocol);
        }
        if !(g.is_finite() && g >= 0.0) {
            return Err(ClassicalError::BadStrength);
        }
        if steps[0].time < 0.0 {
            return Err(ClassicalError::BadTimes);
        }
        for w in steps.windows(2) {
            if w[1].time < w[0].time {
                return Err(ClassicalError::BadTimes);
            }
        }
        for (i, s) in steps.iter_mut().enumerate() {
            s.detector_lane = i as u64;
        }
        Ok(ClassicalProtocol { steps, g, detector })
    }

    pub fn steps(&self) -> &[ProtocolStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Drop one step, keeping the survivors' detector lanes so paired-seed
    /// comparisons against the full protocol stay aligned.
    pub fn without_step(&self, index: usize) -> Result<Self, ClassicalError> {
        if index >= self.steps.len() {
            return Err(ClassicalError::StepOutOfRange(index, self.steps.len()));
        }
        if self.steps.len() == 1 {
            return Err(ClassicalError::EmptyProtocol);
        }
        let mut steps = self.steps.clone();
        steps.remove(index);
        Ok(ClassicalProtocol {
            steps,
            g: self.g,
            detector: self.detector,
        })
    }
}

/// How an ensemble's initial conditions were drawn.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialDensity {
    /// Independent Gaussians per degree of freedom.
    Gaussian {
        mean_q: Vec<f64>,
        mean_p: Vec<f64>,
        sd_q: Vec<f64>,
        sd_p: Vec<f64>,
    },
    /// Equilibrium at temperature kT (Metropolis positions, exact momenta).
    Boltzmann { k_t: f64 },
    /// Caller-supplied points.
    Explicit,
}

/// Sampled initial conditions (uniform weights) with the recipe that
/// produced them.
#[derive(Debug, Clone)]
pub struct PhaseEnsemble {
    points: Vec<PhasePoint>,
    seed: u64,
    density: InitialDensity,
}

impl PhaseEnsemble {
    pub fn points(&self) -> &[PhasePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn density(&self) -> &InitialDensity {
        &self.density
    }

    pub fn from_points(points: Vec<PhasePoint>, seed: u64) -> Result<Self, ClassicalError> {
        if points.is_empty() {
            return Err(ClassicalError::EmptyEnsemble);
        }
        Ok(PhaseEnsemble {
            points,
            seed,
            density: InitialDensity::Explicit,
        })
    }

    /// Independent Gaussians per degree of freedom.
    pub fn gaussian(
        n_points: usize,
        mean_q: &[f64],
        mean_p: &[f64],
        sd_q: &[f64],
        sd_p: &[f64],
        seed: u64,
    ) -> Result<Self, ClassicalError> {
        if n_points == 0 {
            return Err(ClassicalError::EmptyEnsemble);
        }
        let dof = mean_q.len();
        if [mean_p.len(), sd_q.len(), sd_p.len()].iter().any(|&l| l != dof) {
            return Err(ClassicalError::DofMismatch(dof, mean_p.len()));
        }
        let mut stream = rng::stream(seed, u64::MAX, 0);
        let points = (0..n_points)
            .map(|_| {
                let q = (0..dof)
                    .map(|d| mean_q[d] + sd_q[d] * stream.sample::<f64, _>(StandardNormal))
                    .collect();
                let p = (0..dof)
                    .map(|d| mean_p[d] + sd_p[d] * stream.sample::<f64, _>(StandardNormal))
                    .collect();
                PhasePoint::new(q, p)
            })
            .collect();
        Ok(PhaseEnsemble {
            points,
            seed,
            density: InitialDensity::Gaussian {
                mean_q: mean_q.to_vec(),
                mean_p: mean_p.to_vec(),
                sd_q: sd_q.to_vec(),
                sd_p: sd_p.to_vec(),
            },
        })
    }

    /// Boltzmann equilibrium at temperature kT. Momenta are exact Gaussians;
    /// positions come from a Metropolis walk (10⁴ burn-in sweeps, stride 10)
    /// except for the harmonic potential, which is sampled exactly.
    pub fn boltzmann(
        sys: &ClassicalSystem,
        k_t: f64,
        n_points: usize,
        seed: u64,
    ) -> Result<Self, ClassicalError> {
        if n_points == 0 {
            return Err(ClassicalError::EmptyEnsemble);
        }
        if !(k_t > 0.0) {
            return Err(ClassicalError::BadTemperature);
        }
        let dof = sys.dof();
        let mut stream = rng::stream(seed, u64::MAX, 1);

        let mut points = Vec::with_capacity(n_points);
        if let Potential::Harmonic { k } = sys.potential {
            let sd_q = if k > 0.0 { (k_t / k).sqrt() } else { 0.0 };
            for _ in 0..n_points {
                let q = (0..dof)
                    .map(|_| sd_q * stream.sample::<f64, _>(StandardNormal))
                    .collect();
                let p = (0..dof)
                    .map(|d| {
                        (sys.masses[d] * k_t).sqrt() * stream.sample::<f64, _>(StandardNormal)
                    })
                    .collect();
                points.push(PhasePoint::new(q, p));
            }
            return Ok(PhaseEnsemble {
                points,
                seed,
                density: InitialDensity::Boltzmann { k_t },
            });
        }

        const BURN_IN_SWEEPS: usize = 10_000;
        const STRIDE: usize = 10;
        let scale = k_t.sqrt().max(0.2);
        let mut q = vec![0.0f64; dof];
        let mut v_cur = sys.potential.value(&q);
        let sweep = |q: &mut Vec<f64>, v_cur: &mut f64, stream: &mut rand_chacha::ChaCha8Rng| {
            for d in 0..dof {
                let old = q[d];
                q[d] = old + scale * stream.sample::<f64, _>(StandardNormal);
                let v_new = sys.potential.value(q);
                let accept = (-(v_new - *v_cur) / k_t).exp();
                if stream.gen::<f64>() < accept {
                    *v_cur = v_new;
                } else {
                    q[d] = old;
                }
            }
        };
        for _ in 0..BURN_IN_SWEEPS {
            sweep(&mut q, &mut v_cur, &mut stream);
        }
        for _ in 0..n_points {
            for _ in 0..STRIDE {
                sweep(&mut q, &mut v_cur, &mut stream);
            }
            let p = (0..dof)
                .map(|d| (sys.masses[d] * k_t).sqrt() * stream.sample::<f64, _>(StandardNormal))
                .collect();
            points.push(PhasePoint::new(q.clone(), p));
        }
        Ok(PhaseEnsemble {
            points,
            seed,
            density: InitialDensity::Boltzmann { k_t },
        })
    }
}

/// In-place velocity-Verlet integration; shared by the public entry point
/// and the experiment drivers.
pub(crate) fn leapfrog_inplace(
    q: &mut [f64],
    p: &mut [f64],
    force: &mut [f64],
    sys: &ClassicalSystem,
    dt: f64,
    steps: usize,
) -> Result<(), ClassicalError> {
    let dof = q.len();
    sys.potential.gradient(q, force);
    for f in force.iter() {
        if !f.is_finite() {
            return Err(ClassicalError::NonFiniteForce);
        }
    }
    for _ in 0..steps {
        for d in 0..dof {
            p[d] -= 0.5 * dt * force[d];
            q[d] += dt * p[d] / sys.masses[d];
        }
        sys.potential.gradient(q, force);
        for f in force.iter() {
            if !f.is_finite() {
                return Err(ClassicalError::NonFiniteForce);
            }
        }
        for d in 0..dof {
            p[d] -= 0.5 * dt * force[d];
        }
    }
    Ok(())
}

/// Velocity-Verlet evolution over `steps` steps of size `dt`. Symplectic and
/// time-reversible: forward, flip p, forward, flip p returns the start.
pub fn leapfrog_evolve(
    point: &PhasePoint,
    sys: &ClassicalSystem,
    dt: f64,
    steps: usize,
) -> Result<PhasePoint, ClassicalError> {
    if !(dt > 0.0) {
        return Err(ClassicalError::BadTimestep(dt));
    }
    if point.dof() != sys.dof() {
        return Err(ClassicalError::DofMismatch(point.dof(), sys.dof()));
    }
    let mut q = point.q.clone();
    let mut p = point.p.clone();
    let mut force = vec![0.0; q.len()];
    leapfrog_inplace(&mut q, &mut p, &mut force, sys, dt, steps)?;
    Ok(PhasePoint::new(q, p))
}

/// Impulsive measurement: reading g·A(Γ) (additive reading noise is the
/// caller's job) and one explicit-Euler step of the flow generated by A,
/// scaled by g·p_d. Exact for observables linear in q or p; the O(g²)
/// integration error matches the order of the physical disturbance.
pub fn measurement_kick(
    point: &PhasePoint,
    a: &ClassicalObservable,
    g: f64,
    p_d: f64,
) -> Result<(PhasePoint, f64), ClassicalError> {
    let dof = point.dof();
    let reading = g * a.value(point);
    if !reading.is_finite() {
        return Err(ClassicalError::NonFiniteGradient);
    }
    if p_d == 0.0 {
        return Ok((point.clone(), reading));
    }
    let mut gq = vec![0.0; dof];
    let mut gp = vec![0.0; dof];
    a.grad_q(point, &mut gq);
    a.grad_p(point, &mut gp);
    if gq.iter().chain(gp.iter()).any(|v| !v.is_finite()) {
        return Err(ClassicalError::NonFiniteGradient);
    }
    let mut out = point.clone();
    for d in 0..dof {
        out.q[d] += g * p_d * gp[d];
        out.p[d] -= g * p_d * gq[d];
    }
    Ok((out, reading))
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn kick_inplace(
    q: &mut [f64],
    p: &mut [f64],
    gq: &mut [f64],
    gp: &mut [f64],
    a: &ClassicalObservable,
    g: f64,
    p_d: f64,
    negate: bool,
) -> Result<f64, ClassicalError> {
    // borrow juggling: observables take a PhasePoint view
    let point = PhasePoint::new(q.to_vec(), p.to_vec());
    let sign = if negate { -1.0 } else { 1.0 };
    let reading = sign * g * a.value(&point);
    if !reading.is_finite() {
        return Err(ClassicalError::NonFiniteGradient);
    }
    if p_d != 0.0 {
        a.grad_q(&point, gq);
        a.grad_p(&point, gp);
        if gq.iter().chain(gp.iter()).any(|v| !v.is_finite()) {
            return Err(ClassicalError::NonFiniteGradient);
        }
        for d in 0..q.len() {
            q[d] += sign * g * p_d * gp[d];
            p[d] -= sign * g * p_d * gq[d];
        }
    }
    Ok(reading)
}
