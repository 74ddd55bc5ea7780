//! Forward and time-reversed measurement experiments on phase-space
//! ensembles.
//!
//! The reversed experiment prepares the momentum-flipped initial point,
//! which traces the time-reverse of the forward trajectory's backward
//! extension. Implementation-wise that means: evolve the unflipped point
//! kick-free through the whole schedule, flip momenta, then run the
//! measurement sequence in reversed order with the original gaps. With
//! σ_p = 0 and shared detector streams the reversed readings retrace the
//! forward ones exactly (up to integrator roundoff), which is what turns
//! the classical time-symmetry claim into a deterministic test.

use super::{
    kick_inplace, leapfrog_inplace, ClassicalError, ClassicalProtocol, ClassicalSystem, Parity,
    PhaseEnsemble, SampleBatch,
};
use crate::moments::{deconvolved_moments, MomentError, MomentTable};
use crate::rng;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

fn validate(
    ens: &PhaseEnsemble,
    sys: &ClassicalSystem,
    proto: &ClassicalProtocol,
) -> Result<(), ClassicalError> {
    if ens.is_empty() {
        return Err(ClassicalError::EmptyEnsemble);
    }
    if ens.points()[0].dof() != sys.dof() {
        return Err(ClassicalError::DofMismatch(ens.points()[0].dof(), sys.dof()));
    }
    if proto.g == 0.0 && proto.detector.sigma_p > 0.0 {
        return Err(ClassicalError::UndefinedReading);
    }
    Ok(())
}

/// Integer leapfrog step counts for the gaps of the measurement schedule,
/// starting from t = 0. Shared by the forward and reversed drivers so both
/// walk the identical arithmetic.
fn gap_steps(proto: &ClassicalProtocol, dt: f64) -> Vec<usize> {
    let mut prev = 0.0;
    proto
        .steps()
        .iter()
        .map(|s| {
            let n = ((s.time - prev) / dt).round() as usize;
            prev = s.time;
            n
        })
        .collect()
}

struct DetectorDraws {
    p_d: f64,
    noise: f64,
}

fn detector_draws(seed: u64, point_idx: u64, lane: u64, sigma_q: f64, sigma_p: f64) -> DetectorDraws {
    let mut stream = rng::stream(seed, point_idx, lane);
    let z_p: f64 = stream.sample(StandardNormal);
    let z_q: f64 = stream.sample(StandardNormal);
    DetectorDraws {
        p_d: sigma_p.sqrt() * z_p,
        noise: sigma_q.sqrt() * z_q,
    }
}

/// Reading in a-units: the raw detector position (g·A + ν, ν ~ N(0, σ_q))
/// divided by g. At g = 0 the weak limit is taken literally: the reading is
/// A itself, with the noise already expressed in a-units.
#[inline]
fn to_a_units(kick_reading: f64, noise: f64, g: f64) -> f64 {
    if g > 0.0 {
        (kick_reading + noise) / g
    } else {
        kick_reading + noise
    }
}

/// Run the protocol on every ensemble point; readings are reported in
/// a-units, one row per trajectory, columns in protocol order.
pub fn run_experiment(
    ens: &PhaseEnsemble,
    sys: &ClassicalSystem,
    proto: &ClassicalProtocol,
    seed: u64,
) -> Result<SampleBatch, ClassicalError> {
    validate(ens, sys, proto)?;
    let n_steps = proto.len();
    let dt = sys.timestep;
    let steps_per_gap = gap_steps(proto, dt);
    let dof = sys.dof();

    let mut outcomes = vec![0.0f64; ens.len() * n_steps];
    let result: Result<Vec<()>, ClassicalError> = outcomes
        .par_chunks_mut(n_steps)
        .zip(ens.points().par_iter())
        .enumerate()
        .map(|(idx, (row, point))| {
            let mut q = point.q.clone();
            let mut p = point.p.clone();
            let mut force = vec![0.0; dof];
            let mut gq = vec![0.0; dof];
            let mut gp = vec![0.0; dof];
            for (k, step) in proto.steps().iter().enumerate() {
                leapfrog_inplace(&mut q, &mut p, &mut force, sys, dt, steps_per_gap[k])?;
                let draws = detector_draws(
                    seed,
                    idx as u64,
                    step.detector_lane,
                    proto.detector.sigma_q,
                    proto.detector.sigma_p,
                );
                let reading = kick_inplace(
                    &mut q,
                    &mut p,
                    &mut gq,
                    &mut gp,
                    &step.observable,
                    proto.g,
                    draws.p_d,
                    false,
                )?;
                row[k] = to_a_units(reading, draws.noise, proto.g);
            }
            Ok(())
        })
        .collect();
    result?;

    Ok(SampleBatch::from_parts(outcomes, n_steps, proto.g, seed))
}

/// Run the time-reversed experiment: momentum-flipped initial points, the
/// schedule traversed in reversed order, odd-parity observables negated.
/// Output columns stay aligned to the forward protocol order; each step
/// keeps its forward detector stream, so with σ_p = 0 the comparison against
/// the forward run is deterministic.
pub fn reverse_experiment(
    ens: &PhaseEnsemble,
    sys: &ClassicalSystem,
    proto: &ClassicalProtocol,
    seed: u64,
) -> Result<SampleBatch, ClassicalError> {
    validate(ens, sys, proto)?;
    let n_steps = proto.len();
    let dt = sys.timestep;
    let steps_per_gap = gap_steps(proto, dt);
    let total_steps: usize = steps_per_gap.iter().sum();
    let dof = sys.dof();

    let mut outcomes = vec![0.0f64; ens.len() * n_steps];
    let result: Result<Vec<()>, ClassicalError> = outcomes
        .par_chunks_mut(n_steps)
        .zip(ens.points().par_iter())
        .enumerate()
        .map(|(idx, (row, point))| {
            let mut q = point.q.clone();
            let mut p = point.p.clone();
            let mut force = vec![0.0; dof];
            let mut gq = vec![0.0; dof];
            let mut gp = vec![0.0; dof];
            // The reversed trajectory at its first measurement equals the
            // momentum flip of the forward end point: evolve kick-free to
            // the last schedule time, then flip.
            leapfrog_inplace(&mut q, &mut p, &mut force, sys, dt, total_steps)?;
            p.iter_mut().for_each(|v| *v = -*v);
            for j in (0..n_steps).rev() {
                let step = &proto.steps()[j];
                let draws = detector_draws(
                    seed,
                    idx as u64,
                    step.detector_lane,
                    proto.detector.sigma_q,
                    proto.detector.sigma_p,
                );
                let reading = kick_inplace(
                    &mut q,
                    &mut p,
                    &mut gq,
                    &mut gp,
                    &step.observable,
                    proto.g,
                    draws.p_d,
                    step.parity == Parity::Odd,
                )?;
                row[j] = to_a_units(reading, draws.noise, proto.g);
                // advance through the gap that preceded this step forward
                if j > 0 {
                    leapfrog_inplace(&mut q, &mut p, &mut force, sys, dt, steps_per_gap[j])?;
                }
            }
            Ok(())
        })
        .collect();
    result?;

    Ok(SampleBatch::from_parts(outcomes, n_steps, proto.g, seed))
}

/// Mixed moments up to order three with the detector noise removed:
/// additive Gaussian of variance σ_q/g² per reading (σ_q at g = 0, where
/// readings are already in a-units).
pub fn estimate_moments(
    batch: &SampleBatch,
    g: f64,
    sigma_q: f64,
) -> Result<MomentTable, MomentError> {
    let noise_var = if g > 0.0 { sigma_q / (g * g) } else { sigma_q };
    deconvolved_moments(batch.outcomes(), batch.n_steps(), noise_var)
}
