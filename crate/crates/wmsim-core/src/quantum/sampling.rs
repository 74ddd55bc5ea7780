//! Exact detector Monte Carlo for finite-strength measurement sequences.
//!
//! Per sample and step the state is evolved to the step time, a reading is
//! drawn from the exact Gaussian mixture (weights ρ_ii, means λ_i, variance
//! 1/g² in a-units), and the state is updated with the Gaussian Kraus
//! operator K_g(a) ∝ exp(−g²(A−a)²/4). Streams are keyed by
//! (seed, sample, step), so batches are bitwise reproducible regardless of
//! how samples are distributed over threads.

use super::{DensityMatrix, Hamiltonian, MeasurementPlan, QuantumError};
use crate::linalg::C64;
use crate::moments::{deconvolved_moments, MomentError, MomentTable};
use crate::rng;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

pub use crate::moments::SampleBatch;

#[inline]
fn mul_into(a: &[C64], b: &[C64], out: &mut [C64], d: usize) {
    for i in 0..d {
        for j in 0..d {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..d {
                acc += a[i * d + k] * b[k * d + j];
            }
            out[i * d + j] = acc;
        }
    }
}

#[inline]
fn trace_re_of_product(p: &[C64], x: &[C64], d: usize) -> f64 {
    let mut acc = 0.0;
    for r in 0..d {
        for c in 0..d {
            let a = p[r * d + c];
            let b = x[c * d + r];
            acc += a.re * b.re - a.im * b.im;
        }
    }
    acc
}

struct StepData {
    u: Vec<C64>,
    u_adj: Vec<C64>,
    projectors: Vec<Vec<C64>>,
    eigenvalues: Vec<f64>,
}

/// Simulate the full detector protocol. Requires g > 0 (the weak limit has
/// divergent reading noise in a-units).
pub fn sample_sequence(
    plan: &MeasurementPlan,
    rho: &DensityMatrix,
    h: &Hamiltonian,
    n_samples: usize,
    seed: u64,
) -> Result<SampleBatch, QuantumError> {
    let g = plan.g();
    if g <= 0.0 {
        return Err(QuantumError::WeakLimitNotSamplable);
    }
    if n_samples == 0 {
        return Err(QuantumError::NoSamples);
    }
    let d = plan.dim();
    if rho.dim() != d || h.dim() != d {
        return Err(QuantumError::MixedDimensions);
    }

    let mut steps = Vec::with_capacity(plan.len());
    let mut prev_t = 0.0;
    for (t, a) in plan.steps() {
        let u = h.propagator(t - prev_t);
        steps.push(StepData {
            u: u.entries().to_vec(),
            u_adj: u.adjoint().entries().to_vec(),
            projectors: a
                .spectrum()
                .projectors
                .iter()
                .map(|p| p.entries().to_vec())
                .collect(),
            eigenvalues: a.spectrum().eigenvalues.clone(),
        });
        prev_t = *t;
    }

    let n_steps = plan.len();
    let rho0 = rho.matrix().entries().to_vec();
    let noise_sd = 1.0 / g;

    const CHUNK: usize = 2048;
    let mut outcomes = vec![0.0f64; n_samples * n_steps];
    outcomes
        .par_chunks_mut(CHUNK * n_steps)
        .enumerate()
        .for_each(|(chunk_idx, chunk)| {
            let d2 = d * d;
            let mut x = vec![C64::new(0.0, 0.0); d2];
            let mut tmp = vec![C64::new(0.0, 0.0); d2];
            let mut kmat = vec![C64::new(0.0, 0.0); d2];
            let base = chunk_idx * CHUNK;
            for (row_idx, row) in chunk.chunks_exact_mut(n_steps).enumerate() {
                let sample = (base + row_idx) as u64;
                x.copy_from_slice(&rho0);
                for (k, step) in steps.iter().enumerate() {
                    // evolve to the step time
                    mul_into(&step.u, &x, &mut tmp, d);
                    mul_into(&tmp, &step.u_adj, &mut x, d);

                    let mut stream = rng::stream(seed, sample, k as u64);
                    // draw the mixture component from the diagonal weights
                    let u: f64 = stream.gen();
                    let mut pick = step.eigenvalues.len() - 1;
                    let mut acc = 0.0;
                    for (i, p) in step.projectors.iter().enumerate() {
                        acc += trace_re_of_product(p, &x, d).max(0.0);
                        if u < acc {
                            pick = i;
                            break;
                        }
                    }
                    let z: f64 = stream.sample(StandardNormal);
                    let a = step.eigenvalues[pick] + noise_sd * z;
                    row[k] = a;

                    // Kraus update: X ← K X K / Tr, K = Σ_i e^{−g²(λ_i−a)²/4} P_i
                    kmat.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
                    for (i, p) in step.projectors.iter().enumerate() {
                        let gap = step.eigenvalues[i] - a;
                        let c = (-g * g * gap * gap / 4.0).exp();
                        for (dst, src) in kmat.iter_mut().zip(p.iter()) {
                            *dst += src * c;
                        }
                    }
                    mul_into(&kmat, &x, &mut tmp, d);
                    mul_into(&tmp, &kmat, &mut x, d);
                    let tr: f64 = (0..d).map(|i| x[i * d + i].re).sum();
                    let inv = 1.0 / tr;
                    x.iter_mut().for_each(|v| *v *= inv);
                }
            }
        });

    Ok(SampleBatch::from_parts(outcomes, n_steps, g, seed))
}

/// Mixed moments (orders 1–3) of the underlying quasiprobability, obtained by
/// removing the additive Gaussian detector noise of variance 1/g².
pub fn deconvolve_moments(batch: &SampleBatch) -> Result<MomentTable, MomentError> {
    deconvolved_moments(
        batch.outcomes(),
        batch.n_steps(),
        1.0 / (batch.g() * batch.g()),
    )
}
